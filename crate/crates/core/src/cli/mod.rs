//! Command-line front end.
//!
//! Every long flag may also be given as `key = value` in a file passed with
//! `--config`; flags on the command line take precedence.

mod compare;
mod config;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytic::{bep_curve, EnumerationConfig, Fading, Form, System, DEFAULT_BUDGET, DEFAULT_KMAX};
use crate::error::{Error, Result};
use crate::filterbank::{make_egf, make_martin, make_rect, PrototypeFilter};
use crate::interference::{build_set, ordered_magnitudes, set_size, sir, truncate, FbmcGrid};
use crate::simulator::{run_ber, ChannelModel, SimConfig, SimSystem, StopRule};

pub use compare::{compare, read_bep_csv, read_sim_csv, CompareRow};
pub use config::{parse_config, parse_grid};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_COMPARE: i32 = 4;

/// Environment variable that sets the worker count.
pub const THREADS_ENV: &str = "FBMC_BEP_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fbmc-bep", version, about = "Closed-form BEP and Monte Carlo BER for FBMC, OFDM and PAM")]
#[command(args_override_self = true)]
pub struct RunConfig {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    /// key = value file with defaults for any long flag.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Filter taps, interference set size, SIR and ordered |eps| decay.
    FilterInfo(FilterInfoArgs),
    /// Evaluate a closed-form BEP curve.
    Bep(BepArgs),
    /// Run a Monte Carlo BER simulation.
    Simulate(SimulateArgs),
    /// Join BEP and BER CSVs and flag points with |z| > 3.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterChoice {
    Martin,
    Egf,
    Rect,
    /// Taps read from --taps.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SystemChoice {
    Pam,
    Ofdm,
    Fbmc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelChoice {
    Awgn,
    Rayleigh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormChoice {
    Approx,
    Exact,
}

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    /// Prototype filter family.
    #[arg(long, value_enum, default_value = "martin")]
    pub filter: FilterChoice,
    /// EGF spreading factor.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Overlap factor K.
    #[arg(long, default_value_t = 4)]
    pub overlap: usize,
    /// Subcarriers M.
    #[arg(long, default_value_t = 16)]
    pub subcarriers: usize,
    /// One tap per line, used with --filter file.
    #[arg(long, value_name = "FILE")]
    pub taps: Option<PathBuf>,
}

impl FilterArgs {
    pub fn build(&self) -> Result<PrototypeFilter> {
        match self.filter {
            FilterChoice::Martin => make_martin(self.overlap, self.subcarriers),
            FilterChoice::Egf => make_egf(self.alpha, self.overlap, self.subcarriers),
            FilterChoice::Rect => make_rect(self.subcarriers),
            FilterChoice::File => {
                let path = self
                    .taps
                    .as_ref()
                    .ok_or_else(|| Error::InvalidParameter("--filter file needs --taps".into()))?;
                PrototypeFilter::read_taps(BufReader::new(File::open(path)?), self.overlap)
            }
        }
    }

    pub fn grid(&self) -> Result<FbmcGrid> {
        FbmcGrid::new(self.subcarriers, self.build()?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SystemArgs {
    #[arg(long, value_enum, default_value = "fbmc")]
    pub system: SystemChoice,
    #[arg(long, value_enum, default_value = "awgn")]
    pub channel: ChannelChoice,
    /// PAM order N_p (PAM and FBMC).
    #[arg(long, default_value_t = 8)]
    pub order: usize,
    /// QAM order N_q (OFDM).
    #[arg(long, default_value_t = 64)]
    pub qam_order: usize,
    /// Cyclic prefix length N_cp (OFDM).
    #[arg(long, default_value_t = 2)]
    pub cp: usize,
    /// gamma_b grid in dB: start:stop:step or a comma-separated list.
    #[arg(long, default_value = "0:12:1")]
    pub snr: String,
    /// Output CSV (stdout when omitted).
    #[arg(long, short, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub filter: FilterArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FilterInfoArgs {
    #[command(flatten)]
    pub filter: FilterArgs,
    /// Ordered magnitudes to print.
    #[arg(long, default_value_t = 20)]
    pub top: usize,
    /// Write the taps here.
    #[arg(long, value_name = "FILE")]
    pub taps_out: Option<PathBuf>,
    /// Write the interference table CSV here.
    #[arg(long, value_name = "FILE")]
    pub table_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BepArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, value_enum, default_value = "exact")]
    pub form: FormChoice,
    /// Interference elements kept (FBMC).
    #[arg(long, default_value_t = DEFAULT_KMAX)]
    pub kmax: usize,
    /// Largest number of offsets enumerated per point.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Stop a point after this many bit errors.
    #[arg(long, default_value_t = 300)]
    pub min_errors: u64,
    /// Stop a point after this many bits.
    #[arg(long, default_value_t = 100_000_000)]
    pub max_bits: u64,
    /// Symbols sharing one Rayleigh fade.
    #[arg(long, default_value_t = 1)]
    pub coherence: usize,
    /// Symbol columns per frame (system default when omitted).
    #[arg(long)]
    pub frame_columns: Option<usize>,
    /// Write the JSON run manifest here.
    #[arg(long, value_name = "FILE")]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// CSV written by `bep`.
    #[arg(long, value_name = "FILE")]
    pub bep: PathBuf,
    /// CSV written by `simulate`.
    #[arg(long, value_name = "FILE")]
    pub sim: PathBuf,
    #[arg(long, short, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// |z| above which a point is flagged.
    #[arg(long, default_value_t = 3.0)]
    pub threshold: f64,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = args.into_iter().map(Into::into).collect();
    let args = match config::merge_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let parsed = match RunConfig::try_parse_from(&args) {
        Ok(p) => p,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = parsed.threads {
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::debug!("thread pool already initialized");
        }
    }
    match dispatch(&parsed.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::EnumerationBudgetExceeded { .. } => EXIT_BUDGET,
        Error::Io(_) => EXIT_RUNTIME,
        _ => EXIT_USAGE,
    }
}

fn dispatch(command: &Command) -> Result<i32> {
    match command {
        Command::FilterInfo(a) => cmd_filter_info(a),
        Command::Bep(a) => cmd_bep(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Compare(a) => cmd_compare(a),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn cmd_filter_info(args: &FilterInfoArgs) -> Result<i32> {
    let grid = args.filter.grid()?;
    let filter = grid.filter();
    let table = build_set(&grid);
    let mut out = open_output(None)?;
    writeln!(out, "filter: {}", filter.family())?;
    writeln!(out, "length: {}", filter.len())?;
    writeln!(out, "overlap: {}", filter.overlap())?;
    writeln!(out, "subcarriers: {}", grid.subcarriers())?;
    writeln!(out, "energy: {:.15}", filter.energy())?;
    writeln!(out, "set_size: {}", set_size(grid.subcarriers(), filter.len()))?;
    writeln!(out, "entries: {} ({} numerically null)", table.len(), table.null_count())?;
    writeln!(out, "sir_db: {:.4}", sir(&table))?;
    writeln!(out, "rank,abs_epsilon")?;
    for (i, v) in ordered_magnitudes(&table).iter().take(args.top).enumerate() {
        writeln!(out, "{},{v:.6e}", i + 1)?;
    }
    out.flush()?;
    if let Some(p) = &args.taps_out {
        filter.write_taps(BufWriter::new(File::create(p)?))?;
    }
    if let Some(p) = &args.table_out {
        table.write_csv(BufWriter::new(File::create(p)?))?;
    }
    Ok(EXIT_OK)
}

fn fading(c: ChannelChoice) -> Fading {
    match c {
        ChannelChoice::Awgn => Fading::Awgn,
        ChannelChoice::Rayleigh => Fading::Rayleigh,
    }
}

pub fn cmd_bep(args: &BepArgs) -> Result<i32> {
    let s = &args.system;
    let grid_db = parse_grid(&s.snr)?;
    let system = match s.system {
        SystemChoice::Pam => System::Pam { order: s.order },
        SystemChoice::Ofdm => System::Ofdm { qam_order: s.qam_order, subcarriers: s.filter.subcarriers, cp: s.cp },
        SystemChoice::Fbmc => {
            let table = truncate(&build_set(&s.filter.grid()?), args.kmax)?;
            System::Fbmc { order: s.order, table }
        }
    };
    let form = match args.form {
        FormChoice::Approx => Form::Approx,
        FormChoice::Exact => Form::Exact,
    };
    let config = EnumerationConfig { budget: args.budget, parallel: true };
    let started = Instant::now();
    let curve = bep_curve(&system, fading(s.channel), form, &grid_db, config).map_err(|e| {
        if let Error::EnumerationBudgetExceeded { .. } = e {
            eprintln!("hint: lower --kmax or raise --budget");
        }
        e
    })?;
    log::info!("{} points in {:.2?}", grid_db.len(), started.elapsed());
    let mut out = open_output(s.output.as_deref())?;
    curve.write_csv(&mut out)?;
    out.flush()?;
    Ok(EXIT_OK)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<i32> {
    let s = &args.system;
    let grid_db = parse_grid(&s.snr)?;
    let system = match s.system {
        SystemChoice::Pam => SimSystem::Pam { order: s.order },
        SystemChoice::Ofdm => {
            SimSystem::Ofdm { qam_order: s.qam_order, subcarriers: s.filter.subcarriers, cp: s.cp }
        }
        SystemChoice::Fbmc => SimSystem::Fbmc { order: s.order, grid: s.filter.grid()? },
    };
    let channel = match s.channel {
        ChannelChoice::Awgn => ChannelModel::awgn(),
        ChannelChoice::Rayleigh => ChannelModel::rayleigh(args.coherence)?,
    };
    let mut config = SimConfig::new(system, channel);
    config.seed = args.seed;
    config.stop = StopRule { min_errors: args.min_errors, max_bits: args.max_bits };
    if let Some(c) = args.frame_columns {
        config.frame_columns = c;
    }
    let started = Instant::now();
    let result = run_ber(&config, &grid_db)?;
    log::info!("simulation finished in {:.2?}", started.elapsed());
    let mut out = open_output(s.output.as_deref())?;
    result.write_csv(&mut out)?;
    out.flush()?;
    if let Some(p) = &args.manifest {
        let file = BufWriter::new(File::create(p)?);
        serde_json::to_writer_pretty(file, &result.manifest()).map_err(io::Error::from)?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_compare(args: &CompareArgs) -> Result<i32> {
    let bep = read_bep_csv(BufReader::new(File::open(&args.bep)?))?;
    let sim = read_sim_csv(BufReader::new(File::open(&args.sim)?))?;
    let rows = compare(&bep, &sim, args.threshold)?;
    let mut out = open_output(args.output.as_deref())?;
    compare::write_csv(&rows, &mut out)?;
    out.flush()?;
    let flagged = rows.iter().filter(|r| r.flagged).count();
    if flagged > 0 {
        eprintln!("{flagged} of {} points exceed |z| = {}", rows.len(), args.threshold);
        return Ok(EXIT_COMPARE);
    }
    Ok(EXIT_OK)
}

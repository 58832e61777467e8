//! Monte Carlo BER measurement.
//!
//! Every frame draws from its own ChaCha substream keyed by the SNR index and
//! frame number, and frames run in fixed-size batches whose counts are merged
//! in order. Results therefore depend only on the seed and configuration, not
//! on how many worker threads are available.

use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{PamConstellation, QamConstellation};
use crate::error::{Error, Result};
use crate::interference::FbmcGrid;
use crate::modem::{
    fbmc_analyze_all, fbmc_project_all, fbmc_synthesize, ofdm_demodulate, ofdm_modulate, pam_demap, pam_map,
    qam_demap, qam_map, BitBlock,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    Awgn,
    FlatRayleighPerSubcarrier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChannelModel {
    pub kind: ChannelKind,
    /// Consecutive symbols sharing one fade (Rayleigh only).
    pub coherence: usize,
}

impl ChannelModel {
    pub fn awgn() -> Self {
        Self { kind: ChannelKind::Awgn, coherence: 1 }
    }

    pub fn rayleigh(coherence: usize) -> Result<Self> {
        if coherence == 0 {
            return Err(Error::InvalidParameter("fading coherence must be at least one symbol".into()));
        }
        Ok(Self { kind: ChannelKind::FlatRayleighPerSubcarrier, coherence })
    }
}

/// Zero-mean circular complex Gaussian with `E|z|^2 = variance`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let sigma = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sigma * re, sigma * im)
}

/// `x_i = g_i s_i + eta_i` with `eta_i ~ CN(0, N_0)`; unit gains when `gains` is `None`.
pub fn apply_channel<R: Rng + ?Sized>(
    clean: &[Complex64],
    gains: Option<&[Complex64]>,
    n0: f64,
    rng: &mut R,
) -> Vec<Complex64> {
    clean
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let g = gains.map_or(Complex64::new(1.0, 0.0), |g| g[i]);
            let noise = if n0 > 0.0 { complex_gaussian(rng, n0) } else { Complex64::new(0.0, 0.0) };
            g * s + noise
        })
        .collect()
}

/// The link whose BER is measured.
#[derive(Debug, Clone)]
pub enum SimSystem {
    Pam { order: usize },
    Ofdm { qam_order: usize, subcarriers: usize, cp: usize },
    Fbmc { order: usize, grid: FbmcGrid },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_bits: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { min_errors: 300, max_bits: 100_000_000 }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub system: SimSystem,
    pub channel: ChannelModel,
    pub stop: StopRule,
    pub seed: u64,
    /// Symbol columns per frame (FBMC and OFDM) or symbols per frame (PAM).
    pub frame_columns: usize,
    /// Frames simulated between stopping-rule checks.
    pub batch: usize,
}

impl SimConfig {
    pub fn new(system: SimSystem, channel: ChannelModel) -> Self {
        let frame_columns = match system {
            SimSystem::Pam { .. } => 1024,
            SimSystem::Ofdm { .. } => 32,
            SimSystem::Fbmc { .. } => 48,
        };
        Self { system, channel, stop: StopRule::default(), seed: 1, frame_columns, batch: 16 }
    }

    /// Configuration summary for run manifests.
    pub fn echo(&self) -> serde_json::Value {
        let system = match &self.system {
            SimSystem::Pam { order } => serde_json::json!({ "kind": "pam", "order": order }),
            SimSystem::Ofdm { qam_order, subcarriers, cp } => {
                serde_json::json!({ "kind": "ofdm", "qam_order": qam_order, "subcarriers": subcarriers, "cp": cp })
            }
            SimSystem::Fbmc { order, grid } => serde_json::json!({
                "kind": "fbmc",
                "order": order,
                "subcarriers": grid.subcarriers(),
                "filter": grid.filter().family().to_string(),
                "filter_len": grid.filter().len(),
                "overlap": grid.filter().overlap(),
            }),
        };
        serde_json::json!({
            "system": system,
            "channel": self.channel,
            "stop": self.stop,
            "seed": self.seed,
            "frame_columns": self.frame_columns,
            "batch": self.batch,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.frame_columns == 0 || self.batch == 0 {
            return Err(Error::InvalidParameter("frame size and batch must be positive".into()));
        }
        if self.stop.max_bits == 0 {
            return Err(Error::InvalidParameter("max_bits must be positive".into()));
        }
        if self.channel.coherence == 0 {
            return Err(Error::InvalidParameter("fading coherence must be at least one symbol".into()));
        }
        match &self.system {
            SimSystem::Pam { order } => {
                PamConstellation::new(*order)?;
            }
            SimSystem::Ofdm { qam_order, subcarriers, cp } => {
                QamConstellation::new(*qam_order)?;
                if *subcarriers == 0 || cp > subcarriers {
                    return Err(Error::InvalidParameter(format!("invalid OFDM M={subcarriers}, N_cp={cp}")));
                }
            }
            SimSystem::Fbmc { order, grid } => {
                PamConstellation::new(*order)?;
                let guard = 2 * burn_in(grid);
                if self.frame_columns <= guard {
                    return Err(Error::InvalidParameter(format!(
                        "FBMC frames need more than {guard} columns, got {}",
                        self.frame_columns
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Columns excluded at each frame edge, `2K`.
pub fn burn_in(grid: &FbmcGrid) -> usize {
    2 * grid.filter().overlap()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimPoint {
    pub ebn0_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    /// `1.96 sqrt(ber (1 - ber) / bits)`.
    pub ci95: f64,
    /// No error was observed, so `ber` only bounds the true rate.
    pub upper_bound_only: bool,
}

impl SimPoint {
    fn from_counts(ebn0_db: f64, bits: u64, errors: u64) -> Self {
        let ber = errors as f64 / bits as f64;
        let ci95 = 1.96 * (ber * (1.0 - ber) / bits as f64).sqrt();
        Self { ebn0_db, bits, errors, ber, ci95, upper_bound_only: errors == 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub points: Vec<SimPoint>,
    pub seed: u64,
    pub config: serde_json::Value,
}

impl SimResult {
    /// CSV with header `ebn0_db,bits,errors,ber,ci95`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "ebn0_db,bits,errors,ber,ci95")?;
        for p in &self.points {
            writeln!(out, "{},{},{},{:.15e},{:.15e}", p.ebn0_db, p.bits, p.errors, p.ber, p.ci95)?;
        }
        Ok(())
    }

    /// Run manifest: seed, configuration echo, points, and a timestamp.
    pub fn manifest(&self) -> serde_json::Value {
        let generated = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        serde_json::json!({
            "seed": self.seed,
            "config": self.config,
            "points": self.points,
            "generated_unix": generated,
            "version": env!("CARGO_PKG_VERSION"),
        })
    }
}

/// `(ber - bep) / sqrt(bep (1 - bep) / bits)`.
pub fn z_score(ber: f64, bep: f64, bits: u64) -> f64 {
    let sigma = (bep * (1.0 - bep) / bits as f64).sqrt();
    if sigma == 0.0 {
        return if ber == bep { 0.0 } else { f64::INFINITY };
    }
    (ber - bep) / sigma
}

/// Measures BER at each `gamma_b` (dB) in `grid_db`.
pub fn run_ber(config: &SimConfig, grid_db: &[f64]) -> Result<SimResult> {
    config.validate()?;
    let mut points = Vec::with_capacity(grid_db.len());
    for (gi, &db) in grid_db.iter().enumerate() {
        let gamma_b = crate::db_to_linear(db);
        let (mut bits, mut errors) = (0u64, 0u64);
        let mut frame = 0u64;
        while errors < config.stop.min_errors && bits < config.stop.max_bits {
            let start = frame;
            frame += config.batch as u64;
            let counts: Vec<(u64, u64)> = (start..frame)
                .into_par_iter()
                .map(|f| {
                    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                    rng.set_stream(((gi as u64) << 32) | f);
                    simulate_frame(config, gamma_b, &mut rng)
                })
                .collect::<Result<_>>()?;
            for (b, e) in counts {
                bits += b;
                errors += e;
            }
        }
        let point = SimPoint::from_counts(db, bits, errors);
        log::info!("{db} dB: {errors} errors in {bits} bits");
        if point.upper_bound_only {
            log::warn!("{db} dB: no errors in {bits} bits, BER is an upper bound only");
        }
        points.push(point);
    }
    Ok(SimResult { points, seed: config.seed, config: config.echo() })
}

fn count_errors(sent: &[u8], received: &[u8]) -> u64 {
    sent.iter().zip(received).filter(|(a, b)| a != b).count() as u64
}

/// Per-symbol fading gains for `rows` carriers over `columns` symbols, `[m][n]`.
fn draw_gains<R: Rng + ?Sized>(rng: &mut R, rows: usize, columns: usize, coherence: usize) -> Vec<Vec<Complex64>> {
    (0..rows)
        .map(|_| {
            let mut row = Vec::with_capacity(columns);
            while row.len() < columns {
                let h = complex_gaussian(rng, 1.0);
                let block = coherence.min(columns - row.len());
                row.extend(std::iter::repeat_n(h, block));
            }
            row
        })
        .collect()
}

/// Multiplies `clean[m][n]` by its gain, adds `CN(0, N_0)` and zero-forces.
fn fade_and_equalize<R: Rng + ?Sized>(
    clean: &[Vec<Complex64>],
    gains: &[Vec<Complex64>],
    n0: f64,
    rng: &mut R,
) -> Vec<Vec<Complex64>> {
    clean
        .iter()
        .zip(gains)
        .map(|(row, g)| {
            apply_channel(row, Some(g), n0, rng).into_iter().zip(g).map(|(r, h)| r / h).collect()
        })
        .collect()
}

fn simulate_frame(config: &SimConfig, gamma_b: f64, rng: &mut ChaCha8Rng) -> Result<(u64, u64)> {
    let columns = config.frame_columns;
    let rayleigh = config.channel.kind == ChannelKind::FlatRayleighPerSubcarrier;
    match &config.system {
        SimSystem::Pam { order } => {
            let pam = PamConstellation::new(*order)?;
            let block = BitBlock::random(rng, columns, pam.bits_per_symbol());
            let symbols: Vec<Complex64> =
                pam_map(block.bits(), &pam)?.into_iter().map(|a| Complex64::new(a, 0.0)).collect();
            let n0 = pam.noise_density(gamma_b);
            let received: Vec<f64> = if rayleigh {
                let gains = draw_gains(rng, 1, columns, config.channel.coherence);
                fade_and_equalize(&[symbols], &gains, n0, rng)[0].iter().map(|c| c.re).collect()
            } else {
                apply_channel(&symbols, None, n0, rng).iter().map(|c| c.re).collect()
            };
            let bits = pam_demap(&received, &pam);
            Ok((block.bits().len() as u64, count_errors(block.bits(), &bits)))
        }
        SimSystem::Ofdm { qam_order, subcarriers, cp } => {
            let qam = QamConstellation::new(*qam_order)?;
            let m = *subcarriers;
            let nb = qam.bits_per_symbol();
            let block = BitBlock::random(rng, m * columns, nb);
            let flat = qam_map(block.bits(), &qam)?;
            // flat symbol index n * M + m
            let symbols: Vec<Vec<Complex64>> =
                (0..m).map(|i| (0..columns).map(|n| flat[n * m + i]).collect()).collect();
            let signal = ofdm_modulate(&symbols, *cp)?;
            let n0 = qam.symbol_energy() * (m + cp) as f64 / (m as f64 * nb as f64 * gamma_b);
            let received = if rayleigh {
                let clean = ofdm_demodulate(&signal, m, *cp)?;
                let gains = draw_gains(rng, m, columns, config.channel.coherence);
                fade_and_equalize(&clean, &gains, n0, rng)
            } else {
                ofdm_demodulate(&apply_channel(&signal, None, n0, rng), m, *cp)?
            };
            let flat_rx: Vec<Complex64> = (0..columns).flat_map(|n| received.iter().map(move |r| r[n])).collect();
            let bits = qam_demap(&flat_rx, &qam);
            Ok((block.bits().len() as u64, count_errors(block.bits(), &bits)))
        }
        SimSystem::Fbmc { order, grid } => {
            let pam = PamConstellation::new(*order)?;
            let m = grid.subcarriers();
            let nb = pam.bits_per_symbol();
            let blocks: Vec<BitBlock> = (0..m).map(|_| BitBlock::random(rng, columns, nb)).collect();
            let symbols: Vec<Vec<f64>> = blocks.iter().map(|b| pam_map(b.bits(), &pam)).collect::<Result<_>>()?;
            let signal = fbmc_synthesize(&symbols, grid)?;
            let n0 = pam.noise_density(gamma_b) * grid.filter().energy();
            let stats: Vec<Vec<f64>> = if rayleigh {
                let clean = fbmc_project_all(&signal, grid, columns)?;
                let gains = draw_gains(rng, m, columns, config.channel.coherence);
                fade_and_equalize(&clean, &gains, n0, rng)
                    .into_iter()
                    .map(|row| row.into_iter().map(|c| c.re).collect())
                    .collect()
            } else {
                fbmc_analyze_all(&apply_channel(&signal, None, n0, rng), grid, columns)?
            };
            let guard = burn_in(grid);
            let (mut bits, mut errors) = (0u64, 0u64);
            for (block, row) in blocks.iter().zip(&stats) {
                let kept = &row[guard..columns - guard];
                let decided = pam_demap(kept, &pam);
                let sent = &block.bits()[guard * nb..(columns - guard) * nb];
                bits += sent.len() as u64;
                errors += count_errors(sent, &decided);
            }
            Ok((bits, errors))
        }
    }
}

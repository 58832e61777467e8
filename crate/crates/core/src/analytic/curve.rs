use std::fmt;
use std::io::Write;
use std::str::FromStr;

use super::constellation::PamConstellation;
use super::enumeration::{EnumerationConfig, OffsetStream};
use super::fbmc::stream_bep;
use super::pam::{ofdm_bep, pam_bep};
use super::{Fading, Form};
use crate::error::{Error, Result};
use crate::interference::InterferenceTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    Pam,
    Ofdm,
    Fbmc,
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemKind::Pam => "pam",
            SystemKind::Ofdm => "ofdm",
            SystemKind::Fbmc => "fbmc",
        })
    }
}

impl FromStr for SystemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pam" => Ok(SystemKind::Pam),
            "ofdm" => Ok(SystemKind::Ofdm),
            "fbmc" => Ok(SystemKind::Fbmc),
            _ => Err(Error::Parse(format!("unknown system '{s}'"))),
        }
    }
}

/// Which closed form a curve was evaluated with, e.g. `fbmc-awgn-exact`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BepModel {
    pub system: SystemKind,
    pub fading: Fading,
    pub form: Form,
}

impl fmt::Display for BepModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}-{}", self.system, self.fading, self.form)
    }
}

impl FromStr for BepModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('-').collect();
        match parts.as_slice() {
            [system, fading, form] => Ok(Self { system: system.parse()?, fading: fading.parse()?, form: form.parse()? }),
            _ => Err(Error::Parse(format!("model '{s}' is not system-channel-form"))),
        }
    }
}

/// A system to evaluate. FBMC tables are used as given (already truncated).
#[derive(Debug, Clone)]
pub enum System {
    Pam { order: usize },
    Ofdm { qam_order: usize, subcarriers: usize, cp: usize },
    Fbmc { order: usize, table: InterferenceTable },
}

impl System {
    pub fn kind(&self) -> SystemKind {
        match self {
            System::Pam { .. } => SystemKind::Pam,
            System::Ofdm { .. } => SystemKind::Ofdm,
            System::Fbmc { .. } => SystemKind::Fbmc,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BepCurve {
    pub model: BepModel,
    pub filter: String,
    pub kmax: Option<usize>,
    pub cp: Option<usize>,
    /// `(gamma_b in dB, probability)`.
    pub samples: Vec<(f64, f64)>,
}

impl BepCurve {
    pub fn probabilities(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }

    /// CSV with header `ebn0_db,bep,model,filter,kmax`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "ebn0_db,bep,model,filter,kmax")?;
        let kmax = self.kmax.map(|k| k.to_string()).unwrap_or_default();
        for &(db, p) in &self.samples {
            writeln!(out, "{db},{p:.15e},{},{},{kmax}", self.model, self.filter)?;
        }
        Ok(())
    }
}

/// Evaluates `system` over a grid of `gamma_b` values given in dB.
pub fn bep_curve(
    system: &System,
    fading: Fading,
    form: Form,
    grid_db: &[f64],
    config: EnumerationConfig,
) -> Result<BepCurve> {
    let model = BepModel { system: system.kind(), fading, form };
    let gammas = grid_db.iter().map(|&db| crate::db_to_linear(db));
    let (filter, kmax, cp, probs) = match system {
        System::Pam { order } => {
            let probs = gammas.map(|g| pam_bep(*order, fading, form, g)).collect::<Result<Vec<_>>>()?;
            ("none".to_string(), None, None, probs)
        }
        System::Ofdm { qam_order, subcarriers, cp } => {
            let probs = gammas
                .map(|g| ofdm_bep(*qam_order, *subcarriers, *cp, fading, form, g))
                .collect::<Result<Vec<_>>>()?;
            ("none".to_string(), None, Some(*cp), probs)
        }
        System::Fbmc { order, table } => {
            let pam = PamConstellation::new(*order)?;
            let stream = OffsetStream::from_table(table, &pam, config.budget)?;
            log::info!("{model}: {} offsets per point", stream.len());
            let probs = gammas
                .map(|g| stream_bep(&stream, &pam, fading, form, g, config.parallel))
                .collect::<Result<Vec<_>>>()?;
            (table.grid().filter().family().to_string(), Some(table.len()), None, probs)
        }
    };
    let samples = grid_db.iter().copied().zip(probs).collect();
    Ok(BepCurve { model, filter, kmax, cp, samples })
}

//! Closed-form bit error probabilities.
//!
//! Every FBMC formula is an average, over all interference offsets
//! `sum a_{m,n} eps_{m,n}`, of the matching single-carrier PAM expression with
//! the decision distance shifted by the offset. [`pam`] holds the per-offset
//! kernels, [`enumeration`] walks the offsets, and [`fbmc`] ties them
//! together.

pub mod constellation;
pub mod curve;
pub mod enumeration;
pub mod fbmc;
pub mod pam;
pub mod q;

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

pub use constellation::{cho_weight, combined_weights, PamConstellation, QamConstellation, SnrPoint};
pub use curve::{bep_curve, BepCurve, BepModel, System, SystemKind};
pub use enumeration::{EnumerationConfig, OffsetStream, DEFAULT_BUDGET};
pub use fbmc::{fbmc_awgn_approx, fbmc_awgn_exact, fbmc_bep, fbmc_rayleigh_approx, fbmc_rayleigh_exact, DEFAULT_KMAX};
pub use pam::{
    ofdm_awgn, ofdm_bep, ofdm_rayleigh, pam_awgn_approx, pam_awgn_exact, pam_bep, pam_rayleigh_approx,
    pam_rayleigh_exact,
};
pub use q::q_function;

/// Channel assumed by a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fading {
    Awgn,
    /// Frequency-flat Rayleigh with perfect one-tap equalization.
    Rayleigh,
}

/// Nearest-neighbour approximation or exact Gray-coded expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Form {
    Approx,
    Exact,
}

impl fmt::Display for Fading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fading::Awgn => "awgn",
            Fading::Rayleigh => "rayleigh",
        })
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Approx => "approx",
            Form::Exact => "exact",
        })
    }
}

impl FromStr for Fading {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "awgn" => Ok(Fading::Awgn),
            "rayleigh" => Ok(Fading::Rayleigh),
            _ => Err(Error::Parse(format!("unknown channel '{s}'"))),
        }
    }
}

impl FromStr for Form {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "approx" => Ok(Form::Approx),
            "exact" => Ok(Form::Exact),
            _ => Err(Error::Parse(format!("unknown form '{s}'"))),
        }
    }
}

/// Clamps a probability into `[0, 1]`, warning when that changes it.
pub(crate) fn clamp_probability(p: f64, what: &str) -> f64 {
    if (0.0..=1.0).contains(&p) {
        return p;
    }
    log::warn!("{what}: probability {p:e} clamped to [0, 1]");
    if p.is_nan() {
        return 1.0;
    }
    p.clamp(0.0, 1.0)
}

//! Closed-form bit error probabilities for FBMC systems with arbitrary
//! prototype filters, single-carrier PAM and CP-OFDM baselines, and a Monte
//! Carlo baseband simulator to check them against.
//!
//! The pipeline is:
//!
//! ```text
//! filterbank  ->  interference  ->  analytic      (closed-form BEP)
//!      \                \
//!       `-> modem ------ `-> simulator            (measured BER)
//! ```

pub mod analytic;
pub mod cli;
pub mod error;
pub mod filterbank;
pub mod interference;
pub mod modem;
pub mod simulator;

pub use error::{Error, Result};
pub use filterbank::{make_egf, make_martin, make_rect, normalize_energy, FilterFamily, PrototypeFilter};
pub use interference::{build_set, set_size, sir, FbmcGrid, InterferenceEntry, InterferenceTable};

/// Converts a ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

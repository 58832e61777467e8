use super::constellation::PamConstellation;
use super::enumeration::{EnumerationConfig, OffsetStream};
use super::pam::Kernel;
use super::{clamp_probability, Fading, Form};
use crate::error::Result;
use crate::interference::InterferenceTable;

/// Number of interference elements kept by default.
pub const DEFAULT_KMAX: usize = 8;

/// FBMC BEP averaged over every offset produced by `table`.
///
/// `table` is used as given, so pass a truncated view: the full set is far
/// beyond any enumeration budget.
pub fn fbmc_bep(
    order: usize,
    table: &InterferenceTable,
    fading: Fading,
    form: Form,
    gamma_b: f64,
    config: EnumerationConfig,
) -> Result<f64> {
    let pam = PamConstellation::new(order)?;
    let stream = OffsetStream::from_table(table, &pam, config.budget)?;
    stream_bep(&stream, &pam, fading, form, gamma_b, config.parallel)
}

pub(crate) fn stream_bep(
    stream: &OffsetStream,
    pam: &PamConstellation,
    fading: Fading,
    form: Form,
    gamma_b: f64,
    parallel: bool,
) -> Result<f64> {
    let kernel = Kernel::new(pam, fading, form, gamma_b)?;
    let p = stream.mean_map(|o| kernel.eval(o), parallel);
    Ok(clamp_probability(p, "fbmc"))
}

pub fn fbmc_awgn_approx(order: usize, table: &InterferenceTable, gamma_b: f64) -> Result<f64> {
    fbmc_bep(order, table, Fading::Awgn, Form::Approx, gamma_b, EnumerationConfig::default())
}

pub fn fbmc_awgn_exact(order: usize, table: &InterferenceTable, gamma_b: f64) -> Result<f64> {
    fbmc_bep(order, table, Fading::Awgn, Form::Exact, gamma_b, EnumerationConfig::default())
}

pub fn fbmc_rayleigh_approx(order: usize, table: &InterferenceTable, gamma_b: f64) -> Result<f64> {
    fbmc_bep(order, table, Fading::Rayleigh, Form::Approx, gamma_b, EnumerationConfig::default())
}

pub fn fbmc_rayleigh_exact(order: usize, table: &InterferenceTable, gamma_b: f64) -> Result<f64> {
    fbmc_bep(order, table, Fading::Rayleigh, Form::Exact, gamma_b, EnumerationConfig::default())
}

use super::constellation::{combined_weights, PamConstellation, QamConstellation};
use super::q::q_function;
use super::{clamp_probability, Fading, Form};
use crate::error::{Error, Result};

/// Beyond this argument `Q` is below the smallest subnormal.
const Q_CUTOFF: f64 = 38.7;

/// Average over `|h|^2 ~ Exp(1)` of `2 Q(x sqrt(2 a |h|^2))`, i.e.
/// `1 - x sqrt(a / (x^2 a + 1))`.
pub(crate) fn rayleigh_term(x: f64, a: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let y = x * x * a;
    // cancellation-free form of 1 - sqrt(y / (1 + y))
    let t = 1.0 / ((1.0 + y) * (1.0 + (y / (1.0 + y)).sqrt()));
    if x > 0.0 {
        t
    } else {
        2.0 - t
    }
}

/// BEP of Gray-coded PAM when the decision distance is shifted by `offset`.
///
/// With `offset = 0` this is the single-carrier expression; averaging it over
/// the interference offsets gives the FBMC expression.
#[derive(Debug, Clone)]
pub(crate) struct Kernel {
    fading: Fading,
    /// `(2i + 1, W_i)` pairs.
    terms: Vec<(f64, f64)>,
    prefactor: f64,
    /// `sqrt(2 c gamma)` for AWGN, `c gamma` for Rayleigh.
    scale: f64,
}

impl Kernel {
    pub(crate) fn new(pam: &PamConstellation, fading: Fading, form: Form, gamma_b: f64) -> Result<Self> {
        if gamma_b.is_nan() || gamma_b <= 0.0 {
            return Err(Error::InvalidParameter(format!("gamma_b must be positive, got {gamma_b}")));
        }
        let n = pam.order() as f64;
        let bits = pam.bits_per_symbol() as f64;
        let c = 3.0 * bits / (n * n - 1.0);
        let terms = match form {
            Form::Approx => vec![(1.0, n - 1.0)],
            Form::Exact => combined_weights(pam),
        };
        let (prefactor, scale) = match fading {
            Fading::Awgn => (2.0 / (n * bits), (2.0 * c * gamma_b).sqrt()),
            Fading::Rayleigh => (1.0 / (n * bits), c * gamma_b),
        };
        Ok(Self { fading, terms, prefactor, scale })
    }

    #[inline]
    pub(crate) fn eval(&self, offset: f64) -> f64 {
        let mut acc = 0.0;
        match self.fading {
            Fading::Awgn => {
                for &(x, w) in &self.terms {
                    let arg = self.scale * (x - offset);
                    if arg < Q_CUTOFF {
                        acc += w * q_function(arg);
                    }
                }
            }
            Fading::Rayleigh => {
                for &(x, w) in &self.terms {
                    acc += w * rayleigh_term(x - offset, self.scale);
                }
            }
        }
        self.prefactor * acc
    }
}

fn constellation(order: usize) -> Result<PamConstellation> {
    PamConstellation::new(order)
}

/// Single-carrier Gray `N_p`-PAM BEP for any channel / form combination.
pub fn pam_bep(order: usize, fading: Fading, form: Form, gamma_b: f64) -> Result<f64> {
    let kernel = Kernel::new(&constellation(order)?, fading, form, gamma_b)?;
    Ok(clamp_probability(kernel.eval(0.0), "pam"))
}

/// `2 (N_p - 1) / (N_p log2 N_p) Q(sqrt(6 log2 N_p gamma_b / (N_p^2 - 1)))`.
pub fn pam_awgn_approx(order: usize, gamma_b: f64) -> Result<f64> {
    pam_bep(order, Fading::Awgn, Form::Approx, gamma_b)
}

/// Exact Gray-coded PAM BEP over AWGN from the Cho-Yoon weights.
pub fn pam_awgn_exact(order: usize, gamma_b: f64) -> Result<f64> {
    pam_bep(order, Fading::Awgn, Form::Exact, gamma_b)
}

/// `(N_p - 1) / (N_p log2 N_p) (1 - sqrt(c gamma_b / (c gamma_b + 1)))`,
/// `c = 3 log2 N_p / (N_p^2 - 1)`.
pub fn pam_rayleigh_approx(order: usize, gamma_b: f64) -> Result<f64> {
    pam_bep(order, Fading::Rayleigh, Form::Approx, gamma_b)
}

/// Exact Gray-coded PAM BEP over flat Rayleigh fading. Each weighted term is
/// `1 - (2i+1) sqrt(c gamma_b / ((2i+1)^2 c gamma_b + 1))`.
pub fn pam_rayleigh_exact(order: usize, gamma_b: f64) -> Result<f64> {
    pam_bep(order, Fading::Rayleigh, Form::Exact, gamma_b)
}

/// CP-OFDM with square `N_q`-QAM: per-dimension `sqrt(N_q)`-PAM evaluated at
/// `gamma_b M / (M + N_cp)`.
pub fn ofdm_bep(
    qam_order: usize,
    subcarriers: usize,
    cp: usize,
    fading: Fading,
    form: Form,
    gamma_b: f64,
) -> Result<f64> {
    let qam = QamConstellation::new(qam_order)?;
    if subcarriers == 0 {
        return Err(Error::InvalidParameter("OFDM needs at least one subcarrier".into()));
    }
    let efficiency = subcarriers as f64 / (subcarriers + cp) as f64;
    let kernel = Kernel::new(qam.dimension(), fading, form, gamma_b * efficiency)?;
    Ok(clamp_probability(kernel.eval(0.0), "ofdm"))
}

pub fn ofdm_awgn(qam_order: usize, subcarriers: usize, cp: usize, gamma_b: f64) -> Result<f64> {
    ofdm_bep(qam_order, subcarriers, cp, Fading::Awgn, Form::Exact, gamma_b)
}

pub fn ofdm_rayleigh(qam_order: usize, subcarriers: usize, cp: usize, gamma_b: f64) -> Result<f64> {
    ofdm_bep(qam_order, subcarriers, cp, Fading::Rayleigh, Form::Exact, gamma_b)
}

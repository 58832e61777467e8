use crate::error::{Error, Result};

/// Gray-coded `N_p`-PAM on the alphabet `{-N_p+1, -N_p+3, ..., N_p-1}`.
///
/// Level index `l` carries the binary-reflected Gray word `l ^ (l >> 1)`,
/// emitted least significant bit first.
#[derive(Debug, Clone, PartialEq)]
pub struct PamConstellation {
    order: usize,
    bits: usize,
    levels: Vec<f64>,
}

impl PamConstellation {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::Constellation(format!("PAM order must be a power of two >= 2, got {order}")));
        }
        let levels = (0..order).map(|l| (2 * l) as f64 - (order - 1) as f64).collect();
        Ok(Self { order, bits: order.trailing_zeros() as usize, levels })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `N_b = log2 N_p`.
    pub fn bits_per_symbol(&self) -> usize {
        self.bits
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// `E_s = (N_p^2 - 1) / 3`.
    pub fn symbol_energy(&self) -> f64 {
        let n = self.order as f64;
        (n * n - 1.0) / 3.0
    }

    pub fn gray_word(&self, level: usize) -> usize {
        level ^ (level >> 1)
    }

    pub fn level_of_word(&self, word: usize) -> usize {
        let mut level = word;
        let mut shift = word >> 1;
        while shift != 0 {
            level ^= shift;
            shift >>= 1;
        }
        level
    }

    /// Nearest level index to a received value.
    pub fn slice(&self, value: f64) -> usize {
        let idx = ((value + (self.order - 1) as f64) / 2.0).round();
        idx.clamp(0.0, (self.order - 1) as f64) as usize
    }

    /// Noise density `N_0 = (N_p^2 - 1) / (3 log2(N_p) gamma_b)` for linear `gamma_b`.
    pub fn noise_density(&self, gamma_b: f64) -> f64 {
        self.symbol_energy() / (self.bits as f64 * gamma_b)
    }
}

/// Square `N_q`-QAM as two independent `sqrt(N_q)`-PAM dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct QamConstellation {
    order: usize,
    dimension: PamConstellation,
}

impl QamConstellation {
    pub fn new(order: usize) -> Result<Self> {
        let side = (order as f64).sqrt().round() as usize;
        if order < 4 || side * side != order || !side.is_power_of_two() {
            return Err(Error::Constellation(format!("QAM order must be a power of four >= 4, got {order}")));
        }
        Ok(Self { order, dimension: PamConstellation::new(side)? })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The in-phase (and quadrature) PAM.
    pub fn dimension(&self) -> &PamConstellation {
        &self.dimension
    }

    pub fn bits_per_symbol(&self) -> usize {
        2 * self.dimension.bits_per_symbol()
    }

    pub fn symbol_energy(&self) -> f64 {
        2.0 * self.dimension.symbol_energy()
    }
}

/// Normalized SNR `gamma_b` (bit energy over noise density), stored linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrPoint {
    gamma_b: f64,
}

impl SnrPoint {
    pub fn linear(gamma_b: f64) -> Result<Self> {
        if !(gamma_b > 0.0 && gamma_b.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma_b must be positive, got {gamma_b}")));
        }
        Ok(Self { gamma_b })
    }

    pub fn from_db(db: f64) -> Result<Self> {
        Self::linear(crate::db_to_linear(db))
    }

    pub fn gamma_b(&self) -> f64 {
        self.gamma_b
    }

    pub fn db(&self) -> f64 {
        crate::linear_to_db(self.gamma_b)
    }

    pub fn noise_density(&self, pam: &PamConstellation) -> f64 {
        pam.noise_density(self.gamma_b)
    }
}

/// Largest `i` in the inner sum for bit `k`: `(1 - 2^-k) N_p - 1`.
fn max_index(k: usize, order: usize) -> usize {
    order - (order >> k) - 1
}

/// Gray-code weight `w_{i,k,N_p} = (-1)^floor(i 2^(k-1) / N_p) (2^(k-1) - floor(i 2^(k-1) / N_p + 1/2))`.
pub fn cho_weight(i: usize, k: usize, order: usize) -> Result<i64> {
    if order < 2 || !order.is_power_of_two() {
        return Err(Error::Constellation(format!("PAM order must be a power of two, got {order}")));
    }
    let bits = order.trailing_zeros() as usize;
    if k == 0 || k > bits {
        return Err(Error::Index(format!("k={k} outside 1..={bits}")));
    }
    if i > max_index(k, order) {
        return Err(Error::Index(format!("i={i} outside 0..={}", max_index(k, order))));
    }
    let half = 1usize << (k - 1);
    let scaled = i * half;
    let sign = if (scaled / order).is_multiple_of(2) { 1 } else { -1 };
    // floor(scaled / order + 1/2) = floor((2 scaled + order) / (2 order))
    let rounded = (2 * scaled + order) / (2 * order);
    Ok(sign * (half as i64 - rounded as i64))
}

/// `W_i = sum_k w_{i,k,N_p}`, keeping only the nonzero terms as `(2i + 1, W_i)`.
pub fn combined_weights(pam: &PamConstellation) -> Vec<(f64, f64)> {
    let order = pam.order();
    let mut totals = vec![0i64; order];
    for k in 1..=pam.bits_per_symbol() {
        for (i, t) in totals.iter_mut().enumerate().take(max_index(k, order) + 1) {
            *t += cho_weight(i, k, order).expect("indices in range");
        }
    }
    totals
        .iter()
        .enumerate()
        .filter(|(_, w)| **w != 0)
        .map(|(i, w)| ((2 * i + 1) as f64, *w as f64))
        .collect()
}

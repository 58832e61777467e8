//! Prototype filters.
//!
//! Every constructor returns a unit-energy filter so that the desired-symbol
//! gain of the FBMC projection is exactly one. Filters can be written to and
//! read from plain-text files with one tap per line.

mod egf;

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

pub use egf::{egf_expansion_coefficient, EGF_ALPHA_RANGE, EGF_SERIES_ORDER};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterFamily {
    Martin,
    Egf { alpha: f64 },
    Rect,
    /// Taps supplied by the user.
    Custom,
}

impl std::fmt::Display for FilterFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FilterFamily::Martin => write!(f, "martin"),
            FilterFamily::Egf { alpha } => write!(f, "egf{alpha}"),
            FilterFamily::Rect => write!(f, "rect"),
            FilterFamily::Custom => write!(f, "custom"),
        }
    }
}

/// A real prototype filter `p[k]` with overlap factor `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeFilter {
    coeffs: Vec<f64>,
    overlap: usize,
    family: FilterFamily,
}

impl PrototypeFilter {
    /// Wraps raw taps without normalizing them.
    pub fn from_taps(coeffs: Vec<f64>, overlap: usize, family: FilterFamily) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("filter has no taps".into()));
        }
        if overlap == 0 {
            return Err(Error::InvalidParameter("overlap factor must be positive".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("filter taps must be finite".into()));
        }
        Ok(Self { coeffs, overlap, family })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    pub fn family(&self) -> FilterFamily {
        self.family
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// Largest deviation from even symmetry about `(L_p - 1) / 2`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.coeffs.len();
        (0..n / 2)
            .map(|k| (self.coeffs[k] - self.coeffs[n - 1 - k]).abs())
            .fold(0.0, f64::max)
    }

    /// Writes one tap per line with 17 significant digits.
    pub fn write_taps<W: Write>(&self, mut out: W) -> Result<()> {
        for c in &self.coeffs {
            writeln!(out, "{c:.16e}")?;
        }
        Ok(())
    }

    /// Reads one tap per line. Blank lines and lines starting with `#` are
    /// skipped. The taps are normalized to unit energy.
    pub fn read_taps<R: BufRead>(input: R, overlap: usize) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: f64 = line
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: not a number: {line:?}", lineno + 1)))?;
            coeffs.push(v);
        }
        normalize_energy(&Self::from_taps(coeffs, overlap, FilterFamily::Custom)?)
    }
}

/// Scales the filter to unit energy.
pub fn normalize_energy(filter: &PrototypeFilter) -> Result<PrototypeFilter> {
    let energy = filter.energy();
    if energy == 0.0 {
        return Err(Error::DegenerateFilter);
    }
    let scale = energy.sqrt().recip();
    let mut out = filter.clone();
    for c in &mut out.coeffs {
        *c *= scale;
    }
    Ok(out)
}

// Frequency-sampling gains H_1..H_{K-1} (H_0 = 1). For K = 4, H_2 = 1/sqrt(2) and
// H_3 = sqrt(1 - H_1^2); for K = 3, H_2 = sqrt(1 - H_1^2).
const MARTIN_H1_K3: f64 = 0.911_437_83;
const MARTIN_H1_K4: f64 = 0.971_959_83;

/// Frequency-sampling gains `[H_0, ..., H_{K-1}]` of the Mirabbasi-Martin design.
pub fn martin_gains(overlap: usize) -> Result<Vec<f64>> {
    match overlap {
        3 => Ok(vec![1.0, MARTIN_H1_K3, (1.0 - MARTIN_H1_K3 * MARTIN_H1_K3).sqrt()]),
        4 => Ok(vec![
            1.0,
            MARTIN_H1_K4,
            std::f64::consts::FRAC_1_SQRT_2,
            (1.0 - MARTIN_H1_K4 * MARTIN_H1_K4).sqrt(),
        ]),
        k => Err(Error::UnsupportedFilterOrder(k)),
    }
}

/// Mirabbasi-Martin filter of length `KM + 1`.
///
/// `p[k] = 1 + 2 sum_i (-1)^i H_i cos(2 pi i k / (KM))` for `k = 0..=KM`, which
/// is the usual `KM`-tap design plus the tap that makes it even-symmetric.
pub fn make_martin(overlap: usize, subcarriers: usize) -> Result<PrototypeFilter> {
    let gains = martin_gains(overlap)?;
    check_subcarriers(subcarriers)?;
    let n = overlap * subcarriers;
    let coeffs = (0..=n)
        .map(|k| {
            let mut v = gains[0];
            for (i, h) in gains.iter().enumerate().skip(1) {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                v += 2.0 * sign * h * (2.0 * PI * (i * k) as f64 / n as f64).cos();
            }
            v
        })
        .collect();
    normalize_energy(&PrototypeFilter::from_taps(coeffs, overlap, FilterFamily::Martin)?)
}

/// Extended Gaussian function with spreading factor `alpha`, truncated to
/// `KM + 1` taps.
pub fn make_egf(alpha: f64, overlap: usize, subcarriers: usize) -> Result<PrototypeFilter> {
    let (lo, hi) = EGF_ALPHA_RANGE;
    if !(alpha.is_finite() && (lo..=hi).contains(&alpha)) {
        return Err(Error::UnsupportedSpreading { alpha, min: lo, max: hi });
    }
    if overlap < 3 {
        return Err(Error::InvalidParameter(format!("EGF needs K >= 3, got {overlap}")));
    }
    check_subcarriers(subcarriers)?;
    let len = overlap * subcarriers + 1;
    let coeffs = egf::sample(alpha, len, subcarriers);
    normalize_energy(&PrototypeFilter::from_taps(coeffs, overlap, FilterFamily::Egf { alpha })?)
}

/// Rectangular pulse of length `M` (overlap factor 1).
pub fn make_rect(subcarriers: usize) -> Result<PrototypeFilter> {
    check_subcarriers(subcarriers)?;
    let coeffs = vec![1.0; subcarriers];
    normalize_energy(&PrototypeFilter::from_taps(coeffs, 1, FilterFamily::Rect)?)
}

fn check_subcarriers(m: usize) -> Result<()> {
    if m < 2 || !m.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("M must be even and >= 2, got {m}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normalize_all_ones() {
        let f = PrototypeFilter::from_taps(vec![1.0; 4], 1, FilterFamily::Custom).unwrap();
        let n = normalize_energy(&f).unwrap();
        for c in n.coeffs() {
            assert_abs_diff_eq!(*c, 0.5, epsilon = 1e-15);
        }
    }

    #[test]
    fn normalize_is_idempotent() {
        let f = make_martin(4, 16).unwrap();
        let g = normalize_energy(&f).unwrap();
        for (a, b) in f.coeffs().iter().zip(g.coeffs()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn normalize_rejects_zero() {
        let f = PrototypeFilter::from_taps(vec![0.0; 8], 1, FilterFamily::Custom).unwrap();
        assert!(matches!(normalize_energy(&f), Err(Error::DegenerateFilter)));
    }

    #[test]
    fn martin_gain_constraints() {
        let h = martin_gains(4).unwrap();
        assert_abs_diff_eq!(h[1] * h[1] + h[3] * h[3], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h[2] * h[2], 0.5, epsilon = 1e-15);
        // published PHYDYAS values
        assert_abs_diff_eq!(h[1], 0.971960, epsilon = 1e-6);
        assert_abs_diff_eq!(h[3], 0.235147, epsilon = 1e-6);
        let h3 = martin_gains(3).unwrap();
        assert_abs_diff_eq!(h3[2], 0.411438, epsilon = 1e-6);
    }

    #[test]
    fn martin_shape() {
        let f = make_martin(4, 16).unwrap();
        assert_eq!(f.len(), 65);
        assert_abs_diff_eq!(f.energy(), 1.0, epsilon = 1e-12);
        assert!(f.asymmetry() < 1e-12);
        // reference taps from an independent numpy construction
        assert_abs_diff_eq!(f.coeffs()[0], -5.689_063_803_382_410_4e-11, epsilon = 1e-15);
        assert_abs_diff_eq!(f.coeffs()[1], 1.523_427_569_726_371e-4, epsilon = 1e-13);
        assert_abs_diff_eq!(f.coeffs()[32], 3.017_766_953_535_274_7e-1, epsilon = 1e-13);
    }

    #[test]
    fn martin_rejects_k() {
        assert!(matches!(make_martin(5, 16), Err(Error::UnsupportedFilterOrder(5))));
        assert!(matches!(make_martin(2, 16), Err(Error::UnsupportedFilterOrder(2))));
        assert!(make_martin(4, 15).is_err());
    }

    #[test]
    fn egf_shape() {
        for alpha in [0.25, 0.5, 1.0, 2.0] {
            let f = make_egf(alpha, 4, 16).unwrap();
            assert_eq!(f.len(), 65);
            assert_abs_diff_eq!(f.energy(), 1.0, epsilon = 1e-12);
            assert!(f.asymmetry() < 1e-12);
        }
        let f = make_egf(1.0, 4, 16).unwrap();
        assert_abs_diff_eq!(f.coeffs()[0], 2.244_923_333_292_803e-4, epsilon = 1e-13);
        assert_abs_diff_eq!(f.coeffs()[32], 3.396_475_359_519_775_5e-1, epsilon = 1e-13);
        let f = make_egf(0.25, 4, 16).unwrap();
        assert_abs_diff_eq!(f.coeffs()[0], 1.008_504_753_032_914e-2, epsilon = 1e-13);
    }

    #[test]
    fn egf_rejects_alpha() {
        assert!(matches!(make_egf(0.1, 4, 16), Err(Error::UnsupportedSpreading { .. })));
        assert!(matches!(make_egf(f64::NAN, 4, 16), Err(Error::UnsupportedSpreading { .. })));
        assert!(make_egf(1.0, 2, 16).is_err());
    }

    #[test]
    fn taps_text_round_trip() {
        let f = make_egf(0.5, 4, 16).unwrap();
        let mut buf = Vec::new();
        f.write_taps(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 65);
        let g = PrototypeFilter::read_taps(&buf[..], 4).unwrap();
        for (a, b) in f.coeffs().iter().zip(g.coeffs()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
        assert!(PrototypeFilter::read_taps("# header\n0.5\nabc\n".as_bytes(), 1).is_err());
    }

    #[test]
    fn rect_is_flat() {
        let f = make_rect(16).unwrap();
        assert_eq!(f.len(), 16);
        assert!(f.coeffs().iter().all(|c| (c - 0.25).abs() < 1e-15));
    }
}

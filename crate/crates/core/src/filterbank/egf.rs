//! Extended Gaussian functions.
//!
//! With `nu0 = tau0 = 1/sqrt(2)` (so `nu0 * tau0 = 1/2` and the symbol period is
//! `T = 2 tau0`), the EGF is
//!
//! ```text
//! z(t) = 1/2 sum_k d_k(alpha, nu0) [g(t + k/nu0) + g(t - k/nu0)]
//!            * sum_l d_l(1/alpha, tau0) cos(2 pi l t / tau0)
//! g(t) = (2 alpha)^(1/4) exp(-pi alpha t^2)
//! ```
//!
//! The expansion coefficients are power series
//! `d_k(a, v) = sum_j b[k][j] x^(2j + k)` with `x = exp(-pi a / (2 v^2))`. The `b`
//! table is the Taylor expansion of `theta(x, phi)^(-1/2)` where
//! `theta = 1 + 2 sum_n x^(n^2) cos(n phi)`, truncated at total order 14.
//! All entries are dyadic rationals, so the f64 table is exact.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::sync::OnceLock;

/// Highest power of `x` kept in the expansion coefficients.
pub const EGF_SERIES_ORDER: usize = 14;

/// Spreading factors for which the order-14 series stays accurate.
pub const EGF_ALPHA_RANGE: (f64, f64) = (0.25, 4.0);

const N: usize = EGF_SERIES_ORDER;
const H: usize = N; // harmonic offset
const W: usize = 2 * N + 1;

type Series = Vec<[f64; W]>; // [order][harmonic + H]

fn series_mul(a: &Series, b: &Series) -> Series {
    let mut out = vec![[0.0; W]; N + 1];
    for (oa, ra) in a.iter().enumerate() {
        for (ob, rb) in b.iter().enumerate().take(N + 1 - oa) {
            for (ha, &va) in ra.iter().enumerate() {
                if va == 0.0 {
                    continue;
                }
                for (hb, &vb) in rb.iter().enumerate() {
                    if vb == 0.0 {
                        continue;
                    }
                    // ha + hb - H is the combined harmonic index (offset H)
                    let h = ha + hb;
                    if h < H || h - H >= W {
                        continue;
                    }
                    out[oa + ob][h - H] += va * vb;
                }
            }
        }
    }
    out
}

/// `b[k][j]`, the coefficient of `x^(2j+k)` in `d_k`.
fn table() -> &'static [[f64; N / 2 + 1]; N + 1] {
    static TABLE: OnceLock<[[f64; N / 2 + 1]; N + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        // theta - 1 = sum_n x^(n^2) (e^{i n phi} + e^{-i n phi})
        let mut t: Series = vec![[0.0; W]; N + 1];
        let mut n = 1;
        while n * n <= N {
            t[n * n][H + n] = 1.0;
            t[n * n][H - n] = 1.0;
            n += 1;
        }
        let mut acc: Series = vec![[0.0; W]; N + 1];
        acc[0][H] = 1.0;
        let mut power = acc.clone();
        let mut binom = 1.0;
        for m in 1..=N {
            power = series_mul(&power, &t);
            binom *= (-0.5 - (m as f64 - 1.0)) / m as f64;
            for (ra, rp) in acc.iter_mut().zip(&power) {
                for (a, p) in ra.iter_mut().zip(rp) {
                    *a += binom * p;
                }
            }
        }
        let mut out = [[0.0; N / 2 + 1]; N + 1];
        for (k, row) in out.iter_mut().enumerate() {
            for (j, b) in row.iter_mut().enumerate() {
                let order = 2 * j + k;
                if order <= N {
                    let scale = if k == 0 { 1.0 } else { 2.0 };
                    *b = scale * acc[order][H + k];
                }
            }
        }
        out
    })
}

/// Table entry `b[k][j]`; zero outside the truncated triangle.
pub fn egf_expansion_coefficient(k: usize, j: usize) -> f64 {
    if k > N || j > N / 2 {
        return 0.0;
    }
    table()[k][j]
}

fn coefficients(a: f64, v: f64) -> [f64; N + 1] {
    let x = (-PI * a / (2.0 * v * v)).exp();
    let tab = table();
    let mut d = [0.0; N + 1];
    for (k, dk) in d.iter_mut().enumerate() {
        *dk = tab[k]
            .iter()
            .enumerate()
            .map(|(j, b)| b * x.powi((2 * j + k) as i32))
            .sum();
    }
    d
}

fn gaussian(alpha: f64, t: f64) -> f64 {
    (2.0 * alpha).powf(0.25) * (-PI * alpha * t * t).exp()
}

/// Samples the EGF at `len` points spaced `T/M` apart, centred on zero.
pub(super) fn sample(alpha: f64, len: usize, subcarriers: usize) -> Vec<f64> {
    let nu0 = FRAC_1_SQRT_2;
    let tau0 = FRAC_1_SQRT_2;
    let period = SQRT_2; // T = 2 tau0
    let freq = coefficients(alpha, nu0);
    let time = coefficients(1.0 / alpha, tau0);
    let centre = (len as f64 - 1.0) / 2.0;
    (0..len)
        .map(|i| {
            let t = (i as f64 - centre) * period / subcarriers as f64;
            let shifted: f64 = freq
                .iter()
                .enumerate()
                .map(|(k, d)| {
                    let s = k as f64 / nu0;
                    0.5 * d * (gaussian(alpha, t + s) + gaussian(alpha, t - s))
                })
                .sum();
            let window: f64 = time
                .iter()
                .enumerate()
                .map(|(l, d)| d * (2.0 * PI * l as f64 * t / tau0).cos())
                .sum();
            shifted * window
        })
        .collect()
}

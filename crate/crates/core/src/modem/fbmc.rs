use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interference::{quarter_turns, FbmcGrid};

/// `p[j] exp(j 2 pi m (j - (L_p-1)/2) / M)` for every subcarrier `m`.
///
/// The pulse of `(m, n)` is this row times `(-1)^(mn) j^(m+n)`, placed at
/// sample `n M/2`.
fn modulated_rows(grid: &FbmcGrid) -> Vec<Vec<Complex64>> {
    let p = grid.filter().coeffs();
    let centre = (p.len() as f64 - 1.0) / 2.0;
    let mm = grid.subcarriers() as f64;
    (0..grid.subcarriers())
        .map(|m| {
            p.iter()
                .enumerate()
                .map(|(j, &c)| Complex64::from_polar(c, 2.0 * PI * m as f64 * (j as f64 - centre) / mm))
                .collect()
        })
        .collect()
}

fn coefficient(m: usize, n: usize) -> Complex64 {
    quarter_turns((m + n + 2 * m * n) as i64)
}

/// Length of a frame carrying `columns` symbol columns.
pub fn frame_len(grid: &FbmcGrid, columns: usize) -> usize {
    (columns.max(1) - 1) * grid.hop() + grid.filter().len()
}

/// `s[k] = sum_{m,n} a_{m,n} p_{m,n}[k]`; `symbols[m][n]`, `M` rows.
pub fn fbmc_synthesize(symbols: &[Vec<f64>], grid: &FbmcGrid) -> Result<Vec<Complex64>> {
    let columns = check_shape(symbols, grid)?;
    let rows = modulated_rows(grid);
    let hop = grid.hop();
    let mut signal = vec![Complex64::new(0.0, 0.0); frame_len(grid, columns)];
    for (m, (row, taps)) in symbols.iter().zip(&rows).enumerate() {
        for (n, &a) in row.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let c = coefficient(m, n) * a;
            let out = &mut signal[n * hop..n * hop + taps.len()];
            for (s, t) in out.iter_mut().zip(taps) {
                *s += c * t;
            }
        }
    }
    Ok(signal)
}

fn check_shape(symbols: &[Vec<f64>], grid: &FbmcGrid) -> Result<usize> {
    if symbols.len() != grid.subcarriers() {
        return Err(Error::Shape(format!("expected {} rows, got {}", grid.subcarriers(), symbols.len())));
    }
    let columns = symbols[0].len();
    if columns == 0 || symbols.iter().any(|r| r.len() != columns) {
        return Err(Error::Shape("symbol rows must share a nonzero length".into()));
    }
    Ok(columns)
}

fn check_support(signal: &[Complex64], grid: &FbmcGrid, m0: usize, n0: i64) -> Result<usize> {
    if m0 >= grid.subcarriers() {
        return Err(Error::Range(format!("subcarrier {m0} outside 0..{}", grid.subcarriers())));
    }
    let start = n0 * grid.hop() as i64;
    if n0 < 0 || start as usize + grid.filter().len() > signal.len() {
        return Err(Error::Range(format!("pulse ({m0}, {n0}) not covered by {} samples", signal.len())));
    }
    Ok(start as usize)
}

/// `<x | p_{m0,n0}>`.
pub fn fbmc_project(signal: &[Complex64], grid: &FbmcGrid, m0: usize, n0: i64) -> Result<Complex64> {
    let start = check_support(signal, grid, m0, n0)?;
    let pulse = grid.pulse(m0 as i64, n0);
    let x = &signal[start..start + pulse.taps.len()];
    Ok(x.iter().zip(&pulse.taps).map(|(a, b)| a * b.conj()).sum())
}

/// `Re <x | p_{m0,n0}>`.
pub fn fbmc_analyze(signal: &[Complex64], grid: &FbmcGrid, m0: usize, n0: i64) -> Result<f64> {
    fbmc_project(signal, grid, m0, n0).map(|c| c.re)
}

/// Projections onto every pulse of a `columns`-column frame, `[m][n]`.
pub fn fbmc_project_all(signal: &[Complex64], grid: &FbmcGrid, columns: usize) -> Result<Vec<Vec<Complex64>>> {
    if columns == 0 || frame_len(grid, columns) > signal.len() {
        return Err(Error::Range(format!("{} samples cannot hold {columns} columns", signal.len())));
    }
    let rows = modulated_rows(grid);
    let hop = grid.hop();
    Ok(rows
        .iter()
        .enumerate()
        .map(|(m, taps)| {
            (0..columns)
                .map(|n| {
                    let x = &signal[n * hop..n * hop + taps.len()];
                    let acc: Complex64 = x.iter().zip(taps).map(|(a, b)| a * b.conj()).sum();
                    acc * coefficient(m, n).conj()
                })
                .collect()
        })
        .collect())
}

/// Real parts of [`fbmc_project_all`].
pub fn fbmc_analyze_all(signal: &[Complex64], grid: &FbmcGrid, columns: usize) -> Result<Vec<Vec<f64>>> {
    Ok(fbmc_project_all(signal, grid, columns)?
        .into_iter()
        .map(|row| row.into_iter().map(|c| c.re).collect())
        .collect())
}

/// PAM symbols `a_{m,n}` with their synthesized baseband signal.
#[derive(Debug, Clone, PartialEq)]
pub struct FbmcFrame {
    symbols: Vec<Vec<f64>>,
    signal: Vec<Complex64>,
    grid: FbmcGrid,
}

impl FbmcFrame {
    pub fn new(symbols: Vec<Vec<f64>>, grid: &FbmcGrid) -> Result<Self> {
        let signal = fbmc_synthesize(&symbols, grid)?;
        Ok(Self { symbols, signal, grid: grid.clone() })
    }

    pub fn symbols(&self) -> &[Vec<f64>] {
        &self.symbols
    }

    pub fn signal(&self) -> &[Complex64] {
        &self.signal
    }

    pub fn grid(&self) -> &FbmcGrid {
        &self.grid
    }

    pub fn columns(&self) -> usize {
        self.symbols[0].len()
    }
}

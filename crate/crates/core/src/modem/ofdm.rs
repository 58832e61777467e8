use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// QAM symbols `[m][n]` for `M` subcarriers, with the CP-OFDM time signal.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmFrame {
    symbols: Vec<Vec<Complex64>>,
    cp: usize,
    signal: Vec<Complex64>,
}

impl OfdmFrame {
    pub fn new(symbols: Vec<Vec<Complex64>>, cp: usize) -> Result<Self> {
        let signal = ofdm_modulate(&symbols, cp)?;
        Ok(Self { symbols, cp, signal })
    }

    pub fn symbols(&self) -> &[Vec<Complex64>] {
        &self.symbols
    }

    pub fn cp(&self) -> usize {
        self.cp
    }

    pub fn signal(&self) -> &[Complex64] {
        &self.signal
    }
}

/// Unitary inverse DFT per column, each prefixed by its last `cp` samples.
pub fn ofdm_modulate(symbols: &[Vec<Complex64>], cp: usize) -> Result<Vec<Complex64>> {
    let m = symbols.len();
    if m == 0 || symbols[0].is_empty() || symbols.iter().any(|r| r.len() != symbols[0].len()) {
        return Err(Error::Shape("QAM matrix must be a nonempty rectangle".into()));
    }
    if cp > m {
        return Err(Error::Shape(format!("cyclic prefix {cp} longer than the symbol ({m})")));
    }
    let columns = symbols[0].len();
    let ifft = FftPlanner::new().plan_fft_inverse(m);
    let scale = 1.0 / (m as f64).sqrt();
    let mut out = Vec::with_capacity(columns * (m + cp));
    let mut body = vec![Complex64::new(0.0, 0.0); m];
    for n in 0..columns {
        for (b, row) in body.iter_mut().zip(symbols) {
            *b = row[n] * scale;
        }
        ifft.process(&mut body);
        out.extend_from_slice(&body[m - cp..]);
        out.extend_from_slice(&body);
    }
    Ok(out)
}

/// Strips each prefix and applies the unitary forward DFT, returning `[m][n]`.
pub fn ofdm_demodulate(signal: &[Complex64], m: usize, cp: usize) -> Result<Vec<Vec<Complex64>>> {
    let block = m + cp;
    if m == 0 || cp > m || signal.is_empty() || !signal.len().is_multiple_of(block) {
        return Err(Error::Shape(format!("{} samples are not whole {m}+{cp} symbols", signal.len())));
    }
    let fft = FftPlanner::new().plan_fft_forward(m);
    let scale = 1.0 / (m as f64).sqrt();
    let columns = signal.len() / block;
    let mut out = vec![Vec::with_capacity(columns); m];
    let mut body = vec![Complex64::new(0.0, 0.0); m];
    for chunk in signal.chunks(block) {
        body.copy_from_slice(&chunk[cp..]);
        fft.process(&mut body);
        for (row, b) in out.iter_mut().zip(&body) {
            row.push(b * scale);
        }
    }
    Ok(out)
}

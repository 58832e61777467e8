//! Baseband transmit and receive chains used by the simulator.

mod fbmc;
mod ofdm;

pub use fbmc::{frame_len as fbmc_frame_len, fbmc_analyze, fbmc_analyze_all, fbmc_project, fbmc_project_all, fbmc_synthesize, FbmcFrame};
pub use ofdm::{ofdm_demodulate, ofdm_modulate, OfdmFrame};

use num_complex::Complex64;
use rand::Rng;

use crate::analytic::{PamConstellation, QamConstellation};
use crate::error::{Error, Result};

/// Bits grouped into symbol-sized words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitBlock {
    bits: Vec<u8>,
    word: usize,
}

impl BitBlock {
    pub fn new(bits: Vec<u8>, word: usize) -> Result<Self> {
        if word == 0 || !bits.len().is_multiple_of(word) {
            return Err(Error::Shape(format!("{} bits do not split into {word}-bit words", bits.len())));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidParameter("bits must be 0 or 1".into()));
        }
        Ok(Self { bits, word })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, words: usize, word: usize) -> Self {
        let bits = (0..words * word).map(|_| rng.random::<bool>() as u8).collect();
        Self { bits, word }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn words(&self) -> usize {
        self.bits.len() / self.word
    }
}

fn pack(chunk: &[u8]) -> usize {
    chunk.iter().enumerate().fold(0, |acc, (j, &b)| acc | ((b as usize) << j))
}

fn unpack(word: usize, len: usize, out: &mut Vec<u8>) {
    out.extend((0..len).map(|j| ((word >> j) & 1) as u8));
}

fn check_len(bits: &[u8], word: usize) -> Result<()> {
    if !bits.len().is_multiple_of(word) {
        return Err(Error::Shape(format!("{} bits do not split into {word}-bit words", bits.len())));
    }
    Ok(())
}

/// Gray mapping, `log2 N_p` bits per symbol, least significant bit first.
pub fn pam_map(bits: &[u8], pam: &PamConstellation) -> Result<Vec<f64>> {
    let nb = pam.bits_per_symbol();
    check_len(bits, nb)?;
    Ok(bits.chunks(nb).map(|c| pam.levels()[pam.level_of_word(pack(c))]).collect())
}

/// Minimum-distance slicing followed by Gray decoding.
pub fn pam_demap(values: &[f64], pam: &PamConstellation) -> Vec<u8> {
    let nb = pam.bits_per_symbol();
    let mut out = Vec::with_capacity(values.len() * nb);
    for &v in values {
        unpack(pam.gray_word(pam.slice(v)), nb, &mut out);
    }
    out
}

/// In-phase bits first, then quadrature bits, each Gray mapped.
pub fn qam_map(bits: &[u8], qam: &QamConstellation) -> Result<Vec<Complex64>> {
    let nb = qam.bits_per_symbol();
    check_len(bits, nb)?;
    let dim = qam.dimension();
    let half = nb / 2;
    Ok(bits
        .chunks(nb)
        .map(|c| {
            let re = dim.levels()[dim.level_of_word(pack(&c[..half]))];
            let im = dim.levels()[dim.level_of_word(pack(&c[half..]))];
            Complex64::new(re, im)
        })
        .collect())
}

pub fn qam_demap(values: &[Complex64], qam: &QamConstellation) -> Vec<u8> {
    let dim = qam.dimension();
    let half = dim.bits_per_symbol();
    let mut out = Vec::with_capacity(values.len() * 2 * half);
    for v in values {
        unpack(dim.gray_word(dim.slice(v.re)), half, &mut out);
        unpack(dim.gray_word(dim.slice(v.im)), half, &mut out);
    }
    out
}

//! FBMC pulses and the intrinsic interference table.
//!
//! The pulse of symbol `(m, n)` is
//! `p_{m,n}[k] = p[k - nM/2] exp(j(2 pi m k_c / M + phi_{m,n}))` with
//! `k_c = k - (L_p - 1)/2` and `phi_{m,n} = pi/2 (m + n)`. The interference
//! element `eps_{m,n}` is the real part of the projection of `p_{m,n}` onto
//! `p_{0,0}`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filterbank::PrototypeFilter;

/// Magnitude below which an interference element is treated as zero.
pub const NULL_THRESHOLD: f64 = 1e-15;

/// Subcarrier count plus prototype filter.
#[derive(Debug, Clone, PartialEq)]
pub struct FbmcGrid {
    subcarriers: usize,
    filter: PrototypeFilter,
}

impl FbmcGrid {
    pub fn new(subcarriers: usize, filter: PrototypeFilter) -> Result<Self> {
        if subcarriers < 2 || !subcarriers.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "M must be even and >= 2, got {subcarriers}"
            )));
        }
        let km = subcarriers * filter.overlap();
        let len = filter.len();
        if len + 1 < km || len > km + 1 {
            return Err(Error::InvalidParameter(format!(
                "filter length {len} not in {{KM-1, KM, KM+1}} for K={}, M={subcarriers}",
                filter.overlap()
            )));
        }
        Ok(Self { subcarriers, filter })
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn filter(&self) -> &PrototypeFilter {
        &self.filter
    }

    /// Samples between consecutive FBMC symbols, `M/2`.
    pub fn hop(&self) -> usize {
        self.subcarriers / 2
    }

    /// Largest `|n|` with possibly nonzero interference, `ceil((L_p-1)/(M/2)) - 1`.
    pub fn max_time_offset(&self) -> i64 {
        let hop = self.hop();
        ((self.filter.len() - 1).div_ceil(hop)) as i64 - 1
    }

    /// `k - (L_p - 1)/2` for a tap index within the prototype.
    fn centred(&self, k: i64) -> f64 {
        k as f64 - (self.filter.len() as f64 - 1.0) / 2.0
    }

    /// Pulse `p_{m,n}`; `m` may be any integer.
    pub fn pulse(&self, m: i64, n: i64) -> Pulse {
        let start = n * self.hop() as i64;
        let phase = quarter_turns(m + n);
        let mm = self.subcarriers as f64;
        let taps = self
            .filter
            .coeffs()
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                let kc = self.centred(start + j as i64);
                let carrier = Complex64::from_polar(1.0, 2.0 * PI * m as f64 * kc / mm);
                carrier * phase * p
            })
            .collect();
        Pulse { start, taps }
    }
}

/// `j^q`, exact for every integer `q`.
pub fn quarter_turns(q: i64) -> Complex64 {
    match q.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// A pulse with its support `start..start + taps.len()` on the sample axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    pub start: i64,
    pub taps: Vec<Complex64>,
}

impl Pulse {
    pub fn end(&self) -> i64 {
        self.start + self.taps.len() as i64
    }

    /// `<self | other> = sum_k self[k] conj(other[k])`.
    pub fn inner(&self, other: &Pulse) -> Complex64 {
        let lo = self.start.max(other.start);
        let hi = self.end().min(other.end());
        (lo..hi)
            .map(|k| self.taps[(k - self.start) as usize] * other.taps[(k - other.start) as usize].conj())
            .sum()
    }

    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// `eps_{m,n} = cos(phi_{m,n}) sum_k p[k - nM/2] p[k] cos(2 pi m k_c / M)`.
///
/// Defined for any integers; `(0, 0)` gives the pulse energy.
pub fn epsilon(grid: &FbmcGrid, m: i64, n: i64) -> f64 {
    let cos_phi = match (m + n).rem_euclid(4) {
        0 => 1.0,
        2 => -1.0,
        _ => return 0.0,
    };
    let p = grid.filter.coeffs();
    let len = p.len() as i64;
    let shift = n * grid.hop() as i64;
    let lo = shift.max(0);
    let hi = (len + shift).min(len);
    let mm = grid.subcarriers as f64;
    let sum: f64 = (lo..hi)
        .map(|k| {
            let arg = 2.0 * PI * m as f64 * grid.centred(k) / mm;
            p[(k - shift) as usize] * p[k as usize] * arg.cos()
        })
        .sum();
    cos_phi * sum
}

/// Real interference of symbol `(m, n)` onto the projection at `(m0, n0)`:
/// `Re <p_{m,n} | p_{m0,n0}> = (-1)^((m-m0) n0) eps_{m-m0, n-n0}`.
pub fn cross_interference(grid: &FbmcGrid, (m, n): (i64, i64), (m0, n0): (i64, i64)) -> f64 {
    let sign = if ((m - m0) * n0).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * epsilon(grid, m - m0, n - n0)
}

/// Sign `s` in `eps_{M-m,n} = s eps_{m,n}`: `(-1)^(M/2 - m + L_p - 1)`.
///
/// The cosine phase contributes `(-1)^(M/2 - m)`, and the carrier picks up
/// `(-1)^(L_p - 1)` because `k_c` is a half-integer for even lengths.
pub fn mirror_sign(grid: &FbmcGrid, m: i64) -> f64 {
    let e = grid.subcarriers as i64 / 2 - m + grid.filter.len() as i64 - 1;
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceEntry {
    pub m: usize,
    pub n: i64,
    pub value: f64,
    /// `|value| < NULL_THRESHOLD`.
    pub null: bool,
}

/// The nonzero-candidate interference elements of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceTable {
    entries: Vec<InterferenceEntry>,
    reference: f64,
    grid: FbmcGrid,
}

impl InterferenceTable {
    pub fn entries(&self) -> &[InterferenceEntry] {
        &self.entries
    }

    /// `eps_{0,0}`.
    pub fn reference(&self) -> f64 {
        self.reference
    }

    pub fn grid(&self) -> &FbmcGrid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, m: usize, n: i64) -> Option<f64> {
        self.entries.iter().find(|e| e.m == m && e.n == n).map(|e| e.value)
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn null_count(&self) -> usize {
        self.entries.iter().filter(|e| e.null).count()
    }

    /// Same table with every element negated.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            e.value = -e.value;
        }
        out
    }

    /// CSV with header `m,n,epsilon`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "m,n,epsilon")?;
        for e in &self.entries {
            writeln!(out, "{},{},{:.16e}", e.m, e.n, e.value)?;
        }
        Ok(())
    }
}

/// All `(m, n)` with `0 <= m < M`, `|n| <= max_time_offset`, `m + n` even,
/// excluding `(0, 0)`.
pub fn build_set(grid: &FbmcGrid) -> InterferenceTable {
    let nmax = grid.max_time_offset();
    let mut entries = Vec::with_capacity(set_size(grid.subcarriers, grid.filter.len()));
    for n in -nmax..=nmax {
        for m in 0..grid.subcarriers {
            if (m as i64 + n).rem_euclid(2) != 0 || (m == 0 && n == 0) {
                continue;
            }
            let value = epsilon(grid, m as i64, n);
            entries.push(InterferenceEntry { m, n, value, null: value.abs() < NULL_THRESHOLD });
        }
    }
    InterferenceTable { entries, reference: epsilon(grid, 0, 0), grid: grid.clone() }
}

/// `|E| = M (ceil((L_p - 1)/(M/2)) - 1/2) - 1`.
pub fn set_size(subcarriers: usize, filter_len: usize) -> usize {
    let hop = (subcarriers / 2).max(1);
    let spans = (filter_len.saturating_sub(1)).div_ceil(hop);
    // M (spans - 1/2) - 1 = (M (2 spans - 1)) / 2 - 1
    let twice = subcarriers * (2 * spans).saturating_sub(1);
    let size = (twice / 2).saturating_sub(1);
    if size == 0 {
        log::warn!("interference set is empty for M={subcarriers}, L_p={filter_len}");
    }
    size
}

/// Keeps the `kmax` largest-magnitude non-null elements. Ties are broken by
/// `|n|`, then `m`, then `n`.
pub fn truncate(table: &InterferenceTable, kmax: usize) -> Result<InterferenceTable> {
    if kmax > table.entries.len() {
        return Err(Error::Index(format!(
            "kmax={kmax} exceeds table size {}",
            table.entries.len()
        )));
    }
    let mut kept: Vec<InterferenceEntry> = table.entries.iter().filter(|e| !e.null).copied().collect();
    kept.sort_by(|a, b| {
        b.value
            .abs()
            .total_cmp(&a.value.abs())
            .then(a.n.abs().cmp(&b.n.abs()))
            .then(a.m.cmp(&b.m))
            .then(a.n.cmp(&b.n))
    });
    kept.truncate(kmax);
    Ok(InterferenceTable { entries: kept, reference: table.reference, grid: table.grid.clone() })
}

/// `10 log10(eps_00^2 / sum eps^2)` in dB; `+inf` without interference.
pub fn sir(table: &InterferenceTable) -> f64 {
    let interference: f64 = table.entries.iter().map(|e| e.value * e.value).sum();
    if interference == 0.0 {
        return f64::INFINITY;
    }
    10.0 * (table.reference * table.reference / interference).log10()
}

/// `|eps|` sorted in descending order.
pub fn ordered_magnitudes(table: &InterferenceTable) -> Vec<f64> {
    let mut v: Vec<f64> = table.entries.iter().map(|e| e.value.abs()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

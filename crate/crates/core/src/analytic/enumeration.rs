//! Mixed-radix walk over every interference offset `sum_j a_j eps_j` with
//! `a_j` drawn from the PAM alphabet.
//!
//! Digit `j` of an index (least significant first, radix `N_p`) selects the
//! level of element `j`. Sums fold the alphabet symmetry: element 0 only takes
//! positive levels and each visit contributes `f(o) + f(-o)`. The last few
//! elements are tabulated once so the hot loop is a single add per term.
//! Per-chunk sums are compensated and reduced pairwise in index order, so the
//! result does not depend on the number of worker threads.

use rayon::prelude::*;

use super::constellation::PamConstellation;
use crate::error::{Error, Result};
use crate::interference::InterferenceTable;

/// Largest offset count enumerated without an explicit override.
pub const DEFAULT_BUDGET: u64 = 1 << 30;

/// Upper bound on the size of the tabulated inner block.
const INNER_BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationConfig {
    pub budget: u64,
    pub parallel: bool,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        Self { budget: DEFAULT_BUDGET, parallel: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OffsetStream {
    values: Vec<f64>,
    levels: Vec<f64>,
    len: u64,
}

impl OffsetStream {
    /// Stream over raw element values.
    pub fn new(values: &[f64], pam: &PamConstellation, budget: u64) -> Result<Self> {
        let radix = pam.order() as u128;
        let required = u32::try_from(values.len())
            .ok()
            .and_then(|e| radix.checked_pow(e))
            .unwrap_or(u128::MAX);
        if required > budget as u128 {
            return Err(Error::EnumerationBudgetExceeded { required, budget });
        }
        Ok(Self { values: values.to_vec(), levels: pam.levels().to_vec(), len: required as u64 })
    }

    /// Stream over a table's elements, normalized by its reference energy.
    pub fn from_table(table: &InterferenceTable, pam: &PamConstellation, budget: u64) -> Result<Self> {
        let reference = table.reference();
        if reference == 0.0 || reference.is_nan() {
            return Err(Error::DegenerateFilter);
        }
        let values: Vec<f64> = table.entries().iter().map(|e| e.value / reference).collect();
        Self::new(&values, pam, budget)
    }

    /// Number of offsets, `N_p^|E|`.
    pub fn len(&self) -> u64 {
        self.len
    }

    /// Never true: an empty element list still yields the single offset 0.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn elements(&self) -> usize {
        self.values.len()
    }

    pub fn offset_at(&self, mut index: u64) -> f64 {
        let radix = self.levels.len() as u64;
        let mut acc = 0.0;
        for &v in &self.values {
            acc += self.levels[(index % radix) as usize] * v;
            index /= radix;
        }
        acc
    }

    /// Offsets with index in `start..end` (clamped to the stream length).
    pub fn range(&self, start: u64, end: u64) -> impl Iterator<Item = f64> + '_ {
        let end = end.min(self.len);
        (start.min(end)..end).map(move |i| self.offset_at(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.range(0, self.len)
    }

    /// `sum_o f(o)` over every offset in the stream.
    pub fn sum_map<F>(&self, f: F, parallel: bool) -> f64
    where
        F: Fn(f64) -> f64 + Sync,
    {
        if self.values.is_empty() {
            return f(0.0);
        }
        let radix = self.levels.len();
        let positive = &self.levels[radix / 2..];
        let rest = &self.values[1..];

        let mut inner_count = 0;
        let mut size = 1;
        while inner_count < rest.len() && size * radix <= INNER_BLOCK {
            size *= radix;
            inner_count += 1;
        }
        let (outer, inner) = rest.split_at(rest.len() - inner_count);
        let mut table = vec![0.0];
        for &v in inner {
            table = table.iter().flat_map(|&t| self.levels.iter().map(move |&a| t + a * v)).collect();
        }

        let chunks = positive.len() * radix.pow(outer.len() as u32);
        let chunk = |index: usize| {
            let mut base = positive[index % positive.len()] * self.values[0];
            let mut rem = index / positive.len();
            for &v in outer {
                base += self.levels[rem % radix] * v;
                rem /= radix;
            }
            let mut acc = Neumaier::default();
            for &t in &table {
                let o = base + t;
                acc.add(f(o) + f(-o));
            }
            acc.total()
        };
        let sums: Vec<f64> = if parallel {
            (0..chunks).into_par_iter().map(chunk).collect()
        } else {
            (0..chunks).map(chunk).collect()
        };
        pairwise_sum(&sums)
    }

    /// `sum_o f(o) / N_p^|E|`.
    pub fn mean_map<F>(&self, f: F, parallel: bool) -> f64
    where
        F: Fn(f64) -> f64 + Sync,
    {
        self.sum_map(f, parallel) / self.len as f64
    }
}

/// Kahan-Babuska-Neumaier accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Neumaier {
    sum: f64,
    compensation: f64,
}

impl Neumaier {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

pub(crate) fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pam(order: usize) -> PamConstellation {
        PamConstellation::new(order).unwrap()
    }

    #[test]
    fn empty_stream_is_zero() {
        let s = OffsetStream::new(&[], &pam(8), DEFAULT_BUDGET).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0.0]);
        assert_eq!(s.sum_map(|o| o + 2.0, false), 2.0);
    }

    #[test]
    fn single_binary_element() {
        let s = OffsetStream::new(&[0.1], &pam(2), DEFAULT_BUDGET).unwrap();
        let mut v: Vec<f64> = s.iter().collect();
        v.sort_by(f64::total_cmp);
        assert_eq!(v, vec![-0.1, 0.1]);
    }

    #[test]
    fn counts() {
        let s = OffsetStream::new(&[0.1; 8], &pam(8), DEFAULT_BUDGET).unwrap();
        assert_eq!(s.len(), 16_777_216);
        let big = OffsetStream::new(&[0.1; 11], &pam(8), DEFAULT_BUDGET);
        match big {
            Err(Error::EnumerationBudgetExceeded { required, budget }) => {
                assert_eq!(required, 1u128 << 33);
                assert_eq!(budget, DEFAULT_BUDGET);
            }
            other => panic!("unexpected {other:?}"),
        }
        let huge = OffsetStream::new(&[0.1; 119], &pam(8), DEFAULT_BUDGET);
        assert!(matches!(huge, Err(Error::EnumerationBudgetExceeded { required: u128::MAX, .. })));
    }

    #[test]
    fn each_offset_once() {
        // powers of two make every digit pattern a distinct sum
        let values = [1.0, 8.0, 64.0];
        let s = OffsetStream::new(&values, &pam(4), DEFAULT_BUDGET).unwrap();
        let mut v: Vec<f64> = s.iter().collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        assert_eq!(v.len(), 64);
        let a = [-3.0, -1.0, 1.0, 3.0];
        for x in a {
            for y in a {
                for z in a {
                    assert!(v.contains(&(x + 8.0 * y + 64.0 * z)));
                }
            }
        }
    }

    #[test]
    fn folded_sum_matches_plain_iteration() {
        let values = [0.21, -0.07, 0.033, 0.011, -0.0042, 0.0017];
        for order in [2, 4, 8] {
            let s = OffsetStream::new(&values, &pam(order), DEFAULT_BUDGET).unwrap();
            let f = |o: f64| (3.0 * o).exp() + o * o * o;
            let mut plain = Neumaier::default();
            for o in s.iter() {
                plain.add(f(o));
            }
            let serial = s.sum_map(f, false);
            let parallel = s.sum_map(f, true);
            assert_eq!(serial, parallel);
            assert!((serial - plain.total()).abs() <= 1e-12 * plain.total().abs());
        }
    }

    #[test]
    fn range_partitions() {
        let s = OffsetStream::new(&[0.3, 0.1, 0.05], &pam(4), DEFAULT_BUDGET).unwrap();
        let whole: Vec<f64> = s.iter().collect();
        let mut parts: Vec<f64> = s.range(0, 20).collect();
        parts.extend(s.range(20, 64));
        parts.extend(s.range(64, 100));
        assert_eq!(whole, parts);
    }

    #[test]
    fn compensated_sum() {
        let mut acc = Neumaier::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            acc.add(x);
        }
        assert_eq!(acc.total(), 2.0);
        assert_eq!(pairwise_sum(&[1.0, 2.0, 3.0, 4.0, 5.0]), 15.0);
    }
}

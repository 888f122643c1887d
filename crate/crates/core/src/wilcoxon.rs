//! Wilcoxon signed-rank test for paired samples.
//!
//! Ranks are kept doubled (`2 * rank`) so that average ranks over ties stay
//! integral and the exact null distribution can be enumerated without
//! floating-point comparisons.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest sample for which the exact distribution is used.
pub const EXACT_MAX_N: usize = 12;

/// Minimum number of non-zero differences.
pub const MIN_N: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WilcoxonError {
    #[error("only {0} non-zero differences; at least 5 are required")]
    InsufficientData(usize),
    #[error("differences contain NaN")]
    NotANumber,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wilcoxon {
    /// Non-zero differences used.
    pub n: usize,
    /// Rank sum of positive differences `y - x`.
    pub w_plus: f64,
    pub w_minus: f64,
    /// `min(w_plus, w_minus)`.
    pub statistic: f64,
    /// Two-sided p-value reported by the test.
    pub p_value: f64,
    pub method: PMethod,
    /// Continuity-corrected standard score, signed like `w_plus - mean`.
    pub z: f64,
    pub p_normal: f64,
    pub p_exact: Option<f64>,
}

/// Signed ranks of the non-zero differences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedRanks {
    /// Doubled average ranks of `|d|`, in input order.
    pub doubled_ranks: Vec<u64>,
    pub positive: Vec<bool>,
    /// Sizes of groups of tied `|d|`.
    pub ties: Vec<usize>,
}

impl SignedRanks {
    pub fn from_differences(diffs: &[f64]) -> Result<Self, WilcoxonError> {
        if diffs.iter().any(|d| d.is_nan()) {
            return Err(WilcoxonError::NotANumber);
        }
        let nz: Vec<f64> = diffs.iter().copied().filter(|&d| d != 0.0).collect();
        let mut idx: Vec<usize> = (0..nz.len()).collect();
        idx.sort_by(|&a, &b| nz[a].abs().total_cmp(&nz[b].abs()));

        let mut doubled_ranks = alloc::vec![0u64; nz.len()];
        let mut ties = Vec::new();
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && nz[idx[j + 1]].abs() == nz[idx[i]].abs() {
                j += 1;
            }
            // positions i..=j hold ranks i+1..=j+1; doubled average is i+j+2
            let r = (i + j + 2) as u64;
            for &k in &idx[i..=j] {
                doubled_ranks[k] = r;
            }
            if j > i {
                ties.push(j - i + 1);
            }
            i = j + 1;
        }
        let positive = nz.iter().map(|&d| d > 0.0).collect();
        Ok(SignedRanks { doubled_ranks, positive, ties })
    }

    pub fn len(&self) -> usize {
        self.doubled_ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doubled_ranks.is_empty()
    }

    /// Doubled `(w_plus, w_minus)`.
    pub fn doubled_sums(&self) -> (u64, u64) {
        let plus = self
            .doubled_ranks
            .iter()
            .zip(&self.positive)
            .filter(|(_, &p)| p)
            .map(|(&r, _)| r)
            .sum();
        let total: u64 = self.doubled_ranks.iter().sum();
        (plus, total - plus)
    }
}

/// Two-sided exact p-value: the share of the `2^n` equally likely sign
/// assignments whose smaller rank sum is at most the observed one.
pub fn exact_p(ranks: &SignedRanks) -> f64 {
    let n = ranks.len();
    assert!(n <= 24, "exact enumeration is limited to n <= 24");
    let total: u64 = ranks.doubled_ranks.iter().sum();
    let (plus, minus) = ranks.doubled_sums();
    let observed = plus.min(minus);
    let mut hits = 0u64;
    for mask in 0u64..(1 << n) {
        let mut s = 0;
        let mut bits = mask;
        while bits != 0 {
            s += ranks.doubled_ranks[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        if s.min(total - s) <= observed {
            hits += 1;
        }
    }
    hits as f64 / (1u64 << n) as f64
}

/// Normal approximation with continuity and tie correction. Returns
/// `(z, two-sided p)`.
pub fn normal_p(ranks: &SignedRanks) -> (f64, f64) {
    let n = ranks.len() as f64;
    let (plus, _) = ranks.doubled_sums();
    let w_plus = plus as f64 / 2.0;
    let mean = n * (n + 1.0) / 4.0;
    let tie_term: f64 = ranks.ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term;
    let sd = libm::sqrt(var);
    let dev = w_plus - mean;
    let corrected = (dev.abs() - 0.5).max(0.0);
    let z = if dev < 0.0 { -corrected / sd } else { corrected / sd };
    let p = libm::erfc(corrected / sd / core::f64::consts::SQRT_2);
    (z, p.clamp(f64::MIN_POSITIVE, 1.0))
}

/// Tests whether the paired differences `y - x` are symmetric around zero.
///
/// Zero differences are dropped. Up to [`EXACT_MAX_N`] differences the
/// reported p-value is exact, above that the normal approximation.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<Wilcoxon, WilcoxonError> {
    let diffs: Vec<f64> = pairs.iter().map(|&(x, y)| y - x).collect();
    wilcoxon_differences(&diffs)
}

pub fn wilcoxon_differences(diffs: &[f64]) -> Result<Wilcoxon, WilcoxonError> {
    let ranks = SignedRanks::from_differences(diffs)?;
    let n = ranks.len();
    if n < MIN_N {
        return Err(WilcoxonError::InsufficientData(n));
    }
    let (plus, minus) = ranks.doubled_sums();
    let (z, p_normal) = normal_p(&ranks);
    let p_exact = (n <= EXACT_MAX_N).then(|| exact_p(&ranks));
    let (p_value, method) = match p_exact {
        Some(p) => (p, PMethod::Exact),
        None => (p_normal, PMethod::Normal),
    };
    Ok(Wilcoxon {
        n,
        w_plus: plus as f64 / 2.0,
        w_minus: minus as f64 / 2.0,
        statistic: plus.min(minus) as f64 / 2.0,
        p_value,
        method,
        z,
        p_normal,
        p_exact,
    })
}

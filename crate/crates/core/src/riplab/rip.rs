//! Restricted isometry constants by subset enumeration.
//!
//! For a support `S` the quantity `‖Φx‖²/‖x‖²` ranges over the eigenvalues of
//! `Φ_Sᵀ Φ_S`. By eigenvalue interlacing every support of size below `order`
//! is dominated by some support of size exactly `order`, so only those are
//! enumerated.

use nalgebra::DMatrix;
use rand::seq::index::sample;

use super::report::RipReport;
use crate::error::{LabError, Result};
use crate::linalg::{binomial, fold_combinations, principal_submatrix, symmetric_extremes};
use crate::matrices::{AsDense, IndexSet};
use crate::seed::rng_from_seed;

/// Default cap on the number of subsets an exhaustive check may visit.
pub const DEFAULT_BUDGET: u64 = 2_000_000;

/// Running extreme restricted eigenvalues with their (rank, support)
/// witnesses. Ties resolve to the lowest rank.
#[derive(Debug, Clone)]
pub(crate) struct Extremes {
    pub low: f64,
    pub low_at: (u128, Vec<usize>),
    pub high: f64,
    pub high_at: (u128, Vec<usize>),
}

impl Extremes {
    pub fn empty() -> Self {
        Self {
            low: f64::INFINITY,
            low_at: (u128::MAX, Vec::new()),
            high: f64::NEG_INFINITY,
            high_at: (u128::MAX, Vec::new()),
        }
    }

    pub fn observe(&mut self, rank: u128, subset: &[usize], lo: f64, hi: f64) {
        if lo < self.low || (lo == self.low && rank < self.low_at.0) {
            self.low = lo;
            self.low_at = (rank, subset.to_vec());
        }
        if hi > self.high || (hi == self.high && rank < self.high_at.0) {
            self.high = hi;
            self.high_at = (rank, subset.to_vec());
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        if other.low < self.low || (other.low == self.low && other.low_at.0 < self.low_at.0) {
            self.low = other.low;
            self.low_at = other.low_at;
        }
        if other.high > self.high || (other.high == self.high && other.high_at.0 < self.high_at.0) {
            self.high = other.high;
            self.high_at = other.high_at;
        }
        self
    }

    pub fn delta(&self) -> f64 {
        (1.0 - self.low).max(self.high - 1.0)
    }

    pub fn into_report(self, order: usize, universe: usize, estimated: bool) -> RipReport {
        let delta = self.delta();
        RipReport {
            order,
            delta,
            worst_low_subset: IndexSet::from_zero_based(&self.low_at.1, universe).expect("valid support"),
            worst_high_subset: IndexSet::from_zero_based(&self.high_at.1, universe).expect("valid support"),
            low_bound: self.low,
            high_bound: self.high,
            estimated,
        }
    }
}

pub(crate) fn check_order(order: usize, cols: usize) -> Result<()> {
    if order == 0 || order > cols {
        return Err(LabError::Precondition(format!("order must lie in 1..={cols}, got {order}")));
    }
    Ok(())
}

pub(crate) fn check_budget(subsets: u128, budget: u64) -> Result<()> {
    if subsets > budget as u128 {
        return Err(LabError::EnumerationTooLarge { subsets, budget });
    }
    Ok(())
}

/// Exhaustive extremes over all `order`-subsets of the columns described by
/// the Gram matrix `gram`.
pub(crate) fn gram_extremes(gram: &DMatrix<f64>, order: usize) -> Extremes {
    fold_combinations(
        gram.ncols(),
        order,
        Extremes::empty,
        |acc, rank, subset| {
            let (lo, hi) = symmetric_extremes(&principal_submatrix(gram, subset));
            acc.observe(rank, subset, lo, hi);
        },
        Extremes::merge,
    )
}

/// Exact isometry constant of order `order`, enumerating at most
/// [`DEFAULT_BUDGET`] supports.
pub fn exact_rip<M: AsDense>(m: &M, order: usize) -> Result<RipReport> {
    exact_rip_with_budget(m, order, DEFAULT_BUDGET)
}

pub fn exact_rip_with_budget<M: AsDense>(m: &M, order: usize, budget: u64) -> Result<RipReport> {
    let a = m.dense();
    check_order(order, a.ncols())?;
    check_budget(binomial(a.ncols(), order), budget)?;
    let gram = a.tr_mul(a);
    Ok(gram_extremes(&gram, order).into_report(order, a.ncols(), false))
}

/// Lower bound on the isometry constant from `samples` uniformly drawn
/// supports. When `samples` covers every support the result is exact.
pub fn monte_carlo_rip<M: AsDense>(
    m: &M,
    order: usize,
    samples: u64,
    seed: u64,
) -> Result<RipReport> {
    let a = m.dense();
    check_order(order, a.ncols())?;
    if samples == 0 {
        return Err(LabError::Precondition("samples must be at least 1".into()));
    }
    let n = a.ncols();
    let total = binomial(n, order);
    let gram = a.tr_mul(a);
    if samples as u128 >= total {
        return Ok(gram_extremes(&gram, order).into_report(order, n, false));
    }
    let mut rng = rng_from_seed(seed);
    let mut ext = Extremes::empty();
    for s in 0..samples {
        let mut subset = sample(&mut rng, n, order).into_vec();
        subset.sort_unstable();
        let (lo, hi) = symmetric_extremes(&principal_submatrix(&gram, &subset));
        ext.observe(s as u128, &subset, lo, hi);
    }
    Ok(ext.into_report(order, n, true))
}

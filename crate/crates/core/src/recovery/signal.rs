use nalgebra::DVector;
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::matrices::{EntryDistribution, IndexSet};
use crate::seed::rng_from_seed;

/// Unit-norm signal stored by its support and the values on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSignal {
    pub n: usize,
    pub support: IndexSet,
    pub values: Vec<f64>,
    pub norm: f64,
}

impl SparseSignal {
    /// Normalizes `values` to unit length. Entries that are exactly zero are
    /// dropped from the support.
    pub fn from_dense(x: &DVector<f64>) -> Result<Self> {
        let norm = x.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(LabError::Precondition("signal must be finite and nonzero".into()));
        }
        let idx: Vec<usize> = (0..x.len()).filter(|&i| x[i] != 0.0).collect();
        let values = idx.iter().map(|&i| x[i] / norm).collect();
        let support = IndexSet::from_zero_based(&idx, x.len())?;
        Ok(Self { n: x.len(), support, values, norm: 1.0 })
    }

    pub fn k(&self) -> usize {
        self.support.len()
    }

    pub fn dense(&self) -> DVector<f64> {
        let mut x = DVector::zeros(self.n);
        for (&i, &v) in self.support.indices().iter().zip(&self.values) {
            x[i - 1] = v;
        }
        x
    }
}

/// Uniform random support of size `k` carrying i.i.d. standard normal values,
/// normalized to unit norm.
pub fn random_sparse_signal(n: usize, k: usize, seed: u64) -> Result<SparseSignal> {
    if k == 0 || k > n {
        return Err(LabError::InvalidDimension(format!("sparsity {k} must lie in 1..={n}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut idx = sample(&mut rng, n, k).into_vec();
    idx.sort_unstable();
    let mut x = DVector::zeros(n);
    for &i in &idx {
        let mut v = 0.0;
        while v == 0.0 {
            v = EntryDistribution::Gaussian.sample_unit(&mut rng);
        }
        x[i] = v;
    }
    SparseSignal::from_dense(&x)
}

/// Power-law compressible signal: the `i`-th largest magnitude is
/// proportional to `i^(-exponent)`, placed at random positions with random
/// signs and normalized to unit norm.
pub fn compressible_signal(n: usize, exponent: f64, seed: u64) -> Result<SparseSignal> {
    if n == 0 {
        return Err(LabError::InvalidDimension("signal length must be positive".into()));
    }
    if !(exponent > 0.0) || !exponent.is_finite() {
        return Err(LabError::Precondition(format!("decay exponent must be positive, got {exponent}")));
    }
    let mut rng = rng_from_seed(seed);
    let mut positions: Vec<usize> = (0..n).collect();
    positions.shuffle(&mut rng);
    let mut x = DVector::zeros(n);
    for (rank, &i) in positions.iter().enumerate() {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        x[i] = sign * ((rank + 1) as f64).powf(-exponent);
    }
    SparseSignal::from_dense(&x)
}

/// Keeps the `k` largest-magnitude entries of `x`; among equal magnitudes the
/// lower index wins.
pub fn best_k_term(x: &DVector<f64>, k: usize) -> DVector<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[b].abs().total_cmp(&x[a].abs()).then(a.cmp(&b)));
    let mut out = DVector::zeros(x.len());
    for &i in order.iter().take(k) {
        out[i] = x[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{fold_combinations, l1_norm};

    #[test]
    fn full_support_and_single_entry() {
        let full = random_sparse_signal(8, 8, 3).unwrap();
        assert_eq!(full.k(), 8);
        assert!((full.dense().norm() - 1.0).abs() < 1e-15);
        let one = random_sparse_signal(8, 1, 3).unwrap();
        let x = one.dense();
        assert_eq!(x.iter().filter(|v| **v != 0.0).count(), 1);
        assert_eq!(x.amax(), 1.0);
        assert_eq!(random_sparse_signal(8, 3, 9).unwrap(), random_sparse_signal(8, 3, 9).unwrap());
        assert!(random_sparse_signal(4, 5, 0).is_err());
    }

    #[test]
    fn compressible_decay() {
        let s = compressible_signal(64, 1.5, 2).unwrap();
        let x = s.dense();
        assert!((x.norm() - 1.0).abs() < 1e-14);
        let mut mags: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        assert!((mags[0] / mags[3] - 4f64.powf(1.5)).abs() < 1e-10);
    }

    #[test]
    fn best_term_examples() {
        let x = DVector::from_vec(vec![3.0, -5.0, 1.0]);
        assert_eq!(best_k_term(&x, 1), DVector::from_vec(vec![0.0, -5.0, 0.0]));
        assert_eq!(best_k_term(&x, 3), x);
        assert_eq!(best_k_term(&x, 0), DVector::zeros(3));
        let ties = DVector::from_vec(vec![1.0, -1.0, 1.0]);
        assert_eq!(best_k_term(&ties, 2), DVector::from_vec(vec![1.0, -1.0, 0.0]));
    }

    proptest::proptest! {
        #[test]
        fn best_term_is_optimal_in_every_norm(
            values in proptest::collection::vec(-4i32..=4, 1..=10),
            k in 0usize..=10,
        ) {
            let x = DVector::from_iterator(values.len(), values.iter().map(|&v| v as f64));
            let k = k.min(x.len());
            let kept = best_k_term(&x, k);
            let err = &x - &kept;
            let norms = |e: &DVector<f64>| (l1_norm(e), e.norm(), e.amax());
            let (b1, b2, binf) = norms(&err);
            let best = fold_combinations(
                x.len(),
                k,
                || (f64::INFINITY, f64::INFINITY, f64::INFINITY),
                |acc, _, s| {
                    let mut e = x.clone();
                    for &i in s {
                        e[i] = 0.0;
                    }
                    let (a, b, c) = norms(&e);
                    *acc = (acc.0.min(a), acc.1.min(b), acc.2.min(c));
                },
                |a, b| (a.0.min(b.0), a.1.min(b.1), a.2.min(b.2)),
            );
            proptest::prop_assert!((b1 - best.0).abs() < 1e-12);
            proptest::prop_assert!((b2 - best.1).abs() < 1e-12);
            proptest::prop_assert!((binf - best.2).abs() < 1e-12);
        }
    }
}

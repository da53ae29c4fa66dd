//! End-to-end check of the democracy argument on a desk-scale matrix: the
//! isometry constant `δ_A` of `A = [I | Φ]` at order `K + D` must bound the
//! constant of every `(M − D)`-row submatrix of Φ at order `K` by
//! `δ_A / (1 − δ_A)`.

use serde::{Deserialize, Serialize};

use super::report::{ViolationReport, EIGEN_SLACK};
use super::rip::{check_budget, exact_rip, DEFAULT_BUDGET};
use crate::error::{LabError, Result};
use crate::linalg::{binomial, next_combination};
use crate::matrices::{augment_identity, IndexSet, MeasurementMatrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowSetViolation {
    pub gamma: IndexSet,
    pub delta: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub k: usize,
    pub d: usize,
    pub delta_augmented: f64,
    pub bound: f64,
    pub worst_delta: f64,
    pub result: ViolationReport<RowSetViolation>,
}

pub fn democracy_chain_check(phi: &MeasurementMatrix, k: usize, d: usize) -> Result<ChainReport> {
    let m = phi.rows();
    if k == 0 || d >= m || k >= m - d {
        return Err(LabError::Precondition(format!("need 1 <= k < M - D, got k={k}, D={d}, M={m}")));
    }
    let keep = m - d;
    check_budget(binomial(m, keep).saturating_mul(binomial(phi.cols(), k)), DEFAULT_BUDGET)?;
    let a = augment_identity(phi);
    let delta_a = exact_rip(&a, k + d)?.delta;
    if delta_a >= 1.0 {
        return Err(LabError::Precondition(format!(
            "augmented matrix has isometry constant {delta_a} >= 1 at order {}",
            k + d
        )));
    }
    let bound = delta_a / (1.0 - delta_a);
    let mut result = ViolationReport::new(EIGEN_SLACK);
    let mut worst: f64 = 0.0;
    let mut gamma: Vec<usize> = (0..keep).collect();
    loop {
        let set = IndexSet::from_zero_based(&gamma, m)?;
        let delta = exact_rip(&phi.row_submatrix(&set)?, k)?.delta;
        worst = worst.max(delta);
        result.record(bound - delta, || RowSetViolation { gamma: set.clone(), delta, bound });
        if !next_combination(&mut gamma, m) {
            break;
        }
    }
    Ok(ChainReport { k, d, delta_augmented: delta_a, bound, worst_delta: worst, result })
}

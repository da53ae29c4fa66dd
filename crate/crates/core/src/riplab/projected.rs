//! Exhaustive check of the projected isometry: with `P = I − P_Λ` and `δ`
//! the isometry constant of `A` at order `K`,
//! `(1 − δ/(1−δ))‖u‖² ≤ ‖P A u‖² ≤ (1+δ)‖u‖²` for every `u` supported off
//! `Λ` with at most `K − |Λ|` nonzeros.


use super::report::{BoundSide, SupportViolation, ViolationReport, EIGEN_SLACK};
use super::rip::{check_budget, DEFAULT_BUDGET};
use crate::error::{LabError, Result};
use crate::linalg::{binomial, fold_combinations, principal_submatrix, symmetric_extremes};
use crate::matrices::{AsDense, complement_projector, range_projector, IndexSet};

/// Lower and upper factors of the projected bound for a given `δ`.
pub fn projected_bounds(delta: f64) -> (f64, f64) {
    (1.0 - delta / (1.0 - delta), 1.0 + delta)
}

pub fn projected_rip_check<M: AsDense>(
    a: &M,
    lambda: &IndexSet,
    order: usize,
    delta: f64,
) -> Result<ViolationReport<SupportViolation>> {
    projected_rip_check_with_budget(a, lambda, order, delta, DEFAULT_BUDGET)
}

pub fn projected_rip_check_with_budget<M: AsDense>(
    a: &M,
    lambda: &IndexSet,
    order: usize,
    delta: f64,
    budget: u64,
) -> Result<ViolationReport<SupportViolation>> {
    let a = a.dense();
    let n = a.ncols();
    lambda.expect_universe(n)?;
    if lambda.len() >= order {
        return Err(LabError::Precondition(format!(
            "|Λ| = {} must be smaller than the order {order}",
            lambda.len()
        )));
    }
    if order > n {
        return Err(LabError::Precondition(format!("order {order} exceeds {n} columns")));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(LabError::Precondition(format!("isometry constant must lie in [0, 1), got {delta}")));
    }

    let perp = complement_projector(&range_projector(a, lambda)?)?;
    let projected = perp * a;
    let gram = projected.tr_mul(&projected);

    let candidates = lambda.complement().zero_based();
    let size = (order - lambda.len()).min(candidates.len());
    check_budget(binomial(candidates.len(), size), budget)?;

    let (lower, upper) = projected_bounds(delta);
    let report = fold_combinations(
        candidates.len(),
        size,
        || ViolationReport::new(EIGEN_SLACK),
        |acc, _, local| {
            let support: Vec<usize> = local.iter().map(|&i| candidates[i]).collect();
            let (lo, hi) = symmetric_extremes(&principal_submatrix(&gram, &support));
            let make = |side, value, bound| {
                let support = IndexSet::from_zero_based(&support, n).expect("valid support");
                SupportViolation { support, side, value, bound }
            };
            acc.record(lo - lower, || make(BoundSide::Lower, lo, lower));
            acc.record(upper - hi, || make(BoundSide::Upper, hi, upper));
        },
        ViolationReport::merge,
    );
    Ok(report)
}

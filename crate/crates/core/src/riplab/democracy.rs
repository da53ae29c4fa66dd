//! Certificates for `(M̃, K, δ)`-democracy.
//!
//! Deleting a row subtracts a positive semidefinite term from every restricted
//! Gram matrix, so restricted eigenvalues only shrink as rows are removed.
//! The lower side of the isometry is therefore worst on the smallest allowed
//! row sets (`|Γ| = M̃`) and the upper side is worst on the full matrix. Those
//! two families cover every `|Γ| ≥ M̃`.

use rayon::prelude::*;

use super::report::DemocracyReport;
use super::rip::{check_budget, check_order, gram_extremes, Extremes, DEFAULT_BUDGET};
use crate::error::{LabError, Result};
use crate::linalg::{binomial, next_combination};
use crate::matrices::{AsDense, IndexSet};

pub fn democracy_certificate<M: AsDense>(
    m: &M,
    m_tilde: usize,
    order: usize,
    delta_bound: f64,
) -> Result<DemocracyReport> {
    democracy_certificate_with_budget(m, m_tilde, order, delta_bound, DEFAULT_BUDGET)
}

pub fn democracy_certificate_with_budget<M: AsDense>(
    m: &M,
    m_tilde: usize,
    order: usize,
    delta_bound: f64,
    budget: u64,
) -> Result<DemocracyReport> {
    let phi = m.dense();
    let (rows, cols) = phi.shape();
    check_order(order, cols)?;
    if m_tilde == 0 || m_tilde > rows {
        return Err(LabError::Precondition(format!("m_tilde must lie in 1..={rows}, got {m_tilde}")));
    }
    if order > m_tilde {
        return Err(LabError::Precondition(format!("order {order} exceeds m_tilde {m_tilde}")));
    }
    let gammas = binomial(rows, m_tilde);
    check_budget(gammas.saturating_mul(binomial(cols, order)), budget)?;

    let all_gammas: Vec<Vec<usize>> = {
        let mut out = Vec::with_capacity(gammas as usize);
        let mut c: Vec<usize> = (0..m_tilde).collect();
        loop {
            out.push(c.clone());
            if !next_combination(&mut c, rows) {
                break;
            }
        }
        out
    };

    // Lower side over |Γ| = M̃; ties keep the lexicographically first Γ.
    let (low, low_gamma) = all_gammas
        .par_iter()
        .enumerate()
        .map(|(i, gamma)| {
            let sub = phi.select_rows(gamma);
            let ext = gram_extremes(&sub.tr_mul(&sub), order);
            (ext.low, i)
        })
        .reduce(|| (f64::INFINITY, usize::MAX), |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });

    let full: Extremes = gram_extremes(&phi.tr_mul(phi), order);
    let low_side = 1.0 - low;
    let high_side = full.high - 1.0;

    let (worst_delta, worst_gamma) = if high_side > low_side {
        (high_side, IndexSet::full(rows))
    } else {
        (low_side, IndexSet::from_zero_based(&all_gammas[low_gamma], rows)?)
    };
    Ok(DemocracyReport {
        m_tilde,
        order,
        delta_bound,
        worst_gamma,
        worst_delta,
        holds: worst_delta <= delta_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use crate::matrices::{EntryDistribution, MeasurementMatrix};
    use crate::riplab::exact_rip;

    #[test]
    fn full_row_set_reduces_to_rip() {
        let phi = MeasurementMatrix::generate(5, 8, EntryDistribution::Gaussian, 2).unwrap();
        let rip = exact_rip(&phi, 2).unwrap();
        let rep = democracy_certificate(&phi, 5, 2, 10.0).unwrap();
        assert_eq!(rep.worst_delta, rip.delta);
        assert_eq!(rep.worst_gamma, IndexSet::full(5));
    }

    #[test]
    fn deleting_a_row_of_identity_annihilates_a_coordinate() {
        let id = DMatrix::<f64>::identity(2, 2);
        let rep = democracy_certificate(&id, 1, 1, 0.99).unwrap();
        assert!(rep.worst_delta >= 1.0);
        assert!(!rep.holds);
        assert_eq!(rep.worst_gamma.len(), 1);
    }

    #[test]
    fn upper_side_comes_from_full_matrix() {
        // Each column has squared norm 1.5, split evenly over three rows, so
        // the full matrix is the worst case for the upper bound.
        let v = 0.5f64.sqrt();
        let a = DMatrix::from_element(3, 1, v);
        let rep = democracy_certificate(&a, 2, 1, 0.4).unwrap();
        assert!((rep.worst_delta - 0.5).abs() < 1e-12);
        assert_eq!(rep.worst_gamma, IndexSet::full(3));
        assert!(!rep.holds);
    }

    #[test]
    fn preconditions() {
        let id = DMatrix::<f64>::identity(3, 3);
        assert!(democracy_certificate(&id, 4, 1, 0.5).is_err());
        assert!(democracy_certificate(&id, 2, 3, 0.5).is_err());
        let big = DMatrix::<f64>::identity(20, 40);
        assert!(matches!(
            democracy_certificate(&big, 10, 3, 0.5),
            Err(LabError::EnumerationTooLarge { .. })
        ));
    }
}

//! Cross-checks of the isometry oracles against independent computations.
//! Frozen values were produced offline from the CSV export of the same
//! seeded matrices with a separate SVD-based enumeration.

use demolab::linalg::binomial;
use demolab::matrices::{augment_identity, EntryDistribution, IndexSet, MeasurementMatrix};
use demolab::riplab::{
    democracy_certificate, exact_rip, inner_product_check, monte_carlo_rip, projected_rip_check, theorem1_constants,
};
use demolab::LabError;
use nalgebra::DMatrix;

fn gaussian(rows: usize, cols: usize, seed: u64) -> MeasurementMatrix {
    MeasurementMatrix::generate(rows, cols, EntryDistribution::Gaussian, seed).unwrap()
}

/// Restricted eigenvalue extremes from singular values of every column
/// submatrix, padding with zeros when the submatrix is wide.
fn svd_delta(a: &DMatrix<f64>, order: usize) -> f64 {
    let n = a.ncols();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut subset: Vec<usize> = (0..order).collect();
    loop {
        let cols = a.select_columns(&subset);
        let mut ev: Vec<f64> = cols.svd(false, false).singular_values.iter().map(|s| s * s).collect();
        ev.resize(order, 0.0);
        for v in ev {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let mut i = order;
        loop {
            if i == 0 {
                return (1.0 - lo).max(hi - 1.0);
            }
            i -= 1;
            if subset[i] < n - order + i {
                subset[i] += 1;
                for j in i + 1..order {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[test]
fn frozen_constants_of_a_six_by_twelve_instance() {
    let phi = gaussian(6, 12, 1);
    let frozen = [1.4395639230631763, 2.4715951518899955, 2.8052111147310086];
    for (order, want) in (1..=3).zip(frozen) {
        let got = exact_rip(&phi, order).unwrap().delta;
        assert!((got - want).abs() <= 1e-10, "order {order}: {got} vs {want}");
    }
}

#[test]
fn exact_rip_matches_svd_enumeration() {
    for seed in 0..8u64 {
        let rows = 3 + (seed as usize % 6);
        let cols = 6 + 2 * (seed as usize % 5);
        let phi = gaussian(rows, cols, 100 + seed);
        for order in 1..=3 {
            let got = exact_rip(&phi, order).unwrap();
            let want = svd_delta(phi.entries(), order);
            assert!((got.delta - want).abs() <= 1e-10, "seed {seed} order {order}: {} vs {want}", got.delta);
        }
    }
}

#[test]
fn sampled_constant_never_exceeds_exact() {
    let phi = gaussian(10, 20, 4);
    let exact = exact_rip(&phi, 3).unwrap().delta;
    let sampled = monte_carlo_rip(&phi, 3, 500, 9).unwrap();
    assert!(sampled.estimated);
    assert!(sampled.delta <= exact + 1e-12);

    let wide = gaussian(40, 120, 2);
    let est = monte_carlo_rip(&wide, 4, 5000, 1).unwrap();
    assert!(est.delta > 0.0 && est.delta.is_finite());
}

#[test]
fn democracy_flag_agrees_with_rescan() {
    let phi = gaussian(8, 16, 7);
    let worst = 0.831177427409767;
    let full = exact_rip(&phi, 1).unwrap().delta;
    assert!((full - 0.6834643651930239).abs() <= 1e-10);

    let strict = democracy_certificate(&phi, 7, 1, full).unwrap();
    assert!(!strict.holds);
    assert!((strict.worst_delta - worst).abs() <= 1e-10);

    let loose = democracy_certificate(&phi, 7, 1, worst + 1e-9).unwrap();
    assert!(loose.holds);
    assert_eq!(loose.worst_gamma.len(), 7);
}

#[test]
fn projected_check_needs_a_sub_unit_constant() {
    let phi = gaussian(8, 12, 5);
    let a = augment_identity(&phi);
    let delta = exact_rip(&a, 4).unwrap().delta;
    assert!((delta - 2.363159570686983).abs() <= 1e-10);
    let lambda = IndexSet::new(vec![2, 9], 20).unwrap();
    let err = projected_rip_check(&a, &lambda, 4, delta).unwrap_err();
    assert!(matches!(err, LabError::Precondition(_)), "{err}");

    let tall = augment_identity(&gaussian(40, 4, 12));
    let delta = exact_rip(&tall, 4).unwrap().delta;
    assert!(delta < 1.0);
    let lambda = IndexSet::new(vec![3, 41], 44).unwrap();
    let report = projected_rip_check(&tall, &lambda, 4, delta).unwrap();
    assert!(report.holds(), "{:?}", report.violations.first());
    assert_eq!(report.checked as u128, 2 * binomial(42, 2));
}

#[test]
fn inner_products_respect_exact_constant() {
    let a = augment_identity(&gaussian(8, 12, 5));
    let delta = exact_rip(&a, 4).unwrap().delta;
    let report = inner_product_check(&a, 4, delta, 10_000, 3).unwrap();
    assert_eq!(report.checked, 10_000);
    assert!(report.holds());
}

#[test]
fn measurement_count_matches_bisection() {
    let c = theorem1_constants(13, 50, 2048, 1.0, 0.3).unwrap();
    let want = 225.92609210542585;
    assert!((c.m_required - want).abs() <= 1e-6 * want, "{}", c.m_required);
}

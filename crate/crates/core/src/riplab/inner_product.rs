//! Monte Carlo check that an operator with isometry constant `δ` distorts
//! inner products of sparse pairs by at most `δ‖u‖‖v‖`.

use nalgebra::DVector;
use rand::seq::index::sample;
use rand::Rng;

use super::report::{PairViolation, ViolationReport, EIGEN_SLACK};
use super::rip::check_order;
use crate::error::{LabError, Result};
use crate::matrices::{AsDense, EntryDistribution, IndexSet};
use crate::seed::derived_rng;

/// Draws `samples` pairs `(u, v)` whose joint support has exactly `order`
/// elements, so both `u ± v` are `order`-sparse. A quarter of the pairs have
/// disjoint (orthogonal) supports and an eighth have `u = v`.
pub fn inner_product_check<M: AsDense>(
    a: &M,
    order: usize,
    delta: f64,
    samples: u64,
    seed: u64,
) -> Result<ViolationReport<PairViolation>> {
    let a = a.dense();
    let n = a.ncols();
    check_order(order, n)?;
    if !(delta >= 0.0) {
        return Err(LabError::Precondition(format!("isometry constant must be non-negative, got {delta}")));
    }
    let mut report = ViolationReport::new(EIGEN_SLACK);
    for s in 0..samples {
        let mut rng = derived_rng(seed, &[s]);
        let mut joint = sample(&mut rng, n, order).into_vec();
        joint.sort_unstable();
        let mut u = DVector::zeros(n);
        let mut v = DVector::zeros(n);
        let (mut u_idx, mut v_idx) = (Vec::new(), Vec::new());
        let kind = s % 8;
        for (pos, &j) in joint.iter().enumerate() {
            let ux = EntryDistribution::Gaussian.sample_unit(&mut rng);
            let vx = EntryDistribution::Gaussian.sample_unit(&mut rng);
            // 0: u = v; 2 and 6: disjoint supports (orthogonal); otherwise a
            // random split in which the first index belongs to u and the last to v.
            let last = joint.len() - 1;
            let (in_u, in_v) = match kind {
                0 => (true, true),
                2 | 6 if last > 0 => (pos % 2 == 0, pos % 2 == 1),
                _ if pos == 0 && last == 0 => (true, true),
                _ if pos == 0 => (true, rng.random::<bool>()),
                _ if pos == last => (rng.random::<bool>(), true),
                _ => match rng.random_range(0..3) {
                    0 => (true, false),
                    1 => (false, true),
                    _ => (true, true),
                },
            };
            if in_u {
                u[j] = ux;
                u_idx.push(j);
            }
            if in_v {
                v[j] = if kind == 0 { ux } else { vx };
                v_idx.push(j);
            }
        }
        let au = a * &u;
        let av = a * &v;
        let distortion = (au.dot(&av) - u.dot(&v)).abs();
        let scale = u.norm() * v.norm();
        let bound = delta * scale;
        // Margin is measured relative to ‖u‖‖v‖ so the slack is scale free.
        report.record((bound - distortion) / scale, || PairViolation {
            sample: s,
            u_support: IndexSet::from_zero_based(&u_idx, n).expect("valid support"),
            v_support: IndexSet::from_zero_based(&v_idx, n).expect("valid support"),
            distortion,
            bound,
        });
    }
    Ok(report)
}

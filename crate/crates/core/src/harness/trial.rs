use std::ops::ControlFlow;

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use super::{DropPolicy, ExperimentConfig};
use crate::error::Result;
use crate::linalg::{l1_norm, principal_submatrix};
use crate::matrices::MeasurementMatrix;
use crate::recovery::{certificate_on_rows, random_sparse_signal, relative_error, BasisPursuit, SparseSignal};
use crate::seed::{derive_seed, rng_from_seed};

const PHI_STREAM: u64 = 0;
const SIGNAL_STREAM: u64 = 1;
const GAMMA_STREAM: u64 = 2;

/// How a recovery attempt was settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    /// A dual certificate on the true support proves `x` is the unique ℓ1
    /// minimizer.
    Certificate,
    /// The solver converged and its estimate was compared with `x`.
    Solver,
    /// A feasible point with `‖x‖₁ − ‖v‖₁ > tol·√N·‖x‖₂` proves the minimizer
    /// is farther than `tol` from `x`.
    FailureBound,
    /// The iteration cap was reached; counted as a failure.
    IterationCap,
}

/// One recovery attempt inside a drop scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub m: usize,
    pub trial: usize,
    pub d: usize,
    pub draw: usize,
    pub policy: DropPolicy,
    pub success: bool,
    pub rel_error: Option<f64>,
    pub decision: Decision,
    pub seed: u64,
}

/// The matrix and signal of one `(m, trial)` cell. Both depend only on the
/// master seed, `m` and the trial index, so every policy sees the same pair.
pub struct TrialInstance {
    pub m: usize,
    pub trial: usize,
    pub phi: MeasurementMatrix,
    pub signal: SparseSignal,
    x: DVector<f64>,
    y: DVector<f64>,
    gram: DMatrix<f64>,
}

impl TrialInstance {
    pub fn draw(cfg: &ExperimentConfig, m: usize, trial: usize) -> Result<Self> {
        let cell = [m as u64, trial as u64];
        let phi_seed = derive_seed(cfg.master_seed, &[cell[0], cell[1], PHI_STREAM]);
        let signal_seed = derive_seed(cfg.master_seed, &[cell[0], cell[1], SIGNAL_STREAM]);
        let phi = MeasurementMatrix::generate(m, cfg.n, cfg.dist, phi_seed)?;
        let signal = random_sparse_signal(cfg.n, cfg.k, signal_seed)?;
        let x = signal.dense();
        let y = phi.apply(&x);
        let gram = phi.entries() * phi.entries().transpose();
        Ok(Self { m, trial, phi, signal, x, y, gram })
    }

    pub fn measurements(&self) -> &DVector<f64> {
        &self.y
    }

    /// Seed of the `draw`-th random row subset at drop level `d`. The policy
    /// is deliberately not part of the path.
    pub fn gamma_seed(&self, cfg: &ExperimentConfig, d: usize, draw: usize) -> u64 {
        derive_seed(cfg.master_seed, &[self.m as u64, self.trial as u64, GAMMA_STREAM, d as u64, draw as u64])
    }

    /// Uniform random `m − d` kept rows, sorted and 0-based.
    pub fn random_rows(&self, seed: u64, d: usize) -> Vec<usize> {
        let mut rng = rng_from_seed(seed);
        let mut rows = sample(&mut rng, self.m, self.m - d).into_vec();
        rows.sort_unstable();
        rows
    }

    /// Rows left after deleting the `d` largest `|y_i|`, lowest index first
    /// among equal magnitudes.
    pub fn adversarial_rows(&self, d: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.m).collect();
        order.sort_by(|&a, &b| self.y[b].abs().total_cmp(&self.y[a].abs()).then(a.cmp(&b)));
        let mut rows = order[d..].to_vec();
        rows.sort_unstable();
        rows
    }

    /// Whether basis pursuit on the kept `rows` recovers `x` to `recovery_tol`.
    pub fn recovers(&self, cfg: &ExperimentConfig, rows: &[usize]) -> Result<(bool, Decision, Option<f64>)> {
        let a = self.phi.entries();
        if cfg.certified_shortcut && certificate_on_rows(a, rows, &self.signal) {
            return Ok((true, Decision::Certificate, None));
        }
        let sub = a.select_rows(rows);
        let y = DVector::from_iterator(rows.len(), rows.iter().map(|&i| self.y[i]));
        let solver = BasisPursuit::with_row_gram(sub, principal_submatrix(&self.gram, rows))?;
        let x_l1 = l1_norm(&self.x);
        let gap_needed = cfg.recovery_tol * (cfg.n as f64).sqrt() * self.x.norm();
        let mut bounded = false;
        let result = solver.solve_monitored(&y, &cfg.solver, |p| {
            if cfg.certified_shortcut && x_l1 - p.feasible_l1 > gap_needed {
                bounded = true;
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        let rel = relative_error(&self.x, &result.estimate_vector())?;
        if bounded {
            return Ok((false, Decision::FailureBound, Some(rel)));
        }
        if !result.converged {
            return Ok((false, Decision::IterationCap, Some(rel)));
        }
        Ok((rel <= cfg.recovery_tol, Decision::Solver, Some(rel)))
    }

    fn attempt(
        &self,
        cfg: &ExperimentConfig,
        policy: DropPolicy,
        d: usize,
        draw: usize,
        log: &mut Option<&mut Vec<TrialRecord>>,
    ) -> Result<bool> {
        let (rows, seed) = match policy {
            DropPolicy::AdversarialLargest => (self.adversarial_rows(d), 0),
            _ => {
                let seed = self.gamma_seed(cfg, d, draw);
                (self.random_rows(seed, d), seed)
            }
        };
        let (success, decision, rel_error) = self.recovers(cfg, &rows)?;
        if let Some(log) = log.as_deref_mut() {
            log.push(TrialRecord { m: self.m, trial: self.trial, d, draw, policy, success, rel_error, decision, seed });
        }
        Ok(success)
    }

    /// Largest drop level with verified recovery, scanning upward from zero
    /// and stopping at the first failure; −1 when even `d = 0` fails. The scan
    /// ends at `m − k` or at `cfg.d_cap`.
    pub fn d_max(&self, cfg: &ExperimentConfig, policy: DropPolicy, mut log: Option<&mut Vec<TrialRecord>>) -> Result<i64> {
        let mut cap = self.m.saturating_sub(cfg.k);
        if let Some(limit) = cfg.d_cap {
            cap = cap.min(limit);
        }
        let draws = match policy {
            DropPolicy::RandomMulti => cfg.r_submatrices,
            _ => 1,
        };
        for d in 0..=cap {
            let mut ok = true;
            // Without drops every draw keeps all rows.
            let draws = if d == 0 { 1 } else { draws };
            for draw in 0..draws {
                if !self.attempt(cfg, policy, d, draw, &mut log)? {
                    ok = false;
                    break;
                }
            }
            if !ok {
                return Ok(d as i64 - 1);
            }
        }
        Ok(cap as i64)
    }
}

pub fn d_max_for_policy(m: usize, cfg: &ExperimentConfig, trial: usize, policy: DropPolicy) -> Result<i64> {
    TrialInstance::draw(cfg, m, trial)?.d_max(cfg, policy, None)
}

pub fn d_max_single(m: usize, cfg: &ExperimentConfig, trial: usize) -> Result<i64> {
    d_max_for_policy(m, cfg, trial, DropPolicy::RandomSingle)
}

pub fn d_max_democracy(m: usize, cfg: &ExperimentConfig, trial: usize) -> Result<i64> {
    d_max_for_policy(m, cfg, trial, DropPolicy::RandomMulti)
}

pub fn d_max_adversarial(m: usize, cfg: &ExperimentConfig, trial: usize) -> Result<i64> {
    d_max_for_policy(m, cfg, trial, DropPolicy::AdversarialLargest)
}

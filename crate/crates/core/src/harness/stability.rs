use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::{l1_norm, principal_submatrix};
use crate::matrices::{EntryDistribution, MeasurementMatrix};
use crate::recovery::{best_k_term, compressible_signal, random_sparse_signal, BasisPursuit, SolverOptions};
use crate::seed::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    /// Exactly `k`-sparse Gaussian signal.
    Sparse,
    /// Power-law decay with the configured exponent, dense support.
    Compressible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub d_base: usize,
    pub d_extra_grid: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default = "default_signal")]
    pub signal: SignalKind,
    #[serde(default = "default_exponent")]
    pub exponent: f64,
    #[serde(default)]
    pub dist: EntryDistribution,
    #[serde(default)]
    pub solver: SolverOptions,
}

fn default_signal() -> SignalKind {
    SignalKind::Compressible
}

fn default_exponent() -> f64 {
    1.5
}

impl StabilityConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.k > self.n || self.m == 0 {
            return Err(LabError::InvalidDimension(format!("need 1 <= k <= n and m >= 1, got k={} n={} m={}", self.k, self.n, self.m)));
        }
        if self.trials == 0 || self.d_extra_grid.is_empty() {
            return Err(LabError::Precondition("need at least one trial and one extra drop level".into()));
        }
        for &extra in &self.d_extra_grid {
            if extra >= self.k || self.k - extra < 2 {
                return Err(LabError::Precondition(format!(
                    "extra drops {extra} must leave k - extra >= 2 (k = {})",
                    self.k
                )));
            }
            if self.d_base + extra >= self.m {
                return Err(LabError::Precondition(format!(
                    "dropping {} of {} rows leaves nothing",
                    self.d_base + extra,
                    self.m
                )));
            }
        }
        self.solver.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub d_extra: usize,
    pub k_tilde: usize,
    pub mean_error: f64,
    pub max_error: f64,
    /// Largest `‖x − x̂‖₂ / (‖x − x_K̃‖₁ / √K̃)` over trials with a nonzero tail.
    pub c3_hat: Option<f64>,
    /// Trials whose best `K̃`-term approximation is exact, so only raw errors apply.
    pub zero_tail_trials: usize,
    pub unconverged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub config: StabilityConfig,
    pub rows: Vec<StabilityRow>,
}

struct Sample {
    error: f64,
    ratio: Option<f64>,
    converged: bool,
}

/// Drops `d_base + D̃` rows for each `D̃` and records the ℓ2 recovery error
/// against the best `K̃`-term tail with `K̃ = ⌊(K − D̃)/2⌋`. Within a trial the
/// dropped row sets are nested, so larger `D̃` only removes more rows.
pub fn stability_experiment(cfg: &StabilityConfig) -> Result<StabilityReport> {
    cfg.validate()?;
    let per_trial = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| -> Result<Vec<Sample>> {
            let t = trial as u64;
            let phi = MeasurementMatrix::generate(cfg.m, cfg.n, cfg.dist, derive_seed(cfg.master_seed, &[t, 0]))?;
            let signal_seed = derive_seed(cfg.master_seed, &[t, 1]);
            let signal = match cfg.signal {
                SignalKind::Sparse => random_sparse_signal(cfg.n, cfg.k, signal_seed)?,
                SignalKind::Compressible => compressible_signal(cfg.n, cfg.exponent, signal_seed)?,
            };
            let x = signal.dense();
            let y = phi.apply(&x);
            let gram = phi.entries() * phi.entries().transpose();
            let mut order: Vec<usize> = (0..cfg.m).collect();
            order.shuffle(&mut rng_from_seed(derive_seed(cfg.master_seed, &[t, 2])));

            cfg.d_extra_grid
                .iter()
                .map(|&extra| {
                    let mut rows = order[cfg.d_base + extra..].to_vec();
                    rows.sort_unstable();
                    let solver = BasisPursuit::with_row_gram(phi.entries().select_rows(&rows), principal_submatrix(&gram, &rows))?;
                    let y_rows = y.select_rows(&rows);
                    let result = solver.solve(&y_rows, &cfg.solver)?;
                    let error = (&x - result.estimate_vector()).norm() / x.norm();
                    let k_tilde = (cfg.k - extra) / 2;
                    let tail = l1_norm(&(&x - best_k_term(&x, k_tilde))) / (k_tilde as f64).sqrt() / x.norm();
                    Ok(Sample { error, ratio: (tail > 0.0).then(|| error / tail), converged: result.converged })
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = cfg
        .d_extra_grid
        .iter()
        .enumerate()
        .map(|(j, &d_extra)| {
            let samples: Vec<&Sample> = per_trial.iter().map(|s| &s[j]).collect();
            let count = samples.len() as f64;
            StabilityRow {
                d_extra,
                k_tilde: (cfg.k - d_extra) / 2,
                mean_error: samples.iter().map(|s| s.error).sum::<f64>() / count,
                max_error: samples.iter().map(|s| s.error).fold(0.0, f64::max),
                c3_hat: samples.iter().filter_map(|s| s.ratio).reduce(f64::max),
                zero_tail_trials: samples.iter().filter(|s| s.ratio.is_none()).count(),
                unconverged: samples.iter().filter(|s| !s.converged).count(),
            }
        })
        .collect();
    Ok(StabilityReport { config: cfg.clone(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(signal: SignalKind) -> StabilityConfig {
        StabilityConfig {
            n: 96,
            k: 5,
            m: 48,
            d_base: 4,
            d_extra_grid: vec![0, 1, 3],
            trials: 4,
            master_seed: 3,
            signal,
            exponent: 1.5,
            dist: EntryDistribution::Gaussian,
            solver: SolverOptions::default(),
        }
    }

    #[test]
    fn sparse_signals_recover_without_extra_drops() {
        let rep = stability_experiment(&cfg(SignalKind::Sparse)).unwrap();
        let first = &rep.rows[0];
        assert_eq!(first.k_tilde, 2);
        assert!(first.max_error <= 1e-4, "{first:?}");
    }

    #[test]
    fn compressible_errors_are_finite() {
        let rep = stability_experiment(&cfg(SignalKind::Compressible)).unwrap();
        for row in &rep.rows {
            assert!(row.mean_error.is_finite() && row.mean_error > 0.0);
            assert!(row.c3_hat.unwrap().is_finite());
            assert_eq!(row.zero_tail_trials, 0);
        }
    }

    #[test]
    fn preconditions() {
        let mut c = cfg(SignalKind::Sparse);
        c.d_extra_grid = vec![4];
        assert!(stability_experiment(&c).is_err());
        c.d_extra_grid = vec![1];
        c.d_base = 47;
        assert!(stability_experiment(&c).is_err());
    }
}

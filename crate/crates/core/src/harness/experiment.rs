use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trial::{TrialInstance, TrialRecord};
use super::{DropPolicy, ExperimentConfig};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialResult {
    pub policy: DropPolicy,
    pub m: usize,
    pub trial: usize,
    pub d_max_trial: i64,
}

/// Aggregate over trials at one `m`: the smallest per-trial `d_max`, so a
/// drop level counts only when every trial survives it. −1 means some trial
/// failed without any drops.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub policy: DropPolicy,
    pub m: usize,
    pub d_max: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub points_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyFit {
    pub policy: DropPolicy,
    pub fit: Option<LinearFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialResult>,
    pub curves: Vec<CurvePoint>,
    pub fits: Vec<PolicyFit>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attempts: Vec<TrialRecord>,
}

impl ExperimentResult {
    /// Rebuild curves and fits from per-trial results.
    pub fn from_trials(config: ExperimentConfig, trials: Vec<TrialResult>, attempts: Vec<TrialRecord>) -> Self {
        let mut curves = Vec::new();
        for &policy in &config.policies {
            for &m in &config.m_grid {
                let d_max = trials.iter().filter(|t| t.policy == policy && t.m == m).map(|t| t.d_max_trial).min();
                if let Some(d_max) = d_max {
                    curves.push(CurvePoint { policy, m, d_max });
                }
            }
        }
        let fits = config
            .policies
            .iter()
            .map(|&policy| {
                let points: Vec<(f64, f64)> = curves
                    .iter()
                    .filter(|c| c.policy == policy && c.d_max > 0)
                    .map(|c| (c.m as f64, c.d_max as f64))
                    .collect();
                PolicyFit { policy, fit: fit_line(&points) }
            })
            .collect();
        Self { config, trials, curves, fits, attempts }
    }

    pub fn curve(&self, policy: DropPolicy) -> Vec<&CurvePoint> {
        self.curves.iter().filter(|c| c.policy == policy).collect()
    }

    pub fn fit(&self, policy: DropPolicy) -> Option<&LinearFit> {
        self.fits.iter().find(|f| f.policy == policy).and_then(|f| f.fit.as_ref())
    }

    /// Smallest `m` whose aggregate `d_max` is positive.
    pub fn onset(&self, policy: DropPolicy) -> Option<usize> {
        self.curve(policy).into_iter().find(|c| c.d_max > 0).map(|c| c.m)
    }
}

/// Least-squares line through `points`; `None` with fewer than two distinct
/// abscissae.
pub fn fit_line(points: &[(f64, f64)]) -> Option<LinearFit> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(LinearFit { slope, intercept: my - slope * mx, points_used: points.len() })
}

/// Runs every `(m, trial)` cell in parallel and aggregates per policy.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let cells: Vec<(usize, usize)> =
        cfg.m_grid.iter().flat_map(|&m| (0..cfg.trials).map(move |t| (m, t))).collect();
    let outcomes = cells
        .par_iter()
        .map(|&(m, trial)| -> Result<(Vec<TrialResult>, Vec<TrialRecord>)> {
            let inst = TrialInstance::draw(cfg, m, trial)?;
            let mut log = Vec::new();
            let mut results = Vec::with_capacity(cfg.policies.len());
            for &policy in &cfg.policies {
                let d_max_trial = inst.d_max(cfg, policy, cfg.record_attempts.then_some(&mut log))?;
                results.push(TrialResult { policy, m, trial, d_max_trial });
            }
            log::debug!("m = {m}, trial = {trial}: {:?}", results.iter().map(|r| r.d_max_trial).collect::<Vec<_>>());
            Ok((results, log))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut trials = Vec::new();
    let mut attempts = Vec::new();
    for (results, log) in outcomes {
        trials.extend(results);
        attempts.extend(log);
    }
    trials.sort_by_key(|t| (t.policy, t.m, t.trial));
    let result = ExperimentResult::from_trials(cfg.clone(), trials, attempts);
    for f in &result.fits {
        match &f.fit {
            Some(fit) => log::info!("{}: slope {:.4}, intercept {:.3} over {} points", f.policy, fit.slope, fit.intercept, fit.points_used),
            None => log::warn!("{}: fewer than two points with d_max > 0, no fit", f.policy),
        }
    }
    Ok(result)
}

use demolab::harness::{d_max_adversarial, d_max_single, stability_experiment, DropPolicy, ExperimentConfig, SignalKind, StabilityConfig};
use demolab::matrices::{EntryDistribution, MeasurementMatrix};
use demolab::recovery::{exact_recovery, l1_recover, omp_recover, random_sparse_signal, SolverOptions, DEFAULT_RECOVERY_TOL};

#[test]
fn basis_pursuit_recovers_almost_every_seed() {
    let opts = SolverOptions::default();
    let mut successes = 0;
    for seed in 0..100u64 {
        let phi = MeasurementMatrix::generate(64, 128, EntryDistribution::Gaussian, seed).unwrap();
        let signal = random_sparse_signal(128, 5, 1000 + seed).unwrap();
        let x = signal.dense();
        let result = l1_recover(&phi, &phi.apply(&x), &opts).unwrap().with_truth(&x).unwrap();
        if exact_recovery(&signal, &result, DEFAULT_RECOVERY_TOL).unwrap() {
            successes += 1;
        }
    }
    assert!(successes >= 99, "{successes} of 100");
}

#[test]
fn greedy_and_convex_solvers_agree() {
    let opts = SolverOptions::default();
    for seed in 0..20u64 {
        let phi = MeasurementMatrix::generate(64, 128, EntryDistribution::Gaussian, 500 + seed).unwrap();
        let signal = random_sparse_signal(128, 5, 600 + seed).unwrap();
        let x = signal.dense();
        let y = phi.apply(&x);
        let l1 = l1_recover(&phi, &y, &opts).unwrap().with_truth(&x).unwrap();
        let omp = omp_recover(&phi, &y, 5).unwrap().with_truth(&x).unwrap();
        assert!(l1.rel_error.unwrap() <= 1e-4 && omp.rel_error.unwrap() <= 1e-4, "seed {seed}");
        let support = |v: &[f64]| v.iter().enumerate().filter(|(_, a)| a.abs() > 1e-6).map(|(i, _)| i).collect::<Vec<_>>();
        assert_eq!(support(&l1.estimate), support(&omp.estimate));
    }
}

#[test]
fn adversary_never_beats_random_on_aggregate() {
    let cfg = ExperimentConfig {
        n: 128,
        k: 3,
        m_grid: vec![48],
        trials: 12,
        policies: vec![DropPolicy::RandomSingle, DropPolicy::AdversarialLargest],
        master_seed: 5,
        ..ExperimentConfig::figure1_small()
    };
    let mut below = 0;
    let mut above = 0;
    for trial in 0..cfg.trials {
        let single = d_max_single(48, &cfg, trial).unwrap();
        let adversarial = d_max_adversarial(48, &cfg, trial).unwrap();
        if adversarial < single {
            below += 1;
        } else if adversarial > single {
            above += 1;
        }
    }
    assert!(below > above, "adversarial below {below}, above {above}");
}

#[test]
fn stability_errors_grow_gracefully() {
    let cfg = StabilityConfig {
        n: 256,
        k: 13,
        m: 96,
        d_base: 8,
        d_extra_grid: vec![1, 3, 5],
        trials: 6,
        master_seed: 2,
        signal: SignalKind::Compressible,
        exponent: 1.5,
        dist: EntryDistribution::Gaussian,
        solver: SolverOptions::default(),
    };
    let report = stability_experiment(&cfg).unwrap();
    let errors: Vec<f64> = report.rows.iter().map(|r| r.mean_error).collect();
    assert!(errors.iter().all(|e| e.is_finite()));
    assert!(errors.windows(2).all(|w| w[1] >= w[0]), "{errors:?}");
    for row in &report.rows {
        assert!(row.c3_hat.unwrap().is_finite());
    }
}

//! Acceptance runner. Prints one PASS/FAIL line per criterion, plus
//! supplementary lines, and a final tally.
//!
//! `DEMOLAB_ACCEPT_FULL=reduced` runs the N = 2048 onset check with T = 20,
//! R = 100; `DEMOLAB_ACCEPT_FULL=paper` runs it with T = 100, R = 300.
//! Otherwise that criterion is reported as skipped. With
//! `DEMOLAB_ACCEPT_STRICT=1` any failure makes the process exit nonzero.

use std::time::Instant;

use demolab::concentration::{concentration_experiment, ConcentrationConfig};
use demolab::harness::{
    run_experiment, stability_experiment, DropPolicy, ExperimentConfig, SignalKind, StabilityConfig, TrialInstance,
};
use demolab::matrices::{augment_identity, range_projector, selector_diagonal, EntryDistribution, IndexSet, MeasurementMatrix};
use demolab::recovery::SolverOptions;
use demolab::riplab::{democracy_chain_check, exact_rip, inner_product_check, projected_rip_check};
use demolab::seed::{derive_seed, derived_rng};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use statrs::distribution::{Binomial, DiscreteCDF};

#[derive(Default)]
struct Tally {
    pass: usize,
    fail: usize,
    skip: usize,
}

impl Tally {
    fn report(&mut self, id: &str, ok: bool, detail: String) {
        if ok {
            self.pass += 1;
        } else {
            self.fail += 1;
        }
        println!("{} criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    }

    fn skip(&mut self, id: &str, detail: &str) {
        self.skip += 1;
        println!("SKIP criterion {id}: {detail}");
    }

    fn note(&self, id: &str, ok: bool, detail: String) {
        println!("     supplementary {id} [{}]: {detail}", if ok { "pass" } else { "fail" });
    }
}

fn gaussian(rows: usize, cols: usize, seed: u64) -> MeasurementMatrix {
    MeasurementMatrix::generate(rows, cols, EntryDistribution::Gaussian, seed).expect("valid dimensions")
}

fn figure1_small(t: &mut Tally) {
    let cfg = ExperimentConfig::figure1_small();
    let start = Instant::now();
    let res = run_experiment(&cfg).expect("experiment runs");
    let secs = start.elapsed().as_secs_f64();
    for p in &cfg.policies {
        let pts: Vec<String> = res.curve(*p).iter().map(|c| format!("{}:{}", c.m, c.d_max)).collect();
        println!("     {p}: {}", pts.join(" "));
    }
    let single = res.fit(DropPolicy::RandomSingle);
    let multi = res.fit(DropPolicy::RandomMulti);
    let s_slope = single.map(|f| f.slope);
    let m_slope = multi.map(|f| f.slope);
    t.report(
        "1a",
        s_slope.is_some_and(|s| (0.85..=1.15).contains(&s)),
        format!("random-drop slope {s_slope:?} in [0.85, 1.15] ({secs:.0} s)"),
    );
    t.report(
        "1b",
        matches!((m_slope, s_slope), (Some(m), Some(s)) if m < s),
        format!("all-of-R slope {m_slope:?} < random-drop slope {s_slope:?}"),
    );
    let s_on = res.onset(DropPolicy::RandomSingle);
    let m_on = res.onset(DropPolicy::RandomMulti);
    t.report(
        "1c",
        matches!((m_on, s_on), (Some(m), Some(s)) if m > s),
        format!("all-of-R onset {m_on:?} > random-drop onset {s_on:?}"),
    );
}

fn figure1_full(t: &mut Tally) {
    let mode = std::env::var("DEMOLAB_ACCEPT_FULL").unwrap_or_default();
    let (trials, r) = match mode.as_str() {
        "paper" => (100, 300),
        "reduced" => (20, 100),
        _ => {
            t.skip("2", "extended run; set DEMOLAB_ACCEPT_FULL=reduced or paper");
            return;
        }
    };
    // Onsets only depend on whether d = 1 survives, so the scan stops there.
    let cfg = ExperimentConfig { trials, r_submatrices: r, d_cap: Some(1), ..ExperimentConfig::figure1_paper() };
    let start = Instant::now();
    let res = run_experiment(&cfg).expect("experiment runs");
    let secs = start.elapsed().as_secs_f64();
    let s_on = res.onset(DropPolicy::RandomSingle);
    let m_on = res.onset(DropPolicy::RandomMulti);
    let ok = match (mode.as_str(), s_on, m_on) {
        ("paper", Some(s), Some(m)) => (68..=112).contains(&s) && (113..=187).contains(&m),
        (_, Some(s), Some(m)) => m as f64 >= 1.3 * s as f64,
        _ => false,
    };
    t.report("2", ok, format!("{mode}: random-drop onset {s_on:?}, all-of-R onset {m_on:?} ({secs:.0} s)"));
}

fn concentration(t: &mut Tally) {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (m, eta) in [(64, 0.5), (128, 0.5), (128, 0.3)] {
        let cfg = ConcentrationConfig {
            m,
            n: 16,
            eta,
            trials: 100_000,
            seed: 2009 + m as u64,
            w_norm: half,
            x_norm: half,
            dist: EntryDistribution::Gaussian,
        };
        let r = concentration_experiment(&cfg).expect("valid config");
        let tail = r.empirical_tail <= r.bound;
        let mean = r.mean_within(5.0);
        let var = r.cross_variance_rel_error() <= 0.10;
        ok &= tail && mean && var;
        parts.push(format!(
            "(M={m}, eta={eta}) tail {:.2e}<={:.2e} mean z={:.2} var err {:.1}%",
            r.empirical_tail,
            r.bound,
            (r.empirical_mean - r.target_mean) / r.mean_std_error,
            100.0 * r.cross_variance_rel_error()
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    t.report("3", ok && secs <= 60.0, format!("{}; {secs:.1} s", parts.join("; ")));
}

fn eigen_delta(phi: &DMatrix<f64>, order: usize) -> f64 {
    let n = phi.ncols();
    let mut worst: f64 = 0.0;
    let mut subset: Vec<usize> = (0..order).collect();
    loop {
        let cols = phi.select_columns(&subset);
        let eig = SymmetricEigen::new(cols.transpose() * &cols).eigenvalues;
        for &v in eig.iter() {
            worst = worst.max((v - 1.0).abs());
        }
        let Some(i) = (0..order).rev().find(|&i| subset[i] < n - order + i) else { return worst };
        subset[i] += 1;
        for j in i + 1..order {
            subset[j] = subset[j - 1] + 1;
        }
    }
}

fn rip_oracle(t: &mut Tally) {
    let mut rng = derived_rng(4, &[0]);
    let mut max_err: f64 = 0.0;
    for i in 0..20u64 {
        let m = rng.random_range(2..=12);
        let n = rng.random_range(4..=16);
        let order = rng.random_range(1..=3usize.min(n));
        let phi = gaussian(m, n, derive_seed(4, &[1, i]));
        let got = exact_rip(&phi, order).expect("small instance").delta;
        max_err = max_err.max((got - eigen_delta(phi.entries(), order)).abs());
    }
    t.report("4", max_err <= 1e-10, format!("20 instances, max |delta - oracle| = {max_err:.1e}"));
}

fn prip(t: &mut Tally) {
    let mut checked = 0;
    let mut clean = 0;
    let mut deltas = Vec::new();
    let mut errors = Vec::new();
    for i in 0..10u64 {
        let a = augment_identity(&gaussian(8, 12, derive_seed(5, &[i])));
        let delta = exact_rip(&a, 4).expect("budget").delta;
        deltas.push(delta);
        let lambda = IndexSet::new(if i % 2 == 0 { vec![1 + i as usize] } else { vec![2, 9 + i as usize] }, 20).unwrap();
        match projected_rip_check(&a, &lambda, 4, delta) {
            Ok(rep) => {
                checked += 1;
                clean += usize::from(rep.holds());
            }
            Err(e) => errors.push(e.to_string()),
        }
    }
    let min = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    t.report(
        "5",
        clean == 10,
        format!(
            "{clean}/10 clean, {checked} checkable; delta_A ranges from {min:.3}, so {} instances violate delta < 1",
            errors.len()
        ),
    );

    let mut clean = 0;
    let mut used = Vec::new();
    for i in 0..40u64 {
        let a = augment_identity(&gaussian(40, 4, derive_seed(55, &[i])));
        let delta = exact_rip(&a, 4).expect("budget").delta;
        if delta >= 1.0 {
            continue;
        }
        let n = used.len();
        let lambda = IndexSet::new(if n % 2 == 0 { vec![1 + n] } else { vec![2, 41 + n % 4] }, 44).unwrap();
        clean += usize::from(projected_rip_check(&a, &lambda, 4, delta).is_ok_and(|r| r.holds()));
        used.push(delta);
        if used.len() == 10 {
            break;
        }
    }
    let (lo, hi) = used.iter().fold((f64::INFINITY, 0f64), |(l, h), &d| (l.min(d), h.max(d)));
    t.note(
        "5",
        used.len() == 10 && clean == 10,
        format!("M=40, N=4, order 4, delta_A < 1: {clean}/{} clean, delta_A in [{lo:.3}, {hi:.3}]", used.len()),
    );
}

fn inner_products(t: &mut Tally) {
    let mut total = 0;
    let mut violations = 0;
    for i in 0..10u64 {
        let a = augment_identity(&gaussian(8, 12, derive_seed(5, &[i])));
        let delta = exact_rip(&a, 4).expect("budget").delta;
        let rep = inner_product_check(&a, 4, delta, 10_000, derive_seed(6, &[i])).expect("valid");
        total += rep.checked;
        violations += rep.total_violations;
    }
    t.report("6", violations == 0, format!("{violations} violations over {total} pairs"));
}

fn chain(t: &mut Tally) {
    let mut clean = 0;
    let mut notes = Vec::new();
    for i in 0..5u64 {
        let phi = gaussian(10, 14, derive_seed(7, &[i]));
        match democracy_chain_check(&phi, 2, 2) {
            Ok(r) => {
                clean += usize::from(r.result.holds());
                notes.push(format!("{}/{}", r.result.total_violations, r.result.checked));
            }
            Err(_) => {
                let delta = exact_rip(&augment_identity(&phi), 4).expect("budget").delta;
                notes.push(format!("delta_A={delta:.3}"));
            }
        }
    }
    t.report("7", clean == 5, format!("{clean}/5 clean; {}", notes.join(", ")));

    let mut clean = 0;
    let mut worst = Vec::new();
    for i in 0..40u64 {
        let phi = gaussian(40, 4, derive_seed(77, &[i]));
        if let Ok(r) = democracy_chain_check(&phi, 2, 2) {
            clean += usize::from(r.result.holds());
            worst.push(format!("{:.3}<={:.3}", r.worst_delta, r.bound));
        }
        if worst.len() == 5 {
            break;
        }
    }
    t.note(
        "7",
        worst.len() == 5 && clean == 5,
        format!("M=40, N=4, K=2, D=2, delta_A < 1: {clean}/{} clean; {}", worst.len(), worst.join(", ")),
    );
}

fn adversary(t: &mut Tally) {
    let m = 140;
    let cfg = ExperimentConfig {
        m_grid: vec![m],
        policies: vec![DropPolicy::RandomSingle, DropPolicy::AdversarialLargest],
        ..ExperimentConfig::figure1_small()
    };
    let (mut below, mut above) = (0u64, 0u64);
    let (mut sum_s, mut sum_a) = (0i64, 0i64);
    for trial in 100..200 {
        let inst = TrialInstance::draw(&cfg, m, trial).expect("valid");
        let s = inst.d_max(&cfg, DropPolicy::RandomSingle, None).expect("scan");
        let a = inst.d_max(&cfg, DropPolicy::AdversarialLargest, None).expect("scan");
        sum_s += s;
        sum_a += a;
        match a.cmp(&s) {
            std::cmp::Ordering::Less => below += 1,
            std::cmp::Ordering::Greater => above += 1,
            std::cmp::Ordering::Equal => {}
        }
    }
    let n = below + above;
    let p = if below == 0 { 1.0 } else { Binomial::new(0.5, n).map(|b| b.sf(below - 1)).unwrap_or(1.0) };
    let (mean_s, mean_a) = (sum_s as f64 / 100.0, sum_a as f64 / 100.0);
    t.report(
        "8",
        mean_a < mean_s && p < 0.01,
        format!("m={m}: mean adversarial {mean_a:.2} vs random {mean_s:.2}; {below} below, {above} above, sign-test p={p:.2e}"),
    );
}

fn stability(t: &mut Tally) {
    let cfg = StabilityConfig {
        n: 512,
        k: 13,
        m: 160,
        d_base: 20,
        d_extra_grid: vec![1, 3, 5],
        trials: 20,
        master_seed: 2009,
        signal: SignalKind::Compressible,
        exponent: 1.5,
        dist: EntryDistribution::Gaussian,
        solver: SolverOptions::default(),
    };
    let rep = stability_experiment(&cfg).expect("valid config");
    let errors: Vec<f64> = rep.rows.iter().map(|r| r.mean_error).collect();
    let c3: Vec<f64> = rep.rows.iter().filter_map(|r| r.c3_hat).collect();
    let finite = errors.iter().all(|e| e.is_finite()) && c3.len() == rep.rows.len() && c3.iter().all(|c| c.is_finite());
    let monotone = errors.windows(2).all(|w| w[1] >= w[0]);
    let spread = c3.iter().copied().fold(0.0, f64::max) / c3.iter().copied().fold(f64::INFINITY, f64::min);
    t.report(
        "9",
        finite && monotone && spread < 5.0,
        format!("mean errors {errors:.4?}, c3 {c3:.3?}, spread {spread:.2}x"),
    );
}

fn projector_identity(t: &mut Tally) {
    let mut max_err: f64 = 0.0;
    let mut count = 0;
    for i in 0..5u64 {
        let m = 4 + i as usize;
        let a = augment_identity(&gaussian(m, 2 * m, derive_seed(10, &[i])));
        for mask in 0u32..(1 << m) {
            let lambda: Vec<usize> = (0..m).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
            let p = range_projector(a.full(), &IndexSet::new(lambda.clone(), 3 * m).unwrap()).expect("identity columns");
            let want = selector_diagonal(&IndexSet::new(lambda, m).unwrap());
            max_err = max_err.max((p - want).abs().max());
            count += 1;
        }
    }
    t.report("10", max_err <= 1e-12, format!("{count} subsets, max entry error {max_err:.1e}"));
}

fn main() {
    let mut t = Tally::default();
    concentration(&mut t);
    rip_oracle(&mut t);
    prip(&mut t);
    inner_products(&mut t);
    chain(&mut t);
    projector_identity(&mut t);
    stability(&mut t);
    adversary(&mut t);
    figure1_full(&mut t);
    figure1_small(&mut t);
    println!("acceptance: {} passed, {} failed, {} skipped", t.pass, t.fail, t.skip);
    if t.fail > 0 && std::env::var("DEMOLAB_ACCEPT_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}

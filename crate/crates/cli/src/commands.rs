use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use demolab::concentration::{mgf_check, run_trials, summarize, write_trials_csv, ConcentrationConfig};
use demolab::harness::{
    gnuplot_script, run_experiment, stability_experiment, write_attempts_csv, write_fits_csv, write_results_csv,
    write_summary_csv, ExperimentConfig, StabilityConfig,
};
use demolab::matrices::io::{format_f64, load_matrix, read_csv, save_binary, save_csv};
use demolab::matrices::{augment_identity, EntryDistribution, IndexSet, MeasurementMatrix};
use demolab::recovery::{l1_recover, omp_recover, random_sparse_signal, SolverKind, SolverOptions};
use demolab::riplab::{
    c1_break_even, democracy_certificate_with_budget, democracy_chain_check, exact_rip, exact_rip_with_budget, inner_product_check,
    monte_carlo_rip, projected_rip_check_with_budget, theorem1_constants, DEFAULT_BUDGET,
};
use nalgebra::DVector;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::resolve;
use crate::exit::CliError;
use crate::manifest::RunManifest;
use crate::{
    ChainArgs, ConcArgs, ConstantsArgs, DemocracyArgs, ExperimentArgs, GenArgs, IpArgs, MgfArgs, PripArgs,
    RecoverArgs, RipArgs, StabilityArgs,
};

pub struct Context {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
}

impl Context {
    fn resolve<T: DeserializeOwned + Serialize>(&self, base: Value, flags: &impl Serialize) -> Result<(T, Value), CliError> {
        resolve(base, self.config.as_deref(), flags)
    }

    fn out_dir(&self) -> Result<&Path, CliError> {
        fs::create_dir_all(&self.out).map_err(|e| CliError::io(&self.out.display().to_string(), e))?;
        Ok(&self.out)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.path(name);
        File::create(&path).map(BufWriter::new).map_err(|e| CliError::io(&path.display().to_string(), e))
    }

    fn write_json(&self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::io(name, e))?;
        let path = self.path(name);
        fs::write(&path, text + "\n").map_err(|e| CliError::io(&path.display().to_string(), e))
    }

    fn manifest(&self, subcommand: &str, seed: Option<u64>, config: Value) -> Result<(), CliError> {
        RunManifest::new(subcommand, self.config.as_deref(), seed, &self.out, config).write(&self.out)
    }
}

fn load(input: &str) -> Result<MeasurementMatrix, CliError> {
    Ok(load_matrix(Path::new(input))?)
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GenConfig {
    rows: usize,
    cols: usize,
    #[serde(default)]
    dist: EntryDistribution,
    #[serde(default)]
    seed: u64,
}

pub fn gen(ctx: &Context, args: &GenArgs) -> Result<(), CliError> {
    let (cfg, resolved): (GenConfig, _) = ctx.resolve(json!({}), args)?;
    if cfg.rows == 0 || cfg.cols == 0 {
        return Err(CliError::usage("rows and cols must be at least 1"));
    }
    let phi = MeasurementMatrix::generate(cfg.rows, cfg.cols, cfg.dist, cfg.seed)?;
    ctx.out_dir()?;
    save_csv(phi.entries(), &ctx.path("phi.csv"))?;
    save_binary(phi.entries(), &ctx.path("phi.bin"))?;
    ctx.manifest("gen", Some(cfg.seed), resolved)?;
    println!("{}x{} {} matrix, seed {} -> {}", cfg.rows, cfg.cols, cfg.dist.name(), cfg.seed, ctx.out.display());
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RipConfig {
    input: String,
    order: usize,
    #[serde(default)]
    samples: Option<u64>,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_budget")]
    budget: u64,
}

pub fn rip(ctx: &Context, args: &RipArgs) -> Result<(), CliError> {
    let (cfg, resolved): (RipConfig, _) = ctx.resolve(json!({}), args)?;
    let phi = load(&cfg.input)?;
    let report = match cfg.samples {
        Some(samples) => monte_carlo_rip(&phi, cfg.order, samples, cfg.seed)?,
        None => exact_rip_with_budget(&phi, cfg.order, cfg.budget)?,
    };
    ctx.out_dir()?;
    ctx.write_json("rip.json", &report)?;
    ctx.manifest("rip", Some(cfg.seed), resolved)?;
    let kind = if report.estimated { "sampled lower bound" } else { "exact" };
    println!("order {} delta {:.6} ({kind})", report.order, report.delta);
    println!("  eigenvalue range [{:.6}, {:.6}]", report.low_bound, report.high_bound);
    println!("  worst supports: low {:?}, high {:?}", report.worst_low_subset.indices(), report.worst_high_subset.indices());
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DemocracyConfig {
    input: String,
    m_tilde: usize,
    order: usize,
    delta_bound: f64,
    #[serde(default = "default_budget")]
    budget: u64,
}

pub fn democracy_cert(ctx: &Context, args: &DemocracyArgs) -> Result<(), CliError> {
    let (cfg, resolved): (DemocracyConfig, _) = ctx.resolve(json!({}), args)?;
    let phi = load(&cfg.input)?;
    let report = democracy_certificate_with_budget(&phi, cfg.m_tilde, cfg.order, cfg.delta_bound, cfg.budget)?;
    ctx.out_dir()?;
    ctx.write_json("democracy.json", &report)?;
    ctx.manifest("democracy-cert", None, resolved)?;
    println!(
        "({}, {}, {})-democracy {}: worst delta {:.6} on rows {:?}",
        report.m_tilde,
        report.order,
        report.delta_bound,
        if report.holds { "holds" } else { "fails" },
        report.worst_delta,
        report.worst_gamma.indices()
    );
    Ok(())
}

pub fn conc(ctx: &Context, args: &ConcArgs) -> Result<(), CliError> {
    let base = json!({"eta": 0.5, "trials": 100_000, "seed": 0, "w_norm": 1.0, "x_norm": 1.0});
    let (cfg, resolved): (ConcentrationConfig, _) = ctx.resolve(base, args)?;
    let trials = run_trials(&cfg)?;
    let report = summarize(&cfg, &trials)?;
    ctx.out_dir()?;
    ctx.write_json("tail.json", &report)?;
    if args.per_trial {
        write_trials_csv(&cfg, &trials, ctx.create("trials.csv")?)?;
    }
    ctx.manifest("conc", Some(cfg.seed), resolved)?;
    println!("M={} N={} eta={} trials={}", cfg.m, cfg.n, cfg.eta, report.trials);
    println!(
        "  mean {:.6} (target {:.6}, s.e. {:.2e})",
        report.empirical_mean, report.target_mean, report.mean_std_error
    );
    println!("  tail {:.3e} <= bound {:.3e}: {}", report.empirical_tail, report.bound, report.empirical_tail <= report.bound);
    println!(
        "  cross-term variance {:.6} (target {:.6})",
        report.cross_term_variance, report.cross_term_variance_target
    );
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MgfConfig {
    #[serde(default)]
    dist: EntryDistribution,
    c: f64,
    t_grid: Vec<f64>,
    samples: u64,
    #[serde(default)]
    seed: u64,
}

pub fn mgf(ctx: &Context, args: &MgfArgs) -> Result<(), CliError> {
    let base = json!({"c": 1.0, "t_grid": [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0], "samples": 100_000});
    let (cfg, resolved): (MgfConfig, _) = ctx.resolve(base, args)?;
    let report = mgf_check(cfg.dist, cfg.c, &cfg.t_grid, cfg.samples, cfg.seed)?;
    ctx.out_dir()?;
    ctx.write_json("mgf.json", &report)?;
    ctx.manifest("mgf", Some(cfg.seed), resolved)?;
    for p in &report.points {
        println!("t={:>6} E[e^tX]={:.6} (s.e. {:.1e}) bound {:.6}", p.t, p.estimate, p.std_error, p.bound);
    }
    println!("violations: {}", report.result.total_violations);
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecoverConfig {
    input: String,
    #[serde(default)]
    y: Option<String>,
    #[serde(default)]
    k: Option<usize>,
    #[serde(default)]
    signal_seed: u64,
    #[serde(default = "default_solver_kind")]
    solver_kind: SolverKind,
    #[serde(default)]
    omp_k: Option<usize>,
    #[serde(default)]
    solver: SolverOptions,
}

fn default_solver_kind() -> SolverKind {
    SolverKind::L1
}

pub fn recover(ctx: &Context, args: &RecoverArgs) -> Result<(), CliError> {
    let (cfg, resolved): (RecoverConfig, _) = ctx.resolve(json!({}), args)?;
    let phi = load(&cfg.input)?;
    let (y, truth) = match (&cfg.y, cfg.k) {
        (Some(path), None) => {
            let file = File::open(path).map_err(|e| CliError::io(path, e))?;
            let raw = read_csv(file)?;
            (DVector::from_iterator(raw.len(), raw.transpose().iter().copied()), None)
        }
        (None, Some(k)) => {
            let signal = random_sparse_signal(phi.cols(), k, cfg.signal_seed)?;
            let x = signal.dense();
            (phi.apply(&x), Some(x))
        }
        _ => return Err(CliError::usage("give exactly one of --y or --k")),
    };
    let result = match cfg.solver_kind {
        SolverKind::L1 => l1_recover(&phi, &y, &cfg.solver)?,
        SolverKind::Omp => {
            let k = cfg.omp_k.or(cfg.k).ok_or_else(|| CliError::usage("OMP needs --omp-k or --k"))?;
            omp_recover(&phi, &y, k)?
        }
    };
    let result = match &truth {
        Some(x) => result.with_truth(x)?,
        None => result,
    };
    ctx.out_dir()?;
    ctx.write_json("recovery.json", &result)?;
    let mut est = String::new();
    for v in &result.estimate {
        est.push_str(&format_f64(*v));
        est.push('\n');
    }
    fs::write(ctx.path("estimate.csv"), est).map_err(|e| CliError::io("estimate.csv", e))?;
    ctx.manifest("recover", Some(cfg.signal_seed), resolved)?;
    println!(
        "{:?} solver: {} iterations, converged {}, residual {:.3e}",
        result.solver, result.iterations, result.converged, result.residual
    );
    if let Some(err) = result.rel_error {
        println!("  relative error {err:.3e}");
    }
    Ok(())
}

pub fn experiment(ctx: &Context, args: &ExperimentArgs) -> Result<(), CliError> {
    let base = match &args.preset {
        Some(name) => ExperimentConfig::preset(name)?,
        None => ExperimentConfig::figure1_small(),
    };
    let base = serde_json::to_value(base).map_err(|e| CliError::io("config", e))?;
    let mut flags = serde_json::to_value(args).map_err(|e| CliError::io("flags", e))?;
    if args.no_shortcut {
        flags["certified_shortcut"] = json!(false);
    }
    if args.record_attempts {
        flags["record_attempts"] = json!(true);
    }
    if let Some(policies) = &args.policies {
        for p in policies {
            p.parse::<demolab::harness::DropPolicy>()?;
        }
    }
    let (cfg, resolved): (ExperimentConfig, _) = ctx.resolve(base, &flags)?;
    let result = run_experiment(&cfg)?;
    ctx.out_dir()?;
    write_results_csv(&result, ctx.create("results.csv")?)?;
    write_summary_csv(&result, ctx.create("summary.csv")?)?;
    write_fits_csv(&result.fits, ctx.create("fits.csv")?)?;
    let onsets: Vec<Value> =
        cfg.policies.iter().map(|&p| json!({"policy": p, "onset": result.onset(p)})).collect();
    ctx.write_json("fits.json", &json!({"fits": result.fits, "onsets": onsets}))?;
    fs::write(ctx.path("figure1.gp"), gnuplot_script("summary.csv", &result.fits))
        .map_err(|e| CliError::io("figure1.gp", e))?;
    if cfg.record_attempts {
        write_attempts_csv(&result.attempts, ctx.create("attempts.csv")?)?;
    }
    ctx.manifest("experiment", Some(cfg.master_seed), resolved)?;

    println!("N={} K={} trials={} R={}", cfg.n, cfg.k, cfg.trials, cfg.r_submatrices);
    print!("{:>6}", "m");
    for p in &cfg.policies {
        print!(" {:>20}", p.name());
    }
    println!();
    for &m in &cfg.m_grid {
        print!("{m:>6}");
        for &p in &cfg.policies {
            let d = result.curves.iter().find(|c| c.policy == p && c.m == m).map(|c| c.d_max);
            print!(" {:>20}", d.map(|d| d.to_string()).unwrap_or_default());
        }
        println!();
    }
    for f in &result.fits {
        let onset = result.onset(f.policy).map(|m| m.to_string()).unwrap_or_else(|| "none".into());
        match &f.fit {
            Some(fit) => println!(
                "{}: slope {:.4}, intercept {:.2}, onset {onset}",
                f.policy, fit.slope, fit.intercept
            ),
            None => println!("{}: fewer than two points with d_max > 0, onset {onset}", f.policy),
        }
    }
    Ok(())
}

pub fn stability(ctx: &Context, args: &StabilityArgs) -> Result<(), CliError> {
    let base = json!({
        "n": 512, "k": 13, "m": 160, "d_base": 20, "d_extra_grid": [1, 3, 5],
        "trials": 20, "master_seed": 2009
    });
    let (cfg, resolved): (StabilityConfig, _) = ctx.resolve(base, args)?;
    let report = stability_experiment(&cfg)?;
    ctx.out_dir()?;
    ctx.write_json("stability.json", &report)?;
    let mut out = csv::Writer::from_writer(ctx.create("stability.csv")?);
    let io = |e: csv::Error| CliError::io("stability.csv", e);
    out.write_record(["d_extra", "k_tilde", "mean_error", "max_error", "c3_hat", "zero_tail_trials", "unconverged"])
        .map_err(io)?;
    for r in &report.rows {
        out.write_record([
            r.d_extra.to_string(),
            r.k_tilde.to_string(),
            format_f64(r.mean_error),
            format_f64(r.max_error),
            r.c3_hat.map(format_f64).unwrap_or_default(),
            r.zero_tail_trials.to_string(),
            r.unconverged.to_string(),
        ])
        .map_err(io)?;
    }
    out.flush().map_err(|e| CliError::io("stability.csv", e))?;
    ctx.manifest("stability", Some(cfg.master_seed), resolved)?;
    for r in &report.rows {
        let c3 = r.c3_hat.map(|c| format!("{c:.3}")).unwrap_or_else(|| "-".into());
        println!(
            "extra {:>3} K~ {:>3} mean error {:.4e} max {:.4e} c3 {c3} unconverged {}",
            r.d_extra, r.k_tilde, r.mean_error, r.max_error, r.unconverged
        );
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantsConfig {
    k: usize,
    d: usize,
    n: usize,
    c1: f64,
    delta: f64,
}

pub fn constants(ctx: &Context, args: &ConstantsArgs) -> Result<(), CliError> {
    let (cfg, resolved): (ConstantsConfig, _) = ctx.resolve(json!({}), args)?;
    let c = theorem1_constants(cfg.k, cfg.d, cfg.n, cfg.c1, cfg.delta)?;
    ctx.out_dir()?;
    ctx.write_json("constants.json", &c)?;
    ctx.manifest("constants", None, resolved)?;
    println!("M = {:.3} after {} iterations", c.m_required, c.iterations);
    println!("C2 = {:.6e}, epsilon = {:.6}, eta = {:.6}", c.c2, c.epsilon, c.eta);
    if c.c2 > 0.0 {
        println!("success probability >= {:.6}", c.success_probability());
    } else {
        println!("C2 <= 0: the probability bound is vacuous (C1 must exceed {:.1})", c1_break_even(c.delta));
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PripConfig {
    input: String,
    lambda: Vec<usize>,
    order: usize,
    #[serde(default)]
    delta: Option<f64>,
    #[serde(default = "default_budget")]
    budget: u64,
}

pub fn prip(ctx: &Context, args: &PripArgs) -> Result<(), CliError> {
    let (cfg, resolved): (PripConfig, _) = ctx.resolve(json!({}), args)?;
    let a = augment_identity(&load(&cfg.input)?);
    let lambda = IndexSet::new(cfg.lambda.clone(), a.full().ncols())?;
    let delta = match cfg.delta {
        Some(d) => d,
        None => exact_rip_with_budget(&a, cfg.order, cfg.budget)?.delta,
    };
    let report = projected_rip_check_with_budget(&a, &lambda, cfg.order, delta, cfg.budget)?;
    ctx.out_dir()?;
    ctx.write_json("prip.json", &json!({"delta": delta, "report": report}))?;
    ctx.manifest("prip", None, resolved)?;
    println!(
        "delta {delta:.6}: {} supports checked, {} violations, min margin {:.3e}",
        report.checked, report.total_violations, report.min_margin
    );
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IpConfig {
    input: String,
    order: usize,
    #[serde(default)]
    delta: Option<f64>,
    #[serde(default = "default_ip_samples")]
    samples: u64,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    augment: bool,
}

fn default_ip_samples() -> u64 {
    10_000
}

pub fn ip(ctx: &Context, args: &IpArgs) -> Result<(), CliError> {
    let (cfg, resolved): (IpConfig, _) = ctx.resolve(json!({}), args)?;
    let phi = load(&cfg.input)?;
    let a = if cfg.augment { augment_identity(&phi).full().clone() } else { phi.into_entries() };
    let delta = match cfg.delta {
        Some(d) => d,
        None => exact_rip(&a, cfg.order)?.delta,
    };
    let report = inner_product_check(&a, cfg.order, delta, cfg.samples, cfg.seed)?;
    ctx.out_dir()?;
    ctx.write_json("ip.json", &json!({"delta": delta, "report": report}))?;
    ctx.manifest("ip", Some(cfg.seed), resolved)?;
    println!(
        "delta {delta:.6}: {} pairs checked, {} violations, min margin {:.3e}",
        report.checked, report.total_violations, report.min_margin
    );
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainConfig {
    input: String,
    k: usize,
    d: usize,
}

pub fn chain(ctx: &Context, args: &ChainArgs) -> Result<(), CliError> {
    let (cfg, resolved): (ChainConfig, _) = ctx.resolve(json!({}), args)?;
    let phi = load(&cfg.input)?;
    let report = democracy_chain_check(&phi, cfg.k, cfg.d)?;
    ctx.out_dir()?;
    ctx.write_json("chain.json", &report)?;
    ctx.manifest("chain", None, resolved)?;
    println!(
        "delta_A {:.6} bound {:.6} worst row-subset delta {:.6}: {} of {} row sets violate",
        report.delta_augmented, report.bound, report.worst_delta, report.result.total_violations, report.result.checked
    );
    Ok(())
}

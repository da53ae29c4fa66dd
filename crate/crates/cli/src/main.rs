//! `demolab` command-line front end.

mod commands;
mod config;
mod exit;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use exit::CliError;

/// Measurement democracy laboratory: random ensembles, isometry oracles,
/// concentration checks, sparse recovery and drop experiments.
///
/// Exit codes: 0 success, 1 I/O failure, 2 usage or precondition error,
/// 3 numeric failure, 4 enumeration budget exceeded.
#[derive(Debug, Parser)]
#[command(name = "demolab", version)]
pub struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Config file: JSON object, flat `key = value` lines, or a manifest.json
    /// from an earlier run. Explicit flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "demolab-out")]
    out: PathBuf,

    /// Increase log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a random measurement matrix and save it as CSV and binary.
    Gen(GenArgs),
    /// Isometry constant of a stored matrix (exhaustive, or sampled with --samples).
    Rip(RipArgs),
    /// Worst-case isometry constant over row deletions.
    DemocracyCert(DemocracyArgs),
    /// Monte Carlo tail study of ‖[I Φ]u‖².
    Conc(ConcArgs),
    /// Moment generating function check against a Gaussian envelope.
    Mgf(MgfArgs),
    /// Recover a sparse signal by basis pursuit or OMP.
    Recover(RecoverArgs),
    /// Drop experiment over a grid of measurement counts.
    Experiment(ExperimentArgs),
    /// Recovery error when more rows are dropped than the democracy level.
    Stability(StabilityArgs),
    /// Measurement count and constants of the democracy theorem.
    Constants(ConstantsArgs),
    /// Projected isometry check on [I Φ] with columns Λ projected out.
    Prip(PripArgs),
    /// Inner-product preservation check on sampled sparse pairs.
    Ip(IpArgs),
    /// End-to-end check: isometry of [I Φ] bounds every row deletion of Φ.
    Chain(ChainArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long, value_parser = positive)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[arg(long, value_parser = positive)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    /// gaussian, rademacher or uniform.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct RipArgs {
    /// Matrix file (.csv, otherwise binary).
    #[arg(long = "in")]
    #[serde(rename = "input", skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[arg(long, value_parser = positive)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    /// Sample this many supports instead of enumerating all of them.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Largest number of subsets an exhaustive run may visit.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct DemocracyArgs {
    #[arg(long = "in")]
    #[serde(rename = "input", skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    /// Rows kept in every checked submatrix.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_tilde: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_bound: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct ConcArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_norm: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_norm: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<String>,
    /// Also write every trial's deviations to trials.csv.
    #[arg(long)]
    #[serde(skip)]
    pub per_trial: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct MgfArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Comma-separated values of t.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct SolverFlags {
    #[arg(long)]
    #[serde(rename = "solver.feas_tol", skip_serializing_if = "Option::is_none")]
    pub feas_tol: Option<f64>,
    #[arg(long)]
    #[serde(rename = "solver.obj_tol", skip_serializing_if = "Option::is_none")]
    pub obj_tol: Option<f64>,
    #[arg(long)]
    #[serde(rename = "solver.max_iter", skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[arg(long)]
    #[serde(rename = "solver.rho", skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[arg(long)]
    #[serde(rename = "solver.polish_every", skip_serializing_if = "Option::is_none")]
    pub polish_every: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct RecoverArgs {
    #[arg(long = "in")]
    #[serde(rename = "input", skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    /// Measurement vector file (CSV, one value per line or one row).
    #[arg(long, conflicts_with = "k")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<String>,
    /// Draw a random k-sparse unit-norm signal and measure it.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal_seed: Option<u64>,
    /// l1 or omp.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver_kind: Option<String>,
    /// Sparsity used by OMP when no signal is drawn.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omp_k: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Args, Serialize)]
pub struct ExperimentArgs {
    /// figure1-small or figure1-paper.
    #[arg(long)]
    #[serde(skip)]
    pub preset: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Comma-separated list or start:stop:step.
    #[arg(long, value_parser = parse_grid)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_grid: Option<Grid>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_submatrices: Option<usize>,
    /// Comma-separated: random_single, random_multi, adversarial_largest.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policies: Option<Vec<String>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recovery_tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_cap: Option<usize>,
    /// Run the solver on every attempt instead of deciding by certificates.
    #[arg(long)]
    #[serde(skip)]
    pub no_shortcut: bool,
    /// Write every recovery attempt to attempts.csv.
    #[arg(long)]
    #[serde(skip)]
    pub record_attempts: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct Grid(pub Vec<usize>);

fn parse_grid(text: &str) -> Result<Grid, String> {
    let bad = || format!("'{text}' is not a list or start:stop:step range");
    if let Some((start, rest)) = text.split_once(':') {
        let (stop, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let start: usize = start.trim().parse().map_err(|_| bad())?;
        let stop: usize = stop.trim().parse().map_err(|_| bad())?;
        let step: usize = step.trim().parse().map_err(|_| bad())?;
        if step == 0 || stop < start {
            return Err(bad());
        }
        return Ok(Grid((start..=stop).step_by(step).collect()));
    }
    text.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>().map(Grid)
}

#[derive(Debug, Args, Serialize)]
pub struct StabilityArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_base: Option<usize>,
    /// Comma-separated extra drop counts.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_extra_grid: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    /// sparse or compressible.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverFlags,
}

#[derive(Debug, Args, Serialize)]
pub struct ConstantsArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct PripArgs {
    #[arg(long = "in")]
    #[serde(rename = "input", skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    /// Comma-separated 1-based columns of [I Φ] to project out.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<usize>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    /// Isometry constant of [I Φ]; computed exactly when omitted.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct IpArgs {
    #[arg(long = "in")]
    #[serde(rename = "input", skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    /// Isometry constant; computed exactly when omitted.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Check [I Φ] instead of Φ.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub augment: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ChainArgs {
    #[arg(long = "in")]
    #[serde(rename = "input", skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
}

fn positive(text: &str) -> Result<usize, String> {
    match text.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::usage("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::usage(format!("--jobs: {e}")))?;
    }
    let ctx = commands::Context { config: cli.config.clone(), out: cli.out.clone() };
    match &cli.command {
        Command::Gen(a) => commands::gen(&ctx, a),
        Command::Rip(a) => commands::rip(&ctx, a),
        Command::DemocracyCert(a) => commands::democracy_cert(&ctx, a),
        Command::Conc(a) => commands::conc(&ctx, a),
        Command::Mgf(a) => commands::mgf(&ctx, a),
        Command::Recover(a) => commands::recover(&ctx, a),
        Command::Experiment(a) => commands::experiment(&ctx, a),
        Command::Stability(a) => commands::stability(&ctx, a),
        Command::Constants(a) => commands::constants(&ctx, a),
        Command::Prip(a) => commands::prip(&ctx, a),
        Command::Ip(a) => commands::ip(&ctx, a),
        Command::Chain(a) => commands::chain(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging(cli.verbose);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code as u8)
        }
    }
}

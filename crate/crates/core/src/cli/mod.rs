//! Command-line front end. [`main`] parses arguments, dispatches to one subcommand and
//! maps the outcome onto the exit-code contract:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, UNIQUE / UNIQUE_LINEAR |
//! | 1 | usage error |
//! | 2 | negative finding: NON_UNIQUE / DEGENERATE / rejected input |
//! | 3 | INCONCLUSIVE |

pub mod io;
mod reproduce;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::bounds::{self, AlphaSolution, AlphaUpperRow, BoundsRow};
use crate::classical::{counterexample_pair, ClassicalError, CounterexamplePair};
use crate::feasibility::{genericity_survey, uniqueness_probe, OracleVerdict, ProjectionConfig, RunSummary};
use crate::tensor::{AmplitudeTensor, PartySignature, SeededRng, TolPolicy};
use crate::uniqueness::{
    check_linear_uniqueness, grouped_marginal_subsets, linear_survey, sequential_elimination_trace,
    tripartite_grouping, EliminationTrace, LinearVerdict, TripartiteShape,
};
use io::{emit, format_subsets, parse_subsets, to_csv, to_json, MatrixJson, Report, StateFile};
pub use reproduce::{reproduce, AcceptanceCheck, ReproduceConfig, ReproduceResult};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn usage(e: impl std::fmt::Display) -> Self {
        Self::Usage(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Negative,
    Inconclusive,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Negative => 2,
            Outcome::Inconclusive => 3,
        }
    }

    fn worst(self, other: Self) -> Self {
        use Outcome::*;
        match (self, other) {
            (Negative, _) | (_, Negative) => Negative,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Success,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qmarginals",
    version,
    about = "Uniqueness of pure states given their reduced density matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a pure state (Haar-random or GHZ) as a JSON state file.
    Sample(SampleArgs),
    /// Decide whether a state is fixed by the given marginals.
    Check(CheckArgs),
    /// Run the uniqueness test on many Haar-random states.
    Survey(SurveyArgs),
    /// Parameter-counting bounds and the lower/upper fraction tables.
    Bounds(BoundsArgs),
    /// Two joint distributions sharing every (n-1)-variable marginal.
    Classical(ClassicalArgs),
    /// Every experiment plus pass/fail acceptance checks, in one report.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Linear,
    Oracle,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Haar,
    Ghz,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    /// Number of parties.
    #[arg(long)]
    pub n: Option<usize>,
    /// Local dimension of every party.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Explicit per-party dimensions, e.g. "4,2,2" (overrides --n/--d).
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
}

impl ShapeArgs {
    fn signature(&self) -> Result<PartySignature, CliError> {
        match (&self.dims, self.n) {
            (Some(dims), _) => PartySignature::new(dims.clone()).map_err(CliError::usage),
            (None, Some(n)) => PartySignature::uniform(n, self.d).map_err(CliError::usage),
            (None, None) => Err(CliError::Usage("give --n (with --d) or --dims".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Dykstra stopping tolerance (trace-norm step and marginal residual).
    #[arg(long, default_value_t = 1e-9)]
    pub tol_converge: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    /// Trace distance beyond which a state counts as different.
    #[arg(long, default_value_t = 1e-4)]
    pub distinctness: f64,
    #[arg(long, default_value_t = 0.1)]
    pub perturbation: f64,
    /// Always run the multi-start search, even when the support face pins the state.
    #[arg(long)]
    pub no_face_certificate: bool,
}

impl OracleArgs {
    fn config(&self, seed: u64) -> Result<ProjectionConfig, CliError> {
        let config = ProjectionConfig {
            max_iterations: self.max_iter,
            convergence_tol: self.tol_converge,
            distinctness_tol: self.distinctness,
            restarts: self.restarts,
            perturbation_scale: self.perturbation,
            seed,
            face_certificate: !self.no_face_certificate,
        };
        config.validate().map_err(CliError::usage)?;
        Ok(config)
    }
}

fn rank_policy(tol: f64) -> Result<TolPolicy, CliError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(CliError::Usage(format!("--tol-rank must be positive (got {tol})")));
    }
    Ok(TolPolicy::Relative(tol))
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = StateKind::Haar)]
    pub kind: StateKind,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// JSON state file (see `sample`); otherwise a Haar state is drawn from --seed.
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Both)]
    pub mode: Mode,
    /// Constrained party groups, e.g. "01,02,12". Defaults to the AB/AC groups of the
    /// tripartite grouping in linear/both mode, and all (n-1)-party groups otherwise.
    #[arg(long)]
    pub subsets: Option<String>,
    /// Relative singular-value cut for the linear rank test.
    #[arg(long, default_value_t = 1e-8)]
    pub tol_rank: f64,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SurveyArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `oracle` runs the feasibility probe, `linear` the tripartite rank test.
    #[arg(long, value_enum, default_value_t = Mode::Oracle)]
    pub mode: Mode,
    #[arg(long)]
    pub subsets: Option<String>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_rank: f64,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Sweep the lower-bound root over d..=d-max.
    #[arg(long)]
    pub d_max: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
    /// Largest m of the (3m+1)-party upper-bound table.
    #[arg(long, default_value_t = 5)]
    pub m: usize,
    /// Root-finding tolerance.
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ClassicalArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Master seed; every experiment derives its own stream from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Haar trials for the 3-qubit oracle survey.
    #[arg(long, default_value_t = 20)]
    pub trials_oracle: usize,
    /// Haar trials for the 4-qubit linear survey.
    #[arg(long, default_value_t = 200)]
    pub trials_linear: usize,
    /// (4,2,2) instances for the linear-vs-oracle cross-check.
    #[arg(long, default_value_t = 50)]
    pub trials_cross: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses `std::env::args`, runs, and returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(outcome) => outcome.code(),
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Sample(args) => cmd_sample(&args),
        Command::Check(args) => cmd_check(&args),
        Command::Survey(args) => cmd_survey(&args),
        Command::Bounds(args) => cmd_bounds(&args),
        Command::Classical(args) => cmd_classical(&args),
        Command::Reproduce(args) => cmd_reproduce(&args),
    }
}

fn json_only(output: &OutputArgs, command: &str) -> Result<(), CliError> {
    if output.format == Format::Csv {
        return Err(CliError::Usage(format!("{command} reports are JSON only")));
    }
    Ok(())
}

fn ms(clock: Instant) -> f64 {
    clock.elapsed().as_secs_f64() * 1e3
}

pub fn cmd_sample(args: &SampleArgs) -> Result<Outcome, CliError> {
    let signature = args.shape.signature()?;
    let state = match args.kind {
        StateKind::Haar => AmplitudeTensor::haar_random(&signature, &mut SeededRng::new(args.seed)),
        StateKind::Ghz => {
            let one = Complex64::new(1.0, 0.0);
            AmplitudeTensor::ghz(signature, one, one).map_err(CliError::usage)?
        }
    };
    let file = StateFile::from_state(&state);
    let text = match args.output.format {
        Format::Json => to_json(&file)?,
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                index: usize,
                re: f64,
                im: f64,
            }
            to_csv(
                file.amplitudes
                    .iter()
                    .enumerate()
                    .map(|(index, &(re, im))| Row { index, re, im }),
            )?
        }
    };
    emit(&text, args.output.out.as_deref())?;
    Ok(Outcome::Success)
}

#[derive(Debug, Serialize)]
struct CheckConfig {
    source: String,
    signature: PartySignature,
    mode: Mode,
    subsets: Option<String>,
    tol_rank: f64,
    oracle: Option<ProjectionConfig>,
}

#[derive(Debug, Serialize)]
pub struct LinearReport {
    pub grouping: [usize; 3],
    pub shape: TripartiteShape,
    pub verdict: LinearVerdict,
    pub null_dim: usize,
    pub identity_pattern_match: bool,
    pub residual: f64,
    pub pattern_kernel_residual: f64,
    pub singular_values: Vec<f64>,
    /// Present when the shape satisfies `M >= N + P - 1`.
    pub elimination: Option<EliminationTrace>,
}

#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub subsets: Vec<Vec<usize>>,
    pub verdict: OracleVerdict,
    pub kernel_dim: usize,
    pub face_dim: usize,
    pub analytic: bool,
    pub max_marginal_residual: f64,
    pub pairwise_distances: Vec<f64>,
    pub runs: Vec<RunSummary>,
    /// The target first, then any distinct marginal-consistent states found.
    pub witnesses: Vec<MatrixJson>,
}

pub fn linear_report(state: &AmplitudeTensor, policy: TolPolicy) -> Result<LinearReport, CliError> {
    let grouping = tripartite_grouping(state.signature()).map_err(|e| {
        CliError::Usage(format!(
            "linear mode needs 3 parties or 3m+1 parties of equal dimension: {e}"
        ))
    })?;
    let grouped = state.regroup(&grouping).map_err(CliError::usage)?;
    let v = check_linear_uniqueness(&grouped, policy).map_err(CliError::usage)?;
    let elimination = if v.shape.satisfies_bound() {
        Some(sequential_elimination_trace(&grouped).map_err(CliError::usage)?)
    } else {
        None
    };
    Ok(LinearReport {
        grouping,
        shape: v.shape,
        verdict: v.verdict,
        null_dim: v.null_dim,
        identity_pattern_match: v.identity_pattern_match,
        residual: v.residual,
        pattern_kernel_residual: v.pattern_kernel_residual,
        singular_values: v.singular_values,
        elimination,
    })
}

pub fn oracle_report(
    state: &AmplitudeTensor,
    subsets: &[Vec<usize>],
    config: &ProjectionConfig,
) -> Result<OracleReport, CliError> {
    let v = uniqueness_probe(state, subsets, config).map_err(CliError::usage)?;
    Ok(OracleReport {
        subsets: subsets.to_vec(),
        verdict: v.verdict,
        kernel_dim: v.kernel_dim,
        face_dim: v.face_dim,
        analytic: v.analytic,
        max_marginal_residual: v.max_marginal_residual,
        pairwise_distances: v.pairwise_distances,
        runs: v.runs,
        witnesses: v.witnesses.iter().map(|w| MatrixJson::from(w.matrix())).collect(),
    })
}

/// All `(n-1)`-party groups, or the single group of everything for one party.
fn all_but_one(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![0]];
    }
    (0..n)
        .rev()
        .map(|skip| (0..n).filter(|&p| p != skip).collect())
        .collect()
}

fn resolve_subsets(
    given: Option<&str>,
    signature: &PartySignature,
    prefer_grouping: bool,
) -> Result<Vec<Vec<usize>>, CliError> {
    let subsets = match given {
        Some(text) => parse_subsets(text)?,
        None => match tripartite_grouping(signature) {
            Ok(groups) if prefer_grouping => grouped_marginal_subsets(groups).to_vec(),
            _ => all_but_one(signature.num_parties()),
        },
    };
    subsets
        .iter()
        .map(|s| signature.normalize_subset(s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("invalid --subsets: {e}")))
}

fn linear_outcome(v: LinearVerdict) -> Outcome {
    match v {
        LinearVerdict::UniqueLinear => Outcome::Success,
        LinearVerdict::Degenerate => Outcome::Negative,
    }
}

fn oracle_outcome(v: OracleVerdict) -> Outcome {
    match v {
        OracleVerdict::Unique => Outcome::Success,
        OracleVerdict::NonUnique => Outcome::Negative,
        OracleVerdict::Inconclusive => Outcome::Inconclusive,
    }
}

pub fn cmd_check(args: &CheckArgs) -> Result<Outcome, CliError> {
    json_only(&args.output, "check")?;
    let (state, source) = match &args.state {
        Some(path) => (StateFile::read(path)?.to_state()?, format!("file:{}", path.display())),
        None => {
            let signature = args.shape.signature()?;
            let state = AmplitudeTensor::haar_random(&signature, &mut SeededRng::new(args.seed));
            (state, format!("haar:seed={}", args.seed))
        }
    };
    let policy = rank_policy(args.tol_rank)?;
    let linear_wanted = matches!(args.mode, Mode::Linear | Mode::Both);
    let oracle_wanted = matches!(args.mode, Mode::Oracle | Mode::Both);
    let subsets = resolve_subsets(args.subsets.as_deref(), state.signature(), linear_wanted)?;
    let oracle_config = if oracle_wanted {
        Some(args.oracle.config(args.seed)?)
    } else {
        None
    };

    let clock = Instant::now();
    let linear = if linear_wanted {
        Some(linear_report(&state, policy)?)
    } else {
        None
    };
    let linear_ms = ms(clock);
    let clock = Instant::now();
    let oracle = match &oracle_config {
        Some(config) => Some(oracle_report(&state, &subsets, config)?),
        None => None,
    };
    let oracle_ms = ms(clock);

    let mut outcome = Outcome::Success;
    if let Some(l) = &linear {
        outcome = outcome.worst(linear_outcome(l.verdict));
        eprintln!("linear: {:?} (null dim {})", l.verdict, l.null_dim);
    }
    if let Some(o) = &oracle {
        outcome = outcome.worst(oracle_outcome(o.verdict));
        eprintln!("oracle: {:?} on {}", o.verdict, format_subsets(&o.subsets));
    }
    let config = CheckConfig {
        source,
        signature: state.signature().clone(),
        mode: args.mode,
        subsets: Some(format_subsets(&subsets)),
        tol_rank: args.tol_rank,
        oracle: oracle_config,
    };
    let result = json!({ "linear": linear, "oracle": oracle, "exit_code": outcome.code() });
    let report = Report::new(
        "check",
        config,
        result,
        json!({ "linear": linear_ms, "oracle": oracle_ms }),
    );
    emit(&to_json(&report)?, args.output.out.as_deref())?;
    Ok(outcome)
}

#[derive(Debug, Serialize)]
struct SurveyConfig {
    signature: PartySignature,
    mode: Mode,
    trials: usize,
    seed: u64,
    subsets: Option<String>,
    tol_rank: Option<f64>,
    oracle: Option<ProjectionConfig>,
}

pub fn cmd_survey(args: &SurveyArgs) -> Result<Outcome, CliError> {
    let signature = args.shape.signature()?;
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let clock = Instant::now();
    let (config, result, runtimes, csv) = match args.mode {
        Mode::Linear => {
            let policy = rank_policy(args.tol_rank)?;
            let stats = linear_survey(&signature, args.trials, args.seed, policy).map_err(CliError::usage)?;
            eprintln!("linear survey: {}/{} UNIQUE_LINEAR", stats.unique_linear, stats.trials);
            let config = SurveyConfig {
                signature: signature.clone(),
                mode: args.mode,
                trials: args.trials,
                seed: args.seed,
                subsets: None,
                tol_rank: Some(args.tol_rank),
                oracle: None,
            };
            let csv = to_csv(&stats.records)?;
            (config, serde_json::to_value(&stats), stats.runtimes_ms, csv)
        }
        Mode::Oracle => {
            let subsets = resolve_subsets(args.subsets.as_deref(), &signature, false)?;
            let oracle = args.oracle.config(args.seed)?;
            let stats = genericity_survey(&signature, &subsets, args.trials, &oracle).map_err(CliError::usage)?;
            eprintln!(
                "oracle survey: {} UNIQUE, {} NON_UNIQUE, {} INCONCLUSIVE of {}",
                stats.unique, stats.non_unique, stats.inconclusive, stats.trials
            );
            let config = SurveyConfig {
                signature: signature.clone(),
                mode: args.mode,
                trials: args.trials,
                seed: args.seed,
                subsets: Some(format_subsets(&subsets)),
                tol_rank: None,
                oracle: Some(oracle),
            };
            #[derive(Serialize)]
            struct Row {
                trial: usize,
                verdict: OracleVerdict,
                kernel_dim: usize,
                face_dim: usize,
                max_distance_to_target: f64,
                max_iterations: usize,
                witness_distance: Option<f64>,
            }
            let csv = to_csv(stats.records.iter().map(|r| Row {
                trial: r.trial,
                verdict: r.verdict,
                kernel_dim: r.kernel_dim,
                face_dim: r.face_dim,
                max_distance_to_target: r.max_distance_to_target,
                max_iterations: r.max_iterations,
                witness_distance: r.witness_distance,
            }))?;
            (config, serde_json::to_value(&stats), stats.runtimes_ms, csv)
        }
        Mode::Both => return Err(CliError::Usage("survey --mode is linear or oracle".into())),
    };
    let result = result.map_err(|e| CliError::Failed(e.to_string()))?;
    let text = match args.output.format {
        Format::Json => {
            let timings = json!({ "total": ms(clock), "per_trial": runtimes });
            to_json(&Report::new("survey", config, result, timings))?
        }
        Format::Csv => csv,
    };
    emit(&text, args.output.out.as_deref())?;
    Ok(Outcome::Success)
}

#[derive(Debug, Serialize)]
struct BoundsConfig {
    d: usize,
    d_max: usize,
    n_min: usize,
    n_max: usize,
    m: usize,
    tol: f64,
}

#[derive(Debug, Serialize)]
pub struct BoundsResult {
    pub alpha_lower: Vec<AlphaSolution>,
    pub alpha_lower_monotone: bool,
    /// Smallest sufficient `k` per `(n, d)`.
    pub finite_n: Vec<BoundsRow>,
    /// Every `(n, k)` at the first `d`.
    pub table: Vec<BoundsRow>,
    pub alpha_upper: Vec<AlphaUpperRow>,
    pub alpha_upper_limit: f64,
}

pub fn bounds_result(
    d: usize,
    d_max: usize,
    ns: std::ops::RangeInclusive<usize>,
    m: usize,
    tol: f64,
) -> Result<BoundsResult, CliError> {
    let alpha_lower = (d..=d_max)
        .map(|d| bounds::solve_alpha_lower(d, tol))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::usage)?;
    let alpha_lower_monotone = alpha_lower.windows(2).all(|w| w[1].alpha >= w[0].alpha);
    let mut finite_n = Vec::new();
    for d in d..=d_max {
        for n in ns.clone() {
            finite_n.push(bounds::finite_n_lower_fraction(n, d).map_err(CliError::usage)?);
        }
    }
    Ok(BoundsResult {
        alpha_lower,
        alpha_lower_monotone,
        finite_n,
        table: bounds::bounds_table(ns, d).map_err(CliError::usage)?,
        alpha_upper: bounds::alpha_upper_table(m, d).map_err(CliError::usage)?,
        alpha_upper_limit: bounds::ALPHA_UPPER_LIMIT,
    })
}

pub fn cmd_bounds(args: &BoundsArgs) -> Result<Outcome, CliError> {
    let d_max = args.d_max.unwrap_or(args.d);
    if d_max < args.d {
        return Err(CliError::Usage("--d-max must be at least --d".into()));
    }
    if args.n_min == 0 || args.n_max < args.n_min {
        return Err(CliError::Usage("need 1 <= --n-min <= --n-max".into()));
    }
    let clock = Instant::now();
    let result = bounds_result(args.d, d_max, args.n_min..=args.n_max, args.m, args.tol)?;
    for a in &result.alpha_lower {
        eprintln!("alpha_L(d={}) = {:.6}", a.d, a.alpha);
    }
    let text = match args.output.format {
        Format::Json => {
            let config = BoundsConfig {
                d: args.d,
                d_max,
                n_min: args.n_min,
                n_max: args.n_max,
                m: args.m,
                tol: args.tol,
            };
            to_json(&Report::new("bounds", config, &result, json!({ "total": ms(clock) })))?
        }
        Format::Csv => to_csv(&result.table)?,
    };
    emit(&text, args.output.out.as_deref())?;
    Ok(Outcome::Success)
}

#[derive(Debug, Serialize)]
struct ClassicalConfig {
    n: usize,
    d: usize,
    epsilon: f64,
    seed: u64,
}

#[derive(Debug, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ClassicalResult {
    Accepted(CounterexamplePair),
    Rejected {
        reason: String,
        max_admissible_epsilon: Option<f64>,
    },
}

pub fn cmd_classical(args: &ClassicalArgs) -> Result<Outcome, CliError> {
    json_only(&args.output, "classical")?;
    let clock = Instant::now();
    let (result, outcome) = match counterexample_pair(args.n, args.d, args.epsilon, &mut SeededRng::new(args.seed)) {
        Ok(pair) => {
            eprintln!(
                "marginal difference {:e}, L1 distance {:e}",
                pair.max_marginal_difference, pair.l1_distance
            );
            (ClassicalResult::Accepted(pair), Outcome::Success)
        }
        Err(e @ (ClassicalError::EpsilonTooLarge { .. } | ClassicalError::NonPositiveEpsilon(_))) => {
            eprintln!("rejected: {e}");
            let max_admissible_epsilon = match e {
                ClassicalError::EpsilonTooLarge { max_admissible, .. } => Some(max_admissible),
                _ => None,
            };
            let rejected = ClassicalResult::Rejected {
                reason: e.to_string(),
                max_admissible_epsilon,
            };
            (rejected, Outcome::Negative)
        }
        Err(e) => return Err(CliError::usage(e)),
    };
    let config = ClassicalConfig {
        n: args.n,
        d: args.d,
        epsilon: args.epsilon,
        seed: args.seed,
    };
    let report = Report::new("classical", config, result, json!({ "total": ms(clock) }));
    emit(&to_json(&report)?, args.output.out.as_deref())?;
    Ok(outcome)
}

pub fn cmd_reproduce(args: &ReproduceArgs) -> Result<Outcome, CliError> {
    json_only(&args.output, "reproduce")?;
    let config = ReproduceConfig {
        seed: args.seed,
        trials_oracle: args.trials_oracle,
        trials_linear: args.trials_linear,
        trials_cross: args.trials_cross,
    };
    if config.trials_oracle == 0 || config.trials_linear == 0 || config.trials_cross == 0 {
        return Err(CliError::Usage("trial counts must be at least 1".into()));
    }
    let (result, timings) = reproduce(&config)?;
    for check in &result.acceptance {
        eprintln!(
            "[{}] {:>2} {}",
            if check.pass { "PASS" } else { "FAIL" },
            check.id,
            check.name
        );
    }
    let report = Report::new("reproduce", &config, &result, timings);
    emit(&to_json(&report)?, args.output.out.as_deref())?;
    Ok(Outcome::Success)
}

//! Experiment runner for the overshoot-lab library.
//!
//! Subcommands cover closed-form moments, analytic classification, chain
//! Monte Carlo, the path-simulation oracle, exact counterexample orbits,
//! the phase-diagram sweep and the acceptance suite. Parameters come from
//! flags or a JSON config file (flags win); reports are CSV or JSON and are
//! byte-identical for identical (config, seed) once the timestamp header is
//! suppressed.

mod config;
mod report;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde_json::json;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use overshoot_lab::chain::{self, ChainConfig};
use overshoot_lab::classify;
use overshoot_lab::counterexamples::{self, Variant};
use overshoot_lab::law::StabilityIndex;
use overshoot_lab::moments::{self, MomentValue};
use overshoot_lab::oracle::{self, PathConfig};
use overshoot_lab::specfun::Accuracy;
use overshoot_lab::{acceptance, rng, stats};

use config::FileConfig;
use report::{Cell, Format, Report};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config keys or parameter values. Exit 1.
    Usage(String),
    /// Numeric, convergence or IO failure. Exit 2.
    Numeric(String),
    /// One or more acceptance criteria failed. Exit 3.
    AcceptanceFailed(Vec<usize>),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::AcceptanceFailed(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numeric(m) => write!(f, "error: {m}"),
            CliError::AcceptanceFailed(ids) => {
                write!(f, "acceptance criteria failed: {ids:?}")
            }
        }
    }
}

impl From<overshoot_lab::Error> for CliError {
    fn from(e: overshoot_lab::Error) -> Self {
        match e {
            overshoot_lab::Error::Domain(m) => CliError::Usage(m),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatFlag {
    Csv,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "overshoot", version, about = "Overshoot laws, moment criteria and recurrence classification experiments")]
struct Cli {
    /// JSON config file; flags override file values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (default: OVERSHOOT_LAB_SEED, else 0)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (default: stdout)
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Report format
    #[arg(long, global = true, value_enum)]
    format: Option<FormatFlag>,
    /// Suppress the timestamp header line (byte-identical reruns)
    #[arg(long, global = true)]
    no_header_timestamp: bool,
    /// Cap worker threads (default: machine parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form fractional moments against the quadrature oracle
    Moments(MomentsArgs),
    /// Analytic recurrence/transience classification
    Classify(ClassifyArgs),
    /// Overshoot-chain Monte Carlo limit estimation
    Chain(ChainArgs),
    /// First-passage path oracle vs the closed-form overshoot law
    Oracle(OracleArgs),
    /// Exact rational counterexample orbits
    Counterexample(CounterexampleArgs),
    /// Classifier vs Monte Carlo over an index grid
    PhaseDiagram(PhaseDiagramArgs),
    /// Run the full acceptance suite (exit 3 on any failure)
    Acceptance(AcceptanceArgs),
}

#[derive(Args, Debug, Default)]
struct MomentsArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct ClassifyArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct ChainArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    y0: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    paths: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct OracleArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    x0: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    max_time: Option<f64>,
    #[arg(long)]
    paths: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct CounterexampleArgs {
    /// one | two
    #[arg(long)]
    variant: Option<String>,
    /// Exact rational start, e.g. 0, 1/2, 7/3
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Orbit length
    #[arg(long)]
    steps: Option<usize>,
    /// Number of extracted up-crossing overshoots
    #[arg(long)]
    overshoots: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct PhaseDiagramArgs {
    /// Index grid as lo:hi:step (both axes)
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    paths: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct AcceptanceArgs {}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.code());
        }
    }
}

struct RunOutcome {
    report: Report,
    /// Returned after the report is written (acceptance failures).
    deferred: Option<CliError>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }

    let file = match &cli.config {
        Some(path) => config::load(path)?,
        None => FileConfig::default(),
    };

    let seed = resolve_seed(cli.seed, file.master_seed)?;
    let format = resolve_format(cli.format, file.format.as_deref())?;
    let output = cli.output.clone().or_else(|| file.output_path.clone().map(PathBuf::from));

    let command = match cli.command {
        Some(c) => {
            if let Some(name) = &file.command {
                if name != command_name(&c) {
                    return Err(CliError::Usage(format!(
                        "config file selects command {name:?} but the command line says {:?}",
                        command_name(&c)
                    )));
                }
            }
            c
        }
        None => command_from_name(file.command.as_deref())?,
    };

    let common = json!({
        "master_seed": seed,
        "format": match format { Format::Csv => "csv", Format::Json => "json" },
        "output_path": output.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "-".into()),
    });
    let outcome = dispatch(&command, &file, seed, &common)?;

    let timestamp = if cli.no_header_timestamp {
        None
    } else {
        Some(
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        )
    };
    match &output {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .map_err(|e| CliError::Numeric(format!("cannot create {}: {e}", path.display())))?;
            outcome.report.emit(format, timestamp, &mut f)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            outcome.report.emit(format, timestamp, &mut lock)?;
            lock.flush().map_err(|e| CliError::Numeric(format!("io: {e}")))?;
        }
    }
    match outcome.deferred {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Moments(_) => "moments",
        Command::Classify(_) => "classify",
        Command::Chain(_) => "chain",
        Command::Oracle(_) => "oracle",
        Command::Counterexample(_) => "counterexample",
        Command::PhaseDiagram(_) => "phase-diagram",
        Command::Acceptance(_) => "acceptance",
    }
}

fn command_from_name(name: Option<&str>) -> Result<Command, CliError> {
    match name {
        Some("moments") => Ok(Command::Moments(Default::default())),
        Some("classify") => Ok(Command::Classify(Default::default())),
        Some("chain") => Ok(Command::Chain(Default::default())),
        Some("oracle") => Ok(Command::Oracle(Default::default())),
        Some("counterexample") => Ok(Command::Counterexample(Default::default())),
        Some("phase-diagram") => Ok(Command::PhaseDiagram(Default::default())),
        Some("acceptance") => Ok(Command::Acceptance(Default::default())),
        Some(other) => Err(CliError::Usage(format!("unknown command in config file: {other}"))),
        None => Err(CliError::Usage("no command given (flags or config file)".into())),
    }
}

fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag.or(file) {
        return Ok(s);
    }
    match std::env::var("OVERSHOOT_LAB_SEED") {
        Ok(text) => text
            .parse::<u64>()
            .map_err(|_| CliError::Usage(format!("OVERSHOOT_LAB_SEED must be a 64-bit unsigned integer, got {text:?}"))),
        Err(_) => Ok(0),
    }
}

fn resolve_format(flag: Option<FormatFlag>, file: Option<&str>) -> Result<Format, CliError> {
    if let Some(f) = flag {
        return Ok(match f {
            FormatFlag::Csv => Format::Csv,
            FormatFlag::Json => Format::Json,
        });
    }
    match file {
        None => Ok(Format::Json),
        Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some(other) => Err(CliError::Usage(format!("format must be csv or json, got {other:?}"))),
    }
}

fn index(value: f64, name: &str) -> Result<StabilityIndex, CliError> {
    StabilityIndex::new(value)
        .map_err(|_| CliError::Usage(format!("{name} must lie strictly inside (0, 2), got {value}")))
}

fn dispatch(
    command: &Command,
    file: &FileConfig,
    seed: u64,
    common: &serde_json::Value,
) -> Result<RunOutcome, CliError> {
    match command {
        Command::Moments(a) => run_moments(a, file, common),
        Command::Classify(a) => run_classify(a, file, common),
        Command::Chain(a) => run_chain(a, file, seed, common),
        Command::Oracle(a) => run_oracle(a, file, seed, common),
        Command::Counterexample(a) => run_counterexample(a, file, common),
        Command::PhaseDiagram(a) => run_phase_diagram(a, file, seed, common),
        Command::Acceptance(_) => {
            file.check_keys(&[])?;
            run_acceptance(seed, common)
        }
    }
}

fn merge_config(common: &serde_json::Value, command: &str, extra: serde_json::Value) -> serde_json::Value {
    let mut obj = common.as_object().cloned().unwrap_or_default();
    obj.insert("command".into(), json!(command));
    if let Some(map) = extra.as_object() {
        for (k, v) in map {
            obj.insert(k.clone(), v.clone());
        }
    }
    serde_json::Value::Object(obj)
}

fn moment_cells(v: MomentValue) -> Cell {
    match v {
        MomentValue::Finite(x) => Cell::Real(x),
        MomentValue::Infinite => Cell::Text("infinite".into()),
    }
}

fn run_moments(args: &MomentsArgs, file: &FileConfig, common: &serde_json::Value) -> Result<RunOutcome, CliError> {
    file.check_keys(&["alpha", "beta", "r"])?;
    let alpha = config::require(args.alpha, file.real("alpha")?, "alpha")?;
    let beta = args.beta.or(file.real("beta")?);
    let r = config::require(args.r, file.real("r")?, "r")?;
    let a = index(alpha, "alpha")?;
    let b = beta.map(|v| index(v, "beta")).transpose()?;

    let closed = match b {
        Some(b) => moments::product_moment(a, b, r),
        None => moments::up_moment(a, r),
    };
    let quad = moments::quadrature_moment(a, b, r, &Accuracy::default())?;
    let diff = match (closed, quad) {
        (MomentValue::Finite(c), MomentValue::Finite(q)) => Cell::Real((c - q).abs()),
        _ => Cell::Null,
    };
    let report = Report {
        config: merge_config(common, "moments", json!({"alpha": alpha, "beta": beta, "r": r})),
        columns: vec!["alpha", "beta", "r", "closed_form", "quadrature", "abs_diff"],
        rows: vec![vec![
            Cell::Real(alpha),
            beta.map(Cell::Real).unwrap_or(Cell::Null),
            Cell::Real(r),
            moment_cells(closed),
            moment_cells(quad),
            diff,
        ]],
    };
    Ok(RunOutcome { report, deferred: None })
}

fn run_classify(args: &ClassifyArgs, file: &FileConfig, common: &serde_json::Value) -> Result<RunOutcome, CliError> {
    file.check_keys(&["alpha", "beta"])?;
    let alpha = config::require(args.alpha, file.real("alpha")?, "alpha")?;
    let beta = config::require(args.beta, file.real("beta")?, "beta")?;
    let c = classify::classify_stable_like(index(alpha, "alpha")?, index(beta, "beta")?);
    let report = Report {
        config: merge_config(common, "classify", json!({"alpha": alpha, "beta": beta})),
        columns: vec!["alpha", "beta", "label", "source", "boundary"],
        rows: vec![vec![
            Cell::Real(alpha),
            Cell::Real(beta),
            Cell::Text(c.label.to_string()),
            Cell::Text(c.source),
            Cell::Bool(c.boundary),
        ]],
    };
    Ok(RunOutcome { report, deferred: None })
}

fn run_chain(args: &ChainArgs, file: &FileConfig, seed: u64, common: &serde_json::Value) -> Result<RunOutcome, CliError> {
    file.check_keys(&["alpha", "beta", "y0", "steps", "paths"])?;
    let alpha = config::require(args.alpha, file.real("alpha")?, "alpha")?;
    let beta = config::require(args.beta, file.real("beta")?, "beta")?;
    let y0 = config::resolve(args.y0, file.real("y0")?, 1.0);
    let steps = config::resolve(args.steps, file.integer("steps")?, 200);
    let paths = config::resolve(args.paths, file.integer("paths")?, 200);
    let cfg = ChainConfig {
        alpha: index(alpha, "alpha")?,
        beta: index(beta, "beta")?,
        y0,
        n_steps: steps,
        n_paths: paths,
        master_seed: rng::derive(seed, 0xC4A1),
    };
    let est = chain::estimate_limit_behavior(&cfg)?;
    let report = Report {
        config: merge_config(
            common,
            "chain",
            json!({"alpha": alpha, "beta": beta, "y0": y0, "steps": steps, "paths": paths}),
        ),
        columns: vec![
            "alpha", "beta", "y0", "steps", "paths", "behavior", "step_mean", "std_err",
            "analytic_drift", "n_samples",
        ],
        rows: vec![vec![
            Cell::Real(alpha),
            Cell::Real(beta),
            Cell::Real(y0),
            Cell::Int(steps as i64),
            Cell::Int(paths as i64),
            Cell::Text(est.behavior.to_string()),
            Cell::Real(est.evidence.step_mean),
            Cell::Real(est.evidence.std_err),
            Cell::Real(est.evidence.analytic_drift),
            Cell::Int(est.evidence.n_samples as i64),
        ]],
    };
    Ok(RunOutcome { report, deferred: None })
}

fn run_oracle(args: &OracleArgs, file: &FileConfig, seed: u64, common: &serde_json::Value) -> Result<RunOutcome, CliError> {
    file.check_keys(&["alpha", "x0", "dt", "max_time", "paths"])?;
    let alpha = config::require(args.alpha, file.real("alpha")?, "alpha")?;
    let x0 = config::resolve(args.x0, file.real("x0")?, -1.0);
    let dt = config::resolve(args.dt, file.real("dt")?, 1e-3);
    let max_time = config::resolve(args.max_time, file.real("max_time")?, 100.0);
    let paths = config::resolve(args.paths, file.integer("paths")?, 1000);
    let cfg = PathConfig {
        alpha: index(alpha, "alpha")?,
        x0,
        dt,
        max_time,
        n_paths: paths,
        master_seed: rng::derive(seed, 0x04AC),
    };
    let rep = oracle::empirical_overshoot_report(&cfg)?;
    let q = |p: f64| Cell::Real(stats::quantile(&rep.overshoots, p));
    let report = Report {
        config: merge_config(
            common,
            "oracle",
            json!({"alpha": alpha, "x0": x0, "dt": dt, "max_time": max_time, "paths": paths}),
        ),
        columns: vec![
            "alpha", "x0", "dt", "max_time", "paths", "ks_statistic", "censored_fraction",
            "q10", "q25", "q50", "q75", "q90",
        ],
        rows: vec![vec![
            Cell::Real(alpha),
            Cell::Real(x0),
            Cell::Real(dt),
            Cell::Real(max_time),
            Cell::Int(paths as i64),
            Cell::Real(rep.ks_statistic),
            Cell::Real(rep.censored_fraction),
            q(0.10),
            q(0.25),
            q(0.50),
            q(0.75),
            q(0.90),
        ]],
    };
    Ok(RunOutcome { report, deferred: None })
}

fn run_counterexample(
    args: &CounterexampleArgs,
    file: &FileConfig,
    common: &serde_json::Value,
) -> Result<RunOutcome, CliError> {
    file.check_keys(&["variant", "x0", "steps", "overshoots"])?;
    let variant_name = config::require(args.variant.clone(), file.text("variant")?, "variant")?;
    let variant = match variant_name.to_ascii_lowercase().as_str() {
        "one" => Variant::One,
        "two" => Variant::Two,
        other => return Err(CliError::Usage(format!("variant must be one or two, got {other:?}"))),
    };
    let x0_text = config::require(args.x0.clone(), file.text("x0")?, "x0")?;
    let x0 = Ratio::<i64>::from_str(&x0_text)
        .map_err(|_| CliError::Usage(format!("x0 must be an exact rational like 1/2, got {x0_text:?}")))?;
    let steps = config::resolve(args.steps, file.integer("steps")?, 16);
    let overshoots = config::resolve(args.overshoots, file.integer("overshoots")?, 8);

    let mut rows = Vec::new();
    for (n, v) in counterexamples::orbit(variant, x0, steps).into_iter().enumerate() {
        rows.push(vec![Cell::Text("orbit".into()), Cell::Int(n as i64), Cell::Text(v.to_string())]);
    }
    for (k, v) in counterexamples::extract_overshoots(variant, x0, overshoots).into_iter().enumerate() {
        rows.push(vec![
            Cell::Text("overshoot".into()),
            Cell::Int((k + 1) as i64),
            Cell::Text(v.to_string()),
        ]);
    }
    let report = Report {
        config: merge_config(
            common,
            "counterexample",
            json!({"variant": variant_name.to_ascii_lowercase(), "x0": x0_text, "steps": steps, "overshoots": overshoots}),
        ),
        columns: vec!["kind", "index", "value"],
        rows,
    };
    Ok(RunOutcome { report, deferred: None })
}

fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::Usage(format!("grid must be lo:hi:step, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].parse().map_err(|_| bad())?;
    let step: f64 = parts[2].parse().map_err(|_| bad())?;
    if !(step > 0.0) || hi < lo {
        return Err(bad());
    }
    let n = ((hi - lo) / step).round() as usize;
    let grid: Vec<f64> = (0..=n).map(|k| lo + step * k as f64).filter(|&v| v <= hi + 1e-12).collect();
    if grid.iter().any(|&v| !(0.0 < v && v < 2.0)) {
        return Err(CliError::Usage(format!("grid values must lie strictly inside (0, 2): {text:?}")));
    }
    Ok(grid)
}

fn run_phase_diagram(
    args: &PhaseDiagramArgs,
    file: &FileConfig,
    seed: u64,
    common: &serde_json::Value,
) -> Result<RunOutcome, CliError> {
    file.check_keys(&["grid", "steps", "paths"])?;
    let grid_text = config::resolve(args.grid.clone(), file.text("grid")?, "0.1:1.9:0.1".into());
    let steps = config::resolve(args.steps, file.integer("steps")?, 200);
    let paths = config::resolve(args.paths, file.integer("paths")?, 200);
    let grid = parse_grid(&grid_text)?;

    let mut rows = Vec::new();
    for (i, &a) in grid.iter().enumerate() {
        for (j, &b) in grid.iter().enumerate() {
            let cfg = ChainConfig {
                alpha: index(a, "alpha")?,
                beta: index(b, "beta")?,
                y0: 1.0,
                n_steps: steps,
                n_paths: paths,
                master_seed: rng::derive(seed, (i as u64) * 4096 + j as u64),
            };
            let rep = classify::mc_classify_robust(&cfg, 6)?;
            rows.push(vec![
                Cell::Real(a),
                Cell::Real(b),
                Cell::Text(rep.analytic.label.to_string()),
                Cell::Text(rep.empirical.to_string()),
                Cell::Real(rep.evidence.step_mean),
                Cell::Real(rep.evidence.std_err),
                Cell::Bool(rep.agree),
            ]);
        }
    }
    let report = Report {
        config: merge_config(
            common,
            "phase-diagram",
            json!({"grid": grid_text, "steps": steps, "paths": paths}),
        ),
        columns: vec!["alpha", "beta", "analytic_label", "empirical_label", "lambda_hat", "se", "agree"],
        rows,
    };
    Ok(RunOutcome { report, deferred: None })
}

fn run_acceptance(seed: u64, common: &serde_json::Value) -> Result<RunOutcome, CliError> {
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for result in acceptance::run_all(seed) {
        eprintln!("{}", result.summary_line());
        if !result.passed {
            failed.push(result.id);
        }
        rows.push(vec![
            Cell::Int(result.id as i64),
            Cell::Text(result.name.into()),
            Cell::Bool(result.passed),
            Cell::Real(result.elapsed_s),
            Cell::Text(result.detail),
        ]);
    }
    let report = Report {
        config: merge_config(common, "acceptance", json!({})),
        columns: vec!["id", "name", "passed", "elapsed_s", "detail"],
        rows,
    };
    let deferred = if failed.is_empty() { None } else { Some(CliError::AcceptanceFailed(failed)) };
    Ok(RunOutcome { report, deferred })
}

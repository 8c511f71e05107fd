//! `trajmetric` command-line tool.
//!
//! Exit codes: 0 success, 1 I/O or solver failure, 2 parse error, 3 invalid
//! input, 4 exact solver over capacity.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trajmetric::assignment::{SolverKind, DEFAULT_STATE_CAP};
use trajmetric::io::{
    aggregate_reports, compute_report, curves_csv, parse_scenario_config, scenario_config_json,
    DocumentError, InputDocument, MetricKind, ReportDocument,
};
use trajmetric::scenario::{aggregate_rms, run_monte_carlo, run_seed, ScenarioConfig};
use trajmetric::{BaseMetricKind, Error, Evaluator, MetricParams};

const SEED_ENV: &str = "TRAJMETRIC_SEED";

#[derive(Parser)]
#[command(name = "trajmetric", version, about = "Trajectory metrics for multi-object tracking evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare a ground-truth document with an estimate document.
    Compute(ComputeArgs),
    /// Generate a synthetic scenario and, with --runs, Monte Carlo metric curves.
    Simulate(SimulateArgs),
    /// Per-step CSV from report files or directories of reports (RMS over several).
    Curves(CurvesArgs),
}

#[derive(Args)]
struct MetricArgs {
    /// Cut-off distance.
    #[arg(long = "c", default_value_t = 10.0)]
    cutoff: f64,
    /// Order p >= 1.
    #[arg(long = "p", default_value_t = 2.0)]
    order: f64,
    /// Switching cost.
    #[arg(long = "gamma", default_value_t = 2.0)]
    gamma: f64,
    /// Base metric between single-object densities: wasserstein2 or euclidean.
    #[arg(long, default_value = "wasserstein2")]
    base: BaseMetricKind,
    /// Assignment solver: exact or lp.
    #[arg(long, default_value = "lp")]
    solver: SolverKind,
    /// Largest number of assignment vectors the exact solver may enumerate.
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
}

impl MetricArgs {
    fn evaluator(&self) -> Result<Evaluator, Failure> {
        let params = MetricParams::new(self.cutoff, self.order, self.gamma).map_err(Failure::from)?;
        Ok(Evaluator::new(params, self.base, self.solver).with_state_cap(self.state_cap))
    }
}

#[derive(Args)]
struct ComputeArgs {
    truth: PathBuf,
    estimate: PathBuf,
    /// ptgospa, tgospa, gospa or pgospa.
    #[arg(long, default_value = "ptgospa")]
    metric: MetricKind,
    #[command(flatten)]
    metric_args: MetricArgs,
    /// Include the optimal weight matrices in the report.
    #[arg(long)]
    emit_weights: bool,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario configuration (JSON); the built-in six-object scenario when omitted.
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short)]
    out: PathBuf,
    /// Number of Monte Carlo runs; run i uses seed + i.
    #[arg(long)]
    runs: Option<usize>,
    /// Worker threads for the runs (0: one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[command(flatten)]
    metric_args: MetricArgs,
}

#[derive(Args)]
struct CurvesArgs {
    /// Report files, or directories whose *.json files are reports.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Write the CSV here instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn in_file(self, path: &Path) -> Self {
        Self {
            code: self.code,
            message: format!("{}: {}", path.display(), self.message),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Capacity { .. } => 4,
            Error::Solver(_) => 1,
            _ => 3,
        };
        let mut message = e.to_string();
        if code == 4 {
            message.push_str(" (--solver lp)");
        }
        Failure::new(code, message)
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        match e {
            DocumentError::Parse { .. } => Failure::new(2, e.to_string()),
            DocumentError::Validation { .. } => Failure::new(3, e.to_string()),
            DocumentError::Metric(inner) => inner.into(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(1, format!("cannot read {}: {e}", path.display())))
}

/// Writes through a temporary sibling file and a rename, so readers never see partial output.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let fail = |e: std::io::Error| Failure::new(1, format!("cannot write {}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(fail)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(fail)?;
    fs::rename(&tmp, path).map_err(fail)
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn compute(args: &ComputeArgs) -> Result<(), Failure> {
    let evaluator = args.metric_args.evaluator()?;
    let truth = InputDocument::parse(&read(&args.truth)?).map_err(|e| Failure::from(e).in_file(&args.truth))?;
    let estimate =
        InputDocument::parse(&read(&args.estimate)?).map_err(|e| Failure::from(e).in_file(&args.estimate))?;
    truth.to_sequence_set().map_err(|e| Failure::from(e).in_file(&args.truth))?;
    estimate.to_estimate().map_err(|e| Failure::from(e).in_file(&args.estimate))?;
    let report = compute_report(&truth, &estimate, args.metric, &evaluator, args.emit_weights)?;
    emit(args.out.as_deref(), &report.to_json())
}

fn scenario_config(args: &SimulateArgs) -> Result<ScenarioConfig, Failure> {
    let mut config = match &args.config {
        Some(path) => parse_scenario_config(&read(path)?).map_err(|e| Failure::from(e).in_file(path))?,
        None => ScenarioConfig::default(),
    };
    if let Ok(seed) = std::env::var(SEED_ENV) {
        config.seed = seed
            .trim()
            .parse()
            .map_err(|_| Failure::new(3, format!("{SEED_ENV}: '{seed}' is not an unsigned 64-bit integer")))?;
    }
    Ok(config)
}

fn simulate(args: &SimulateArgs) -> Result<(), Failure> {
    if args.runs == Some(0) {
        return Err(Failure::new(3, "invalid value at runs: must be at least 1"));
    }
    let evaluator = args.metric_args.evaluator()?;
    let config = scenario_config(args)?;
    let dim = config.initial_states.first().map_or(0, Vec::len);
    let truth = trajmetric::scenario::generate_truth(&config)?;
    let estimates = trajmetric::scenario::generate_estimates(&truth, &config)?;
    write_atomic(&args.out.join("config.json"), &scenario_config_json(&config))?;
    write_atomic(&args.out.join("truth.json"), &InputDocument::from_sequence_set(&truth, dim).to_json())?;
    write_atomic(
        &args.out.join("estimates.json"),
        &InputDocument::from_sequence_set(&estimates, dim).to_json(),
    )?;

    let Some(runs) = args.runs else {
        return Ok(());
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| Failure::new(1, format!("cannot start worker threads: {e}")))?;
    let outcomes = pool.install(|| run_monte_carlo(&config, runs, &evaluator))?;

    let mut series = [Vec::with_capacity(runs), Vec::with_capacity(runs)];
    for (i, outcome) in outcomes.iter().enumerate() {
        debug_assert_eq!(outcome.seed, run_seed(config.seed, i));
        for (slot, (kind, report)) in [(MetricKind::Ptgospa, &outcome.ptgospa), (MetricKind::Tgospa, &outcome.tgospa)]
            .into_iter()
            .enumerate()
        {
            let doc = ReportDocument::from_report(kind, &evaluator, report, false);
            let path = args.out.join("runs").join(kind.name()).join(format!("run_{i:04}.json"));
            write_atomic(&path, &doc.to_json())?;
            series[slot].push(doc.run_series()?);
        }
    }
    for (slot, kind) in [MetricKind::Ptgospa, MetricKind::Tgospa].into_iter().enumerate() {
        let aggregate = aggregate_rms(&series[slot])?;
        write_atomic(&args.out.join(format!("{}_curves.csv", kind.name())), &curves_csv(&aggregate.rms))?;
    }
    Ok(())
}

fn report_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut paths = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries = fs::read_dir(input)
                .map_err(|e| Failure::new(1, format!("cannot list {}: {e}", input.display())))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            paths.extend(found);
        } else {
            paths.push(input.clone());
        }
    }
    if paths.is_empty() {
        return Err(Failure::new(3, "invalid value at inputs: no report files found"));
    }
    Ok(paths)
}

fn curves(args: &CurvesArgs) -> Result<(), Failure> {
    let reports = report_paths(&args.inputs)?
        .iter()
        .map(|p| ReportDocument::parse(&read(p)?).map_err(|e| Failure::from(e).in_file(p)))
        .collect::<Result<Vec<_>, _>>()?;
    let series = aggregate_reports(&reports)?;
    emit(args.out.as_deref(), &curves_csv(&series))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compute(args) => compute(args),
        Command::Simulate(args) => simulate(args),
        Command::Curves(args) => curves(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

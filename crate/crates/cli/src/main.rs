//! `bell-adj` command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use bell_adj::chart::{render_svg, ChartOptions};
use bell_adj::io::{counts_to_csv, read_counts};
use bell_adj::optimizer::FitResult;
use bell_adj::params::ModelParams;
use bell_adj::selection::{cardinality_sweep, test_error, SweepTrace};
use bell_adj::simulator::{generate_dataset, MeasurementSet, SourceConfig};
use bell_adj::{
    adjudicate, normalize, signalling_deficit, AdjudicationConfig, AdjudicationReport, ModelFamily,
    ModelSpec, OptimizerConfig, ParamVector, Scenario,
};

const THREADS_ENV: &str = "BELL_ADJ_THREADS";
const DEFAULT_RESTARTS: usize = 100;

#[derive(Parser)]
#[command(name = "bell-adj", version)]
#[command(about = "Adjudicate between causal models of a Bell experiment")]
struct Cli {
    /// JSON file of defaults; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate train/test count tables from a two-photon source.
    Simulate(SimulateArgs),
    /// Fit one model and dump its parameters.
    Fit(FitArgs),
    /// Fit a slate of models, bootstrap error bars and rank them.
    Adjudicate(AdjudicateArgs),
    /// Re-render report.svg from an existing report.json.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Measurements {
    Spiral,
    Chsh,
}

#[derive(Args)]
struct SimulateArgs {
    /// Output directory.
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Measurement settings per side [default: 6].
    #[arg(long)]
    settings: Option<usize>,
    /// Mean coincidences per setting pair [default: 8000].
    #[arg(long)]
    mean: Option<f64>,
    /// Werner-state visibility [default: 0.972].
    #[arg(long)]
    visibility: Option<f64>,
    /// Fully dephase the second photon.
    #[arg(long)]
    dephased: bool,
    #[arg(long, value_enum)]
    measurements: Option<Measurements>,
}

#[derive(Args, Clone)]
struct SearchArgs {
    /// Random restarts per fit [default: 100].
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Largest latent cardinality tried by a sweep [default: 16].
    #[arg(long)]
    max_d: Option<usize>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    train: PathBuf,
    /// Needed for the cardinality sweep and for the test error.
    #[arg(long)]
    test: Option<PathBuf>,
    /// ccc, cce0, csd0 or qcc.
    #[arg(long)]
    model: ModelFamily,
    /// Fixed latent cardinality; classical models sweep when omitted.
    #[arg(long)]
    d: Option<usize>,
    #[command(flatten)]
    search: SearchArgs,
    /// Output JSON file.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct AdjudicateArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    /// Comma-separated slate [default: cce0,csd0,qcc].
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<ModelFamily>>,
    #[command(flatten)]
    search: SearchArgs,
    /// Bootstrap resamples [default: 10].
    #[arg(long)]
    resamples: Option<usize>,
    /// Random restarts per bootstrap refit, besides the search started at
    /// the primary optimum [default: same as --restarts].
    #[arg(long)]
    bootstrap_restarts: Option<usize>,
    /// Logarithmic error axis in the chart.
    #[arg(long)]
    log_y: bool,
    /// Output directory.
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// An existing report.json.
    report: PathBuf,
    /// Output SVG [default: report.svg next to the input].
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long)]
    log_y: bool,
}

/// Values accepted in the `--config` file; each mirrors a flag.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    seed: Option<u64>,
    restarts: Option<usize>,
    resamples: Option<usize>,
    bootstrap_restarts: Option<usize>,
    max_d: Option<usize>,
    models: Option<Vec<ModelFamily>>,
    settings: Option<usize>,
    mean: Option<f64>,
    visibility: Option<f64>,
    dephased: Option<bool>,
    measurements: Option<Measurements>,
    log_y: Option<bool>,
    /// Full optimizer settings; `restarts` and `seed` still override.
    optimizer: Option<OptimizerConfig>,
}

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    fn adjudication(&self, search: &SearchArgs) -> AdjudicationConfig {
        let seed = search.seed.or(self.seed).unwrap_or(0);
        let mut cfg = AdjudicationConfig {
            optimizer: self.optimizer.clone().unwrap_or_default(),
            bootstrap_restarts: self.bootstrap_restarts,
            ..AdjudicationConfig::default()
        }
        .with_seed(seed);
        cfg.optimizer.restarts = search.restarts.or(self.restarts).unwrap_or(DEFAULT_RESTARTS);
        if let Some(d) = search.max_d.or(self.max_d) {
            cfg.max_cardinality = d;
        }
        if let Some(r) = self.resamples {
            cfg.resamples = r;
        }
        cfg
    }
}

/// The `fit` subcommand's output document.
#[derive(Serialize)]
struct FitReport {
    model: ModelFamily,
    d: usize,
    scenario: Scenario,
    training_error: f64,
    test_error: Option<f64>,
    signalling_deficit: f64,
    params: ModelParams,
    packed_params: ParamVector,
    restart_errors: Vec<Option<f64>>,
    best_restart: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<SweepTrace>,
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn cmd_simulate(args: SimulateArgs, file: &FileConfig) -> Result<()> {
    let measurements = match args.measurements.or(file.measurements).unwrap_or(Measurements::Spiral) {
        Measurements::Spiral => MeasurementSet::Spiral,
        Measurements::Chsh => MeasurementSet::Chsh,
    };
    let defaults = SourceConfig::default();
    let n_settings = match measurements {
        MeasurementSet::Chsh => args.settings.or(file.settings).unwrap_or(2),
        MeasurementSet::Spiral => args.settings.or(file.settings).unwrap_or(defaults.n_settings),
    };
    let config = SourceConfig {
        visibility: args.visibility.or(file.visibility).unwrap_or(defaults.visibility),
        dephased: args.dephased || file.dephased.unwrap_or(false),
        mean_coincidences_per_setting: args
            .mean
            .or(file.mean)
            .unwrap_or(defaults.mean_coincidences_per_setting),
        n_settings,
        measurements,
        seed: args.seed.or(file.seed).unwrap_or(0),
    };
    let ds = generate_dataset(&config)?;
    create_dir(&args.out)?;
    write(&args.out.join("train.csv"), &counts_to_csv(&ds.train))?;
    write(&args.out.join("test.csv"), &counts_to_csv(&ds.test))?;
    write(&args.out.join("provenance.json"), &to_json(&ds.provenance)?)?;
    Ok(())
}

fn cmd_fit(args: FitArgs, file: &FileConfig) -> Result<()> {
    let cfg = file.adjudication(&args.search);
    let f_train = normalize(&read_counts(&args.train)?)?;
    let f_test = match &args.test {
        Some(p) => Some(normalize(&read_counts(p)?)?),
        None => None,
    };
    let sc = f_train.scenario();
    let (mut fit, sweep): (FitResult, Option<SweepTrace>) = match (args.model.is_classical(), args.d) {
        (true, None) => {
            let Some(test) = &f_test else {
                bail!("sweeping the cardinality of {} needs --test (or pass --d)", args.model.label());
            };
            let (fit, trace) = cardinality_sweep(args.model, &f_train, test, &cfg)?;
            (fit, Some(trace))
        }
        (_, d) => {
            let spec = ModelSpec::new(args.model, d.unwrap_or(1), sc)?;
            (bell_adj::fit(&spec, &f_train, &cfg.optimizer)?, None)
        }
    };
    let test = match &f_test {
        Some(t) => Some(test_error(&mut fit, t)?),
        None => None,
    };
    let report = FitReport {
        model: fit.spec.family,
        d: fit.spec.d,
        scenario: sc,
        training_error: fit.training_error,
        test_error: test,
        signalling_deficit: signalling_deficit(&fit.best_behavior),
        params: fit.params()?,
        packed_params: fit.best_params.clone(),
        restart_errors: fit.restart_errors.clone(),
        best_restart: fit.best_restart,
        sweep,
    };
    if let Some(dir) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(dir)?;
    }
    write(&args.out, &to_json(&report)?)
}

fn chart_options(log_y: bool) -> ChartOptions {
    ChartOptions {
        log_y,
        ..ChartOptions::default()
    }
}

fn cmd_adjudicate(args: AdjudicateArgs, file: &FileConfig) -> Result<()> {
    let mut cfg = file.adjudication(&args.search);
    if let Some(r) = args.resamples {
        cfg.resamples = r;
    }
    if let Some(r) = args.bootstrap_restarts {
        cfg.bootstrap_restarts = Some(r);
    }
    let slate = args
        .models
        .or_else(|| file.models.clone())
        .unwrap_or_else(|| vec![ModelFamily::Cce0, ModelFamily::Csd0, ModelFamily::Qcc]);
    let train = read_counts(&args.train)?;
    let test = read_counts(&args.test)?;
    let report = adjudicate(&slate, &train, &test, &cfg)?;
    let log_y = args.log_y || file.log_y.unwrap_or(false);
    create_dir(&args.out)?;
    write(&args.out.join("report.json"), &to_json(&report)?)?;
    write(&args.out.join("report.svg"), &render_svg(&report, &chart_options(log_y)))?;
    Ok(())
}

fn cmd_report(args: ReportArgs, file: &FileConfig) -> Result<()> {
    let text = fs::read_to_string(&args.report)
        .with_context(|| format!("reading {}", args.report.display()))?;
    let report = AdjudicationReport::from_json(&text)
        .with_context(|| format!("loading {}", args.report.display()))?;
    let out = args
        .out
        .unwrap_or_else(|| args.report.with_file_name("report.svg"));
    let log_y = args.log_y || file.log_y.unwrap_or(false);
    write(&out, &render_svg(&report, &chart_options(log_y)))
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n >= 1)
        .with_context(|| format!("{THREADS_ENV} must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    init_threads()?;
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Simulate(a) => cmd_simulate(a, &file),
        Command::Fit(a) => cmd_fit(a, &file),
        Command::Adjudicate(a) => cmd_adjudicate(a, &file),
        Command::Report(a) => cmd_report(a, &file),
    }
}

fn error_kind(err: &anyhow::Error) -> &'static str {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<bell_adj::Error>() {
            return e.kind();
        }
        if cause.is::<std::io::Error>() {
            return "io";
        }
        if cause.is::<serde_json::Error>() {
            return "json";
        }
    }
    "error"
}

fn emit_error(kind: &str, message: String) {
    let doc = serde_json::json!({ "error": { "kind": kind, "message": message } });
    eprintln!("{doc}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            emit_error("usage", e.to_string().trim_end().to_string());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            emit_error(error_kind(&e), format!("{e:#}"));
            ExitCode::FAILURE
        }
    }
}

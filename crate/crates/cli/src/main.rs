//! `ecmid`: simulate the E-ECM, generate synthetic data, identify
//! (k_p, k_n, D_e) and run the optimizer benchmark.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ecmid::harness::{
    export_report, generate_profile, run_benchmark_with, run_method, split_seed, write_boxplot_csv,
    write_convergence_csv, write_dataset, write_profile_csv, write_summary_csv, BenchmarkData,
    BenchmarkReport, ExperimentConfig, Method, BOXPLOT_FILE, CONVERGENCE_FILE, REPORT_FILE,
    SUMMARY_FILE,
};
use ecmid::identification::ProfileRecord;
use ecmid::model::simulate;
use ecmid::{Cell, CurrentProfile, Error};
use serde_json::json;

#[derive(Parser)]
#[command(name = "ecmid", version, about = "E-ECM simulation and parameter identification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the terminal voltage for a current profile.
    Simulate(SimulateArgs),
    /// Write a synthetic train/test dataset with its manifest.
    GenData(Common),
    /// Identify the parameters once per selected method.
    Identify(Common),
    /// Run the full benchmark protocol and export the report.
    Bench(Common),
    /// Re-export a saved report.
    Report(ReportArgs),
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON); defaults apply when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed. For gen-data this is the noise seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Objective evaluations per run.
    #[arg(long)]
    budget: Option<usize>,
    /// Repetitions per method.
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    /// Cell parameter file; overrides the config's ground truth.
    #[arg(long)]
    params: Option<PathBuf>,
    /// CSV with `time_s` and `current_A` columns. Without it the config's
    /// train and test profiles are simulated.
    #[arg(long)]
    profile: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Report JSON written by `bench`.
    #[arg(long)]
    report: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    format: Format,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Bo,
    Gd,
    Pso,
    All,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Csv,
    Json,
    All,
}

/// Error tagged with its exit code.
#[derive(Debug)]
enum Failure {
    Config(String),
    Data(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Data(_) => 3,
            Failure::Runtime(_) => 4,
        }
    }

    fn config(e: impl fmt::Display) -> Self {
        Failure::Config(e.to_string())
    }

    /// Input errors: classified by kind, data error when in doubt.
    fn input(e: Error) -> Self {
        if e.is_config_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }

    fn runtime(e: impl fmt::Display) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, msg) = match self {
            Failure::Config(m) => ("config error", m),
            Failure::Data(m) => ("data error", m),
            Failure::Runtime(m) => ("runtime failure", m),
        };
        write!(f, "{kind}: {msg}")
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::GenData(a) => cmd_gen_data(a),
        Command::Identify(a) => cmd_identify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("ecmid: {f}");
            ExitCode::from(f.code())
        }
    }
}

fn load_config(c: &Common, seed_is_noise: bool) -> CliResult<ExperimentConfig> {
    let mut config = match &c.config {
        Some(p) => ExperimentConfig::load(p).map_err(Failure::config)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = c.seed {
        if seed_is_noise {
            config.noise_seed = s;
        } else {
            config.seed = s;
        }
    }
    if let Some(b) = c.budget {
        config.budget = b;
    }
    if let Some(r) = c.reps {
        config.repetitions = r;
    }
    if let Some(m) = c.method {
        config.methods = match m {
            MethodArg::Bo => vec![Method::Bo],
            MethodArg::Gd => vec![Method::Gd],
            MethodArg::Pso => vec![Method::Pso],
            MethodArg::All => Method::ALL.to_vec(),
        };
    }
    config.validate().map_err(Failure::config)?;
    Ok(config)
}

fn create_dir(dir: &Path) -> CliResult {
    fs::create_dir_all(dir).map_err(|e| Failure::runtime(format!("{}: {e}", dir.display())))
}

fn write_text(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| Failure::runtime(format!("{}: {e}", path.display())))
}

/// Reads `time_s` and `current_A` from a CSV; other columns are ignored.
fn read_current_csv(path: &Path) -> CliResult<CurrentProfile> {
    let data = |msg: String| Failure::Data(format!("{}: {msg}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(|e| data(e.to_string()))?;
    let header = r.headers().map_err(|e| data(e.to_string()))?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| data(format!("missing column {name}")))
    };
    let (ti, ii) = (col("time_s")?, col("current_A")?);
    let mut times = Vec::new();
    let mut current = Vec::new();
    for (k, row) in r.records().enumerate() {
        let row = row.map_err(|e| data(e.to_string()))?;
        let parse = |i: usize| -> CliResult<f64> {
            let field = row.get(i).unwrap_or("");
            field
                .trim()
                .parse()
                .map_err(|_| data(format!("row {}: not a number: {field:?}", k + 1)))
        };
        times.push(parse(ti)?);
        current.push(parse(ii)?);
    }
    if times.len() < 2 {
        return Err(data("need at least two samples".into()));
    }
    let dt = times[1] - times[0];
    if times
        .iter()
        .enumerate()
        .any(|(k, t)| (t - times[0] - k as f64 * dt).abs() > 1e-6 * dt.abs().max(1.0))
    {
        return Err(data("sampling is not uniform".into()));
    }
    CurrentProfile::new(dt, current).map_err(|e| data(e.to_string()))
}

fn cmd_simulate(a: SimulateArgs) -> CliResult {
    let config = load_config(&a.common, false)?;
    let cell = match &a.params {
        Some(p) => Cell::load(p).map_err(Failure::input)?,
        None => config.cell().map_err(Failure::input)?,
    };
    let profiles: Vec<(String, CurrentProfile)> = match &a.profile {
        Some(p) => {
            let name = p.file_stem().map_or("profile".into(), |s| s.to_string_lossy().into_owned());
            vec![(name, read_current_csv(p)?)]
        }
        None => config
            .train
            .iter()
            .chain(&config.test)
            .map(|s| Ok((s.name.clone(), generate_profile(s, &cell.params)?)))
            .collect::<Result<_, Error>>()
            .map_err(Failure::input)?,
    };
    create_dir(&a.common.out)?;
    for (name, current) in profiles {
        let voltage = simulate(&cell.params, &cell.ocv_p, &cell.ocv_n, &current).map_err(Failure::runtime)?;
        let path = a.common.out.join(format!("sim_{name}.csv"));
        let record = ProfileRecord {
            name,
            current,
            voltage,
        };
        write_profile_csv(&record, &path).map_err(Failure::runtime)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn cmd_gen_data(a: Common) -> CliResult {
    let config = load_config(&a, true)?;
    if config.dataset.is_some() {
        return Err(Failure::Config("gen-data synthesizes data; remove `dataset` from the config".into()));
    }
    let data = BenchmarkData::prepare(&config).map_err(Failure::input)?;
    let manifest = write_dataset(&a.out, &data.train, &data.test, config.noise_sigma_v).map_err(Failure::runtime)?;
    println!("{}", manifest.display());
    Ok(())
}

fn cmd_identify(a: Common) -> CliResult {
    let config = load_config(&a, false)?;
    let data = BenchmarkData::prepare(&config).map_err(Failure::input)?;
    create_dir(&a.out)?;
    let seed = split_seed(config.seed, 0);
    let names: Vec<&str> = config.bounds.names().collect();
    let mut results = Vec::new();
    for &method in &config.methods {
        let train = data.train_problem(&config).map_err(Failure::input)?;
        let result = run_method(method, &config, train.objective(), seed).map_err(Failure::runtime)?;
        let test = data.test_problem(&config).map_err(Failure::input)?;
        let test_loss = test.loss(&result.best_theta).map_err(Failure::runtime)?.loss;
        let trace = a.out.join(format!("identify_{method}.csv"));
        result.write_trace_csv(&config.bounds, &trace).map_err(Failure::runtime)?;
        let theta: serde_json::Map<String, serde_json::Value> =
            names.iter().zip(&result.best_theta).map(|(n, v)| (n.to_string(), json!(v))).collect();
        let rel_error = data.train.truth.as_ref().map(|t| {
            t.iter()
                .zip(&result.best_theta)
                .map(|(t, b)| (b - t) / t)
                .collect::<Vec<_>>()
        });
        println!(
            "{method}: train loss {:.4e} V^2, test loss {:.4e} V^2, theta {:?}",
            result.best_loss, test_loss, result.best_theta
        );
        results.push(json!({
            "method": method,
            "seed": seed,
            "best_theta": theta,
            "train_loss": result.best_loss,
            "test_loss": test_loss,
            "evaluations": result.evaluations,
            "objective_calls": train.calls(),
            "truth": data.train.truth,
            "relative_error": rel_error,
            "trace": trace.file_name().map(|f| f.to_string_lossy().into_owned()),
        }));
    }
    let text = serde_json::to_string_pretty(&json!({ "config": config, "results": results }))
        .map_err(Failure::runtime)?;
    write_text(&a.out.join("identify.json"), &(text + "\n"))
}

fn print_summary(report: &BenchmarkReport) {
    println!("method   runs  fail  train mean V^2  train var      test mean V^2   test var       time s");
    for (s, t) in report.body.summary.iter().zip(&report.timing.summary) {
        println!(
            "{:<8} {:>4}  {:>4}  {:<14.4e}  {:<13.4e}  {:<14.4e}  {:<13.4e}  {:.3}",
            s.method.to_string(),
            s.runs,
            s.failures,
            s.train_mean,
            s.train_var,
            s.test_mean,
            s.test_var,
            t.time_mean_s
        );
    }
}

fn cmd_bench(a: Common) -> CliResult {
    let config = load_config(&a, false)?;
    let data = BenchmarkData::prepare(&config).map_err(Failure::input)?;
    log::info!(
        "{} repetitions x {:?}, budget {}",
        config.repetitions,
        config.methods.iter().map(|m| m.name()).collect::<Vec<_>>(),
        config.budget
    );
    let report = run_benchmark_with(&config, &data).map_err(Failure::runtime)?;
    export_report(&report, &data, &a.out).map_err(Failure::runtime)?;
    print_summary(&report);
    println!("report written to {}", a.out.join(REPORT_FILE).display());
    Ok(())
}

fn cmd_report(a: ReportArgs) -> CliResult {
    let report = BenchmarkReport::load(&a.report).map_err(Failure::input)?;
    create_dir(&a.out)?;
    match a.format {
        Format::All => {
            let data = BenchmarkData::prepare(&report.body.config).map_err(Failure::input)?;
            export_report(&report, &data, &a.out).map_err(Failure::runtime)?;
        }
        Format::Json => report.save(a.out.join(REPORT_FILE)).map_err(Failure::runtime)?,
        Format::Csv => {
            write_summary_csv(&report, &a.out.join(SUMMARY_FILE)).map_err(Failure::runtime)?;
            write_boxplot_csv(&report, &a.out.join(BOXPLOT_FILE)).map_err(Failure::runtime)?;
            write_convergence_csv(&report, &a.out.join(CONVERGENCE_FILE)).map_err(Failure::runtime)?;
        }
    }
    print_summary(&report);
    Ok(())
}

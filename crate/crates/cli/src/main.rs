//! `merw`: simulate elephant walks and urns, classify memory regimes, print
//! spectral data and run the limit-theorem verification batteries.
//!
//! Exit codes: 0 success, 1 statistical failure, 2 usage or domain error,
//! 3 step budget exceeded.

mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;

use merw::montecarlo::{
    replica_rng, verify_center_of_mass, verify_critical, verify_diffusive_clt, verify_slln,
    verify_superdiffusive, CenterOfMassConfig, CltConfig, CriticalConfig, Engine, RunConfig,
    SllnConfig, SuperdiffusiveConfig, VerificationReport, DEFAULT_STEP_BUDGET,
};
use merw::urn::simulate_urn_path;
use merw::walk::simulate_path;
use merw::{classify_regime, mean_replacement_matrix, Error, ModelParams, Probability, Regime, StepDirection};

use output::{to_json, OutputRecord, SCHEMA_VERSION};

#[derive(Parser)]
#[command(name = "merw", version, about = "Multi-dimensional elephant random walk toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate walk or urn replicas and emit snapshot positions.
    Simulate(SimulateArgs),
    /// Report the critical memory parameter, regime and exponent.
    Classify(ModelArgs),
    /// Print the mean replacement matrix and its spectrum.
    Spectrum(ModelArgs),
    /// Run verification batteries for the limit theorems.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Dimension d >= 1.
    #[arg(short = 'd', long = "dimension")]
    dimension: usize,
    /// Memory parameter p in (0,1), decimal or "a/b".
    #[arg(short = 'p', long = "memory", allow_hyphen_values = true)]
    memory: String,
    /// First-step parameter q in (0,1).
    #[arg(short = 'q', long = "first-step", default_value = "1/2", allow_hyphen_values = true)]
    first_step: String,
    /// Direction taken with probability q at the first step.
    #[arg(long, default_value = "+e1", allow_hyphen_values = true)]
    designated: String,
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams, Error> {
        let p: Probability = self.memory.parse()?;
        let q: Probability = self.first_step.parse()?;
        let dir: StepDirection = self.designated.parse()?;
        ModelParams::new(self.dimension, p, q)?.with_designated(dir)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Walk,
    Urn,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Walk => Engine::Walk,
            EngineArg::Urn => Engine::Urn,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
    Json,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    replicas: Option<usize>,
    /// Master seed; drawn from entropy and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "walk")]
    engine: EngineArg,
    /// Maximum total number of steps (replicas x horizon).
    #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
    budget: u64,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Horizon n.
    #[arg(short = 'n', long = "horizon")]
    horizon: u64,
    #[command(flatten)]
    run: RunArgs,
    /// Comma-separated snapshot times (default: the horizon).
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["fractions", "exponents"])]
    snapshots: Option<Vec<u64>>,
    /// Snapshot fractions s, times floor(s n).
    #[arg(long, value_delimiter = ',', conflicts_with = "exponents")]
    fractions: Option<Vec<f64>>,
    /// Snapshot exponents t, times floor(n^t).
    #[arg(long, value_delimiter = ',')]
    exponents: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Battery {
    Slln,
    Clt,
    Critical,
    Superdiffusive,
    Cm,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    battery: Battery,
    #[command(flatten)]
    model: ModelArgs,
    /// Horizon n for clt, critical, cm and the end of the slln ladder.
    #[arg(short = 'n', long = "horizon", default_value_t = 10_000)]
    horizon: u64,
    #[command(flatten)]
    run: RunArgs,
    /// Snapshot fractions for clt.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1")]
    fractions: Vec<f64>,
    /// Snapshot exponents for critical.
    #[arg(long, value_delimiter = ',', default_value = "0.75,1")]
    exponents: Vec<f64>,
    /// First ladder time for slln and superdiffusive.
    #[arg(long, default_value_t = 1_000)]
    n0: u64,
    /// Number of doublings of the superdiffusive ladder.
    #[arg(long, default_value_t = 7)]
    doublings: u32,
    /// Growth factor of the slln ladder.
    #[arg(long, default_value_t = 10)]
    factor: u64,
    /// Optional slln threshold on |S_N/N|.
    #[arg(long)]
    threshold: Option<f64>,
    /// Non-degeneracy level for the superdiffusive limit.
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
}

/// A failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 2,
            message: format!("I/O error: {e}"),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure {
            code: 2,
            message: format!("serialization error: {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().collect();
    match dispatch(cli.command, argv) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(command: Command, argv: Vec<String>) -> Result<u8, Failure> {
    match command {
        Command::Simulate(args) => simulate(args, argv),
        Command::Classify(args) => classify(args, argv),
        Command::Spectrum(args) => spectrum(args, argv),
        Command::Verify(args) => verify(args, argv),
    }
}

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s: u64 = rand::rng().random();
        eprintln!("seed: {s}");
        s
    })
}

fn params_json(params: &ModelParams) -> serde_json::Value {
    serde_json::to_value(params).expect("parameters serialize")
}

fn write_record<T: Serialize>(
    out: &Option<PathBuf>,
    command: &str,
    argv: Vec<String>,
    seed: Option<u64>,
    params: &ModelParams,
    results: T,
) -> Result<(), Failure> {
    let record = OutputRecord {
        schema_version: SCHEMA_VERSION,
        command,
        argv,
        seed,
        params: params_json(params),
        results,
    };
    let mut w = sink(out)?;
    writeln!(w, "{}", to_json(&record)?)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct Row<'a> {
    replica: usize,
    n: u64,
    x: &'a [i64],
}

fn snapshot_times(args: &SimulateArgs) -> Result<Vec<u64>, Failure> {
    let n = args.horizon;
    let usage = |m: &str| Failure {
        code: 2,
        message: m.to_string(),
    };
    let times: Vec<u64> = if let Some(ts) = &args.snapshots {
        ts.clone()
    } else if let Some(fr) = &args.fractions {
        if fr.iter().any(|&s| !(s > 0.0 && s <= 1.0)) {
            return Err(usage("fractions must lie in (0, 1]"));
        }
        fr.iter().map(|s| (s * n as f64).floor() as u64).collect()
    } else if let Some(ex) = &args.exponents {
        if ex.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
            return Err(usage("exponents must lie in (0, 1]"));
        }
        ex.iter().map(|&t| (n as f64).powf(t).round().min(n as f64) as u64).collect()
    } else {
        vec![n]
    };
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage("snapshot times must be strictly increasing"));
    }
    if times.iter().any(|&t| t > n) {
        return Err(usage("snapshot times must not exceed the horizon"));
    }
    Ok(times)
}

fn simulate(args: SimulateArgs, argv: Vec<String>) -> Result<u8, Failure> {
    let params = args.model.params()?;
    let replicas = args.run.replicas.unwrap_or(1);
    let requested = replicas as u128 * args.horizon as u128;
    if requested > args.run.budget as u128 {
        return Err(Error::BudgetExceeded {
            requested,
            budget: args.run.budget,
        }
        .into());
    }
    let times = snapshot_times(&args)?;
    let seed = resolve_seed(args.run.seed);
    let engine: Engine = args.run.engine.into();
    let d = params.dim();

    let mut w = sink(&args.run.out)?;
    let mut rows_json = Vec::new();
    if args.format == Format::Csv {
        let header: Vec<String> = ["replica".to_string(), "n".to_string()]
            .into_iter()
            .chain((1..=d).map(|k| format!("x_{k}")))
            .collect();
        writeln!(w, "{}", header.join(","))?;
    }
    for replica in 0..replicas {
        let mut rng = replica_rng(seed, replica as u64);
        let snap = match engine {
            Engine::Walk => simulate_path(&params, args.horizon, &times, &mut rng)?,
            Engine::Urn => simulate_urn_path(&params, args.horizon, &times, &mut rng)?,
        };
        for (&n, x) in snap.times.iter().zip(&snap.positions) {
            match args.format {
                Format::Csv => {
                    let cells: Vec<String> = x.iter().map(|v| v.to_string()).collect();
                    writeln!(w, "{replica},{n},{}", cells.join(","))?;
                }
                Format::Jsonl => writeln!(w, "{}", to_json(&Row { replica, n, x })?)?,
                Format::Json => rows_json.push(serde_json::json!({ "replica": replica, "n": n, "x": x })),
            }
        }
    }
    if args.format == Format::Json {
        drop(w);
        write_record(
            &args.run.out,
            "simulate",
            argv,
            Some(seed),
            &params,
            serde_json::json!({ "engine": engine, "rows": rows_json }),
        )?;
    } else {
        w.flush()?;
    }
    Ok(0)
}

fn classify(args: ModelArgs, argv: Vec<String>) -> Result<u8, Failure> {
    let params = args.params()?;
    let report = classify_regime(&params);
    write_record(&None, "classify", argv, None, &params, report)?;
    Ok(0)
}

fn spectrum(args: ModelArgs, argv: Vec<String>) -> Result<u8, Failure> {
    let params = args.params()?;
    let spectral = mean_replacement_matrix(&params);
    write_record(&None, "spectrum", argv, None, &params, spectral)?;
    Ok(0)
}

fn batteries_for(selector: Battery, regime: Regime) -> Vec<Battery> {
    match selector {
        Battery::All => {
            let mut v = vec![Battery::Slln];
            match regime {
                Regime::Diffusive => v.extend([Battery::Clt, Battery::Cm]),
                Regime::Critical => v.push(Battery::Critical),
                Regime::Superdiffusive => v.push(Battery::Superdiffusive),
            }
            v
        }
        one => vec![one],
    }
}

fn run_battery(battery: Battery, args: &VerifyArgs, run: &RunConfig) -> Result<VerificationReport, Error> {
    match battery {
        Battery::Clt => {
            let mut cfg = CltConfig::new(run.clone(), args.horizon);
            cfg.fractions = args.fractions.clone();
            verify_diffusive_clt(&cfg)
        }
        Battery::Critical => {
            let mut cfg = CriticalConfig::new(run.clone(), args.horizon);
            cfg.exponents = args.exponents.clone();
            verify_critical(&cfg)
        }
        Battery::Cm => verify_center_of_mass(&CenterOfMassConfig {
            run: run.clone(),
            horizon: args.horizon,
        }),
        Battery::Superdiffusive => {
            let mut cfg = SuperdiffusiveConfig::new(run.clone(), args.n0, args.doublings);
            cfg.epsilon = args.epsilon;
            verify_superdiffusive(&cfg)
        }
        Battery::Slln => {
            if args.factor < 2 || args.n0 == 0 || args.horizon < args.n0 * args.factor {
                return Err(Error::Config(
                    "slln needs factor >= 2 and a horizon of at least n0 * factor".into(),
                ));
            }
            let mut rungs = 1;
            while args.n0 * args.factor.pow(rungs) <= args.horizon {
                rungs += 1;
            }
            let mut cfg = SllnConfig::new(run.clone(), args.n0, args.factor, rungs);
            cfg.threshold = args.threshold;
            verify_slln(&cfg)
        }
        Battery::All => unreachable!("expanded before dispatch"),
    }
}

fn print_report(report: &VerificationReport) {
    let tag = if report.passed() { "PASS" } else { "FAIL" };
    eprintln!(
        "[{tag}] {:?} (d = {}, p = {}, engine = {}, R = {}, seed = {}, {} ms)",
        report.theorem,
        report.params.dim(),
        report.params.memory(),
        report.engine,
        report.replicas,
        report.seed,
        report.runtime_ms
    );
    for c in &report.checks {
        let status = match (c.passed, c.gating) {
            (true, _) => "ok  ",
            (false, true) => "FAIL",
            (false, false) => "diag",
        };
        let z = c.z_score.map(|z| format!(" z = {z:+.2}")).unwrap_or_default();
        eprintln!(
            "  {status} {}: empirical {:.6} vs {:.6} (tol {:.4}){z}",
            c.name, c.empirical, c.theoretical, c.tolerance
        );
    }
}

#[derive(Serialize)]
struct VerifyResults {
    battery: Battery,
    regime: Regime,
    passed: bool,
    reports: Vec<VerificationReport>,
}

fn verify(args: VerifyArgs, argv: Vec<String>) -> Result<u8, Failure> {
    let params = args.model.params()?;
    let regime = classify_regime(&params).regime;
    let seed = resolve_seed(args.run.seed);
    let mut run = RunConfig::new(params, args.run.replicas.unwrap_or(1_000), seed);
    run.engine = args.run.engine.into();
    run.step_budget = args.run.budget;

    let mut reports = Vec::new();
    for battery in batteries_for(args.battery, regime) {
        let report = run_battery(battery, &args, &run)?;
        print_report(&report);
        reports.push(report);
    }
    let passed = reports.iter().all(VerificationReport::passed);
    write_record(
        &args.run.out,
        "verify",
        argv,
        Some(seed),
        &params,
        VerifyResults {
            battery: args.battery,
            regime,
            passed,
            reports,
        },
    )?;
    Ok(if passed { 0 } else { 1 })
}

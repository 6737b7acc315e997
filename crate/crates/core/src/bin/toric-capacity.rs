use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use toric_capacity::covolume::{capacity, covolume, Method, MethodKind};
use toric_capacity::harness::config::parse_method;
use toric_capacity::harness::curve::fmt17;
use toric_capacity::harness::suite::run_suite;
use toric_capacity::harness::{run_capacity_curve, run_checks, ExperimentConfig, SetFile};
use toric_capacity::{Error, ReinhardtSpec};

#[derive(Parser)]
#[command(
    name = "toric-capacity",
    version,
    about = "Capacities, covolumes and Brunn-Minkowski checks for toric compacts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Overrides,
}

#[derive(Args, Clone, Default)]
struct Overrides {
    /// exact | mc
    #[arg(long, global = true)]
    method: Option<String>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Inequality slack tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Monge-Ampere capacity of a toric set relative to the unit polydisk.
    Capacity { set: PathBuf },
    /// Covolume of the copolar of the set's log image.
    Covolume { set: PathBuf },
    /// Euclidean volume of the set.
    Volume { set: PathBuf },
    /// Capacity curve along the geometric-mean interpolation.
    Curve {
        config: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run all inequality checks on a configuration.
    Check { config: PathBuf },
    /// Run the checks on seeded random instances.
    Selftest {
        #[arg(long, default_value_t = 100)]
        count: u64,
    },
}

enum Failure {
    Violation(String),
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load_set(path: &Path) -> Result<ReinhardtSpec, Error> {
    SetFile::from_json(&read(path)?)?.to_spec()
}

fn load_config(path: &Path, opts: &Overrides) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::from_json(&read(path)?)?;
    if let Some(m) = &opts.method {
        cfg.method = parse_method(m)?;
    }
    if let Some(s) = opts.samples {
        cfg.samples = s;
    }
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    if let Some(t) = opts.tol {
        cfg.tolerances.ineq_slack = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn method_from(opts: &Overrides) -> Result<Method, Error> {
    let kind = match &opts.method {
        Some(m) => parse_method(m)?,
        None => MethodKind::Exact,
    };
    Ok(match kind {
        MethodKind::Exact => Method::Exact,
        MethodKind::MonteCarlo => Method::MonteCarlo {
            samples: opts.samples.unwrap_or(1_000_000),
            seed: opts.seed.unwrap_or(0),
        },
    })
}

fn print_result(label: &str, value: f64, std_err: f64, method: Method) {
    let name = match method {
        Method::Exact => "exact",
        Method::MonteCarlo { .. } => "mc",
    };
    println!("{label} = {}", fmt17(value));
    println!("std_err = {}", fmt17(std_err));
    println!("method = {name}");
}

fn run(cli: Cli) -> Result<(), Failure> {
    let opts = cli.opts;
    match cli.command {
        Command::Capacity { set } => {
            let method = method_from(&opts)?;
            let r = capacity(&load_set(&set)?.log_image()?, method)?;
            print_result("capacity", r.value, r.std_err, method);
        }
        Command::Covolume { set } => {
            let method = method_from(&opts)?;
            let r = covolume(&load_set(&set)?.log_image()?.copolar(), method)?;
            print_result("covolume", r.value, r.std_err, method);
        }
        Command::Volume { set } => {
            let method = method_from(&opts)?;
            let r = load_set(&set)?.volume(method)?;
            print_result("volume", r.value, r.std_err, method);
        }
        Command::Curve { config, csv } => {
            let cfg = load_config(&config, &opts)?;
            let report = run_capacity_curve(&cfg)?;
            for row in report.failed_rows() {
                eprintln!("t = {}: {}", row.t, row.error.as_deref().unwrap_or(""));
            }
            let text = report.to_csv();
            match csv {
                Some(path) => fs::write(&path, text)
                    .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            if report.failed_rows().next().is_some() {
                return Err(Error::Numeric("some rows failed".into()).into());
            }
        }
        Command::Check { config } => {
            let cfg = load_config(&config, &opts)?;
            let (report, checks) = run_checks(&cfg)?;
            println!(
                "weights = ({}, {}), equality_case = {}",
                fmt17(report.c0),
                fmt17(report.c1),
                report.equality_case
            );
            for c in &checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                println!(
                    "{tag} {:<18} worst = {}  {}",
                    c.name,
                    fmt17(c.worst),
                    c.detail
                );
            }
            if checks.iter().any(|c| !c.passed) {
                return Err(Failure::Violation(cfg.to_json()));
            }
        }
        Command::Selftest { count } => {
            let seed = opts.seed.unwrap_or(0);
            let samples = opts.samples.unwrap_or(20_000);
            let results = run_suite(count, seed, samples)?;
            let failed: Vec<_> = results.iter().filter(|r| !r.passed()).collect();
            println!(
                "selftest: {} instances, {} passed, {} failed",
                results.len(),
                results.len() - failed.len(),
                failed.len()
            );
            if let Some(first) = failed.first() {
                for c in first.checks.iter().filter(|c| !c.passed) {
                    eprintln!(
                        "instance {}: {} worst = {}",
                        first.index,
                        c.name,
                        fmt17(c.worst)
                    );
                }
                return Err(Failure::Violation(first.config.to_json()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation(dump)) => {
            eprintln!("inequality violated; offending instance:\n{dump}");
            ExitCode::from(1)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Command-line front end: `spinfw <mode> [--config FILE] [--out DIR] ...`.

mod config;
mod error;
mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime};

use clap::{Args, Parser, Subcommand};

use config::{parse_config, parse_lambda_list, Mode, RunConfig};
use error::CliError;
use experiments::{lookup, RunContext};
use output::{config_hash, write_metadata, write_results, Profile, RunRecord};

#[derive(Parser)]
#[command(name = "spinfw", version, about = "Classical and quantum spin dynamics experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the classical orbit-spin equations of motion.
    Simulate(Common),
    /// Boost fields, momentum and spin; covariance residual scaling.
    Boost(Common),
    /// Exact operator-algebra checks.
    VerifyAlgebra(Common),
    /// Lattice Foldy-Wouthuysen checks.
    VerifyFw(Common),
    /// Run every acceptance criterion.
    Report(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed for randomized checks; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Profile::Default)]
    profile: Profile,
    /// Series order for verify-algebra.
    #[arg(long)]
    order: Option<u32>,
    /// Comma-separated field amplitudes.
    #[arg(long)]
    lambda_list: Option<String>,
}

impl Command {
    fn split(self) -> (Mode, Common) {
        match self {
            Command::Simulate(c) => (Mode::Simulate, c),
            Command::Boost(c) => (Mode::Boost, c),
            Command::VerifyAlgebra(c) => (Mode::VerifyAlgebra, c),
            Command::VerifyFw(c) => (Mode::VerifyFw, c),
            Command::Report(c) => (Mode::Report, c),
        }
    }
}

fn load(mode: Mode, args: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(p) => parse_config(p)?,
        None => RunConfig::default(),
    };
    if let Some(m) = cfg.mode {
        if m != mode {
            return Err(spinfw::Error::Config(format!(
                "config declares mode '{}' but the subcommand is '{}'",
                m.label(),
                mode.label()
            ))
            .into());
        }
    }
    cfg.mode = Some(mode);
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = args.order {
        cfg.algebra.order = o;
    }
    if let Some(text) = &args.lambda_list {
        let l = parse_lambda_list(text).map_err(|e| spinfw::Error::Config(format!("--lambda-list: {e}")))?;
        match mode {
            Mode::Boost => cfg.boost.lambdas = l,
            _ => cfg.fw.lambdas = l,
        }
    }
    let issues = cfg.validate(None);
    if !issues.is_empty() {
        return Err(config::ConfigError::Invalid(issues).into());
    }
    Ok(cfg)
}

fn run(mode: Mode, args: Common) -> Result<bool, CliError> {
    let started = SystemTime::now();
    let clock = Instant::now();
    let cfg = load(mode, &args)?;
    std::fs::create_dir_all(&args.out).map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;
    let ctx = RunContext { config: &cfg, out: &args.out, seed: cfg.seed };
    let exp = lookup(mode);
    let outcome = exp.run(&ctx);

    let (checks, artifacts, summary, report, failure) = match outcome {
        Ok(o) => (o.checks, o.artifacts, o.summary, o.report, None),
        // bad input is reported without writing results
        Err(e) if e.exit_code() != 1 => return Err(e),
        Err(e) => (Vec::new(), Vec::new(), serde_json::Value::Null, None, Some(e)),
    };
    let record = RunRecord {
        mode,
        profile: args.profile,
        seed: cfg.seed,
        config_hash: config_hash(&cfg),
        checks: &checks,
        artifacts: &artifacts,
        summary,
        error: failure.as_ref().map(|e| e.to_string()),
    };
    write_results(&args.out, &record)?;
    if let Some(text) = &report {
        std::fs::write(args.out.join("report.txt"), text).map_err(|e| CliError::Io(e.to_string()))?;
    }
    write_metadata(&args.out, &record, exp.about(), started, clock.elapsed())?;

    for c in &checks {
        let status = match (c.pass, record.profile.accepts(c)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (expected)",
            (false, false) => "FAIL",
        };
        println!("{:<44} {status:<16} {}", c.name, c.summary());
    }
    if let Some(e) = failure {
        return Err(e);
    }
    println!("{}: {} -> {}", mode.label(), if record.pass() { "pass" } else { "FAIL" }, args.out.display());
    Ok(record.pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = cli.command.split();
    match run(mode, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

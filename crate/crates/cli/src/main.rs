//! `eulerci`: batch entry point for the verification suites, the improvement engine and the path builder.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage or config error, 3 internal hard failure.
//! Every nonzero exit prints one JSON witness line on stderr and, when the output
//! directory exists, also writes it to `witness.json`.

mod config;
mod engine;
mod geometry;
mod path;
mod potential;
mod report;

use clap::{Parser, Subcommand};
use report::{CliError, WitnessRecord, EXIT_CHECK, EXIT_PASS};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "eulerci", version, about = "Verification suites, improvement engine and dyadic path builder")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Gauge, enclosing-ball, convexity and Hessian checks over a body sweep.
    VerifyGeometry(Flags),
    /// Wave-cone, frame, potential-operator and state-map identities.
    VerifyPotential(Flags),
    /// Improvement rounds on a constant fixture or a checkpoint.
    RunEngine(Flags),
    /// Dyadic midpoint path between two solution fixtures.
    BuildPath(Flags),
}

#[derive(clap::Args, Debug, Clone)]
struct Flags {
    /// JSON run configuration.
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    /// Override a config value by dotted key, e.g. `engine.iterate.rounds=3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Worker threads for parallel stages.
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyGeometry(_) => "verify-geometry",
            Command::VerifyPotential(_) => "verify-potential",
            Command::RunEngine(_) => "run-engine",
            Command::BuildPath(_) => "build-path",
        }
    }

    fn flags(&self) -> &Flags {
        match self {
            Command::VerifyGeometry(f) | Command::VerifyPotential(f) | Command::RunEngine(f) | Command::BuildPath(f) => f,
        }
    }
}

fn execute(command: &Command) -> (Option<PathBuf>, Result<Vec<serde_json::Value>, CliError>) {
    let flags = command.flags();
    let cfg = match config::load(&flags.config, &flags.set, std::env::var(config::SEED_ENV).ok()) {
        Ok(c) => c,
        Err(e) => return (flags.out.clone(), Err(e)),
    };
    let out = flags.out.clone().unwrap_or_else(|| PathBuf::from(cfg.out.clone().unwrap_or_else(|| "eulerci-out".into())));
    let result = (|| {
        if let Some(n) = flags.threads {
            if n == 0 {
                return Err(CliError::usage("--threads must be at least 1"));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Internal { message: format!("thread pool: {e}"), witness: serde_json::Value::Null })?;
        }
        std::fs::create_dir_all(&out).map_err(|e| CliError::usage(format!("cannot create output directory {}: {e}", out.display())))?;
        std::fs::write(out.join("config.json"), serde_json::to_string_pretty(&cfg)? + "\n")?;
        let _ = std::fs::remove_file(out.join("witness.json"));
        match command {
            Command::VerifyGeometry(_) => report::write_checks(&out.join("geometry.csv"), &geometry::run(&cfg.geometry, cfg.seed)?),
            Command::VerifyPotential(_) => report::write_checks(&out.join("potential.csv"), &potential::run(&cfg.potential, cfg.seed)?),
            Command::RunEngine(_) => engine::run(&cfg.engine, &out),
            Command::BuildPath(_) => path::run(&cfg.path, &out),
        }
    })();
    (Some(out), result)
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(v) => v,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                std::process::exit(EXIT_PASS);
            }
            let _ = e.print();
            let command = std::env::args().nth(1).unwrap_or_default();
            CliError::usage(e.to_string().trim().to_string()).record(&command).emit(None);
            std::process::exit(report::EXIT_USAGE);
        }
    };
    let name = cli.command.name();
    let (out, result) = execute(&cli.command);
    let code = match result {
        Ok(failures) if failures.is_empty() => EXIT_PASS,
        Ok(failures) => {
            WitnessRecord { command: name.into(), exit_code: EXIT_CHECK, kind: "check_failure".into(), failures }.emit(out.as_deref());
            EXIT_CHECK
        }
        Err(e) => {
            eprintln!("eulerci {name}: {}", describe(&e));
            e.record(name).emit(out.as_deref());
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn describe(e: &CliError) -> &str {
    match e {
        CliError::Usage { message } | CliError::Internal { message, .. } => message,
    }
}

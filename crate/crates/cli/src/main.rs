use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use photodetect::commands::{self, SweepError, SweepRange};
use photodetect::config::RunConfig;
use photodetect::output::{Format, Table};
use photodetect::CliError;
use photodetect_core::Outcome;

#[derive(Parser)]
#[command(
    version,
    about = "Photodetection with an imperfect atom-pointer detector"
)]
struct Cli {
    /// JSON run configuration
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// RNG seed, overrides the config
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file instead of stdout, overrides the config
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format, overrides the config
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check detector constraints and channel identities
    Validate,
    /// Posterior over theta after one outcome, numeric and closed form
    Posterior {
        /// Outcome: 0 no click, 1 ground click, 2 excited click
        #[arg(long, value_parser = parse_outcome)]
        xi: Outcome,
    },
    /// Posterior density at one theta as eps_g is swept
    SweepEps {
        #[arg(long, allow_negative_numbers = true)]
        start: f64,
        #[arg(long, allow_negative_numbers = true)]
        stop: f64,
        #[arg(long, allow_negative_numbers = true)]
        step: f64,
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
        #[arg(long, value_parser = parse_outcome)]
        xi: Outcome,
    },
    /// Sample a measurement trajectory starting from |psi(theta)>
    Simulate {
        #[arg(long)]
        rounds: usize,
        #[arg(long, allow_negative_numbers = true)]
        theta: f64,
    },
}

fn parse_outcome(s: &str) -> Result<Outcome, String> {
    let xi: u32 = s
        .parse()
        .map_err(|_| format!("expected 0, 1 or 2, got {s:?}"))?;
    Outcome::from_index(xi).map_err(|e| e.to_string())
}

fn emit(table: &Table, cli: &Cli, cfg: &RunConfig) -> Result<(), CliError> {
    let format = cli.format.unwrap_or(cfg.format);
    match cli.out.as_ref().or(cfg.output.as_ref()) {
        Some(path) => {
            let io_err = |source| CliError::Output {
                path: path.clone(),
                source,
            };
            let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
            table
                .write(format, &mut w)
                .and_then(|()| w.flush())
                .map_err(io_err)
        }
        None => {
            let stdout = io::stdout().lock();
            table
                .write(format, stdout)
                .map_err(|source| CliError::Output {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("--config PATH is required".into()))?;
    let cfg = RunConfig::load(path)?;
    let seed = cli.seed.unwrap_or(cfg.seed);
    match cli.command {
        Command::Validate => {
            let report = commands::validate(&cfg, seed);
            emit(&report.table, cli, &cfg)?;
            if report.all_passed {
                Ok(())
            } else {
                let reason = match cfg.detector().and(cfg.jc()) {
                    Err(e) => e.to_string(),
                    Ok(_) => "one or more checks exceeded tolerance".into(),
                };
                Err(CliError::Validation(reason))
            }
        }
        Command::Posterior { xi } => emit(&commands::posterior(&cfg, xi)?, cli, &cfg),
        Command::SweepEps {
            start,
            stop,
            step,
            theta,
            xi,
        } => {
            let range = SweepRange { start, stop, step };
            let table = commands::sweep_eps(&cfg, range, theta, xi).map_err(|e| match e {
                SweepError::Range(_) => CliError::Usage(e.to_string()),
                SweepError::Config(e) => CliError::Model(e),
            })?;
            emit(&table, cli, &cfg)
        }
        Command::Simulate { rounds, theta } => {
            emit(&commands::simulate(&cfg, rounds, theta, seed)?, cli, &cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("photodetect: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

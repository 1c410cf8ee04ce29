use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use noma_eh_cli::commands::{self, DEFAULT_TOL};
use noma_eh_cli::config::{Overrides, RunConfig};
use noma_eh_cli::output::Format;
use noma_eh_cli::{CliError, Outcome, EXIT_USAGE};

/// Achievable rate regions of two-user NOMA with an energy-harvesting near user.
#[derive(Debug, Parser)]
#[command(name = "noma-region", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the boundary of a rate region.
    Region {
        /// ts, ps, gen or tdma.
        #[arg(long)]
        scheme: Option<String>,
        /// const or dyn.
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        config: PathBuf,
        /// Number of R1 samples on [0, r1_max].
        #[arg(long)]
        points: Option<usize>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Check the solver against a brute-force reference.
    Verify {
        /// ts, ps or gen.
        #[arg(long)]
        scheme: Option<String>,
        /// const or dyn.
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        config: PathBuf,
        /// Largest accepted gap, bits/s/Hz.
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Decoder power handed to the oracle instead of the configured one, mW.
        #[arg(long, hide = true)]
        oracle_psic_mw: Option<f64>,
    },
    /// Time-sharing hull of a region file.
    Hull {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Region {
            scheme,
            model,
            config,
            points,
            out,
            format,
        } => {
            let overrides = Overrides {
                scheme,
                power_model: model,
                points,
            };
            let cfg = RunConfig::load(&config, &overrides)?;
            commands::region(&cfg, format, out.as_deref())
        }
        Command::Verify {
            scheme,
            model,
            config,
            tol,
            oracle_psic_mw,
        } => {
            if tol.is_nan() || tol < 0.0 {
                return Err(CliError::Usage(format!(
                    "--tol must be non-negative, got {tol}"
                )));
            }
            let overrides = Overrides {
                scheme,
                power_model: model,
                points: None,
            };
            let cfg = RunConfig::load(&config, &overrides)?;
            commands::verify(
                &cfg,
                tol,
                oracle_psic_mw.map(|mw| mw * 1e-3),
                io::stdout().lock(),
            )
        }
        Command::Hull { input, out } => commands::hull(&input, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

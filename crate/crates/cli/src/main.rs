use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use tradeflow_cli::commands::{self, Failure, Mode, Report, Status};
use tradeflow_cli::scenario::parse_scenario;

/// Two-country trade flow model.
#[derive(Debug, Parser)]
#[command(name = "tradeflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a one-good scenario and write its time series.
    #[command(group(ArgGroup::new("mode").args(["analytic", "numeric", "both"])))]
    Simulate {
        scenario: PathBuf,
        /// Piecewise closed-form solution (default).
        #[arg(long)]
        analytic: bool,
        /// Fixed-step RK4 with event location.
        #[arg(long)]
        numeric: bool,
        /// Run both, write a comparison table and fail on disagreement.
        #[arg(long)]
        both: bool,
        /// Output table.
        #[arg(long)]
        out: PathBuf,
        /// Also write a gnuplot script next to the table.
        #[arg(long)]
        plot: bool,
    },
    /// Productions and money rates at an A-exporting fixed point.
    FixedPoint {
        scenario: PathBuf,
        /// Fixed-point stock of A; overrides good1.eta_star.
        #[arg(long)]
        eta_star: Option<f64>,
    },
    /// Scan the two-good feasibility region.
    Region {
        scenario: PathBuf,
        /// Output table.
        #[arg(long)]
        out: PathBuf,
        /// Also write a gnuplot script next to the table.
        #[arg(long)]
        plot: bool,
    },
}

fn run(cli: Cli) -> Result<Report, Failure> {
    let load = |path: &PathBuf| parse_scenario(path).map_err(|e| Failure::input(e.to_string()));
    match cli.command {
        Command::Simulate {
            scenario,
            numeric,
            both,
            out,
            plot,
            ..
        } => {
            let mode = if both {
                Mode::Both
            } else if numeric {
                Mode::Numeric
            } else {
                Mode::Analytic
            };
            commands::simulate(&load(&scenario)?, mode, &out, plot)
        }
        Command::FixedPoint { scenario, eta_star } => {
            commands::fixed_point(&load(&scenario)?, eta_star)
        }
        Command::Region {
            scenario,
            out,
            plot,
        } => {
            let threads = commands::threads_from_env()?;
            commands::region(&load(&scenario)?, &out, plot, threads)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::InputError as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(report) => {
            print!("{}", report.summary);
            ExitCode::from(report.status as u8)
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.status as u8)
        }
    }
}

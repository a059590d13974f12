//! `collapse`: runs the Bell, measurement, cat and Monty Hall experiments.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 internal assertion.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use collapse_core::lhv::{ChshPairing, ChshSettings};
use collapse_core::Complex64;

use commands::{Basis, CliError, LhvSource, MontyArgs, RunConfig};
use report::Format;

#[derive(Parser, Debug)]
#[command(name = "collapse", version, about = "Quantum measurement, Bell tests and classical collapse")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Master seed for all Monte Carlo streams.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Monte Carlo trials per estimate; 0 skips sampling.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    trials: u64,
    /// Worker threads. Results do not depend on this.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    workers: u16,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quantum CHSH value of the singlet at four analyzer angles (degrees).
    #[command(allow_negative_numbers = true)]
    ChshQuantum {
        #[arg(long, default_value_t = 0.0)]
        theta_a: f64,
        #[arg(long, default_value_t = 90.0)]
        theta_a2: f64,
        #[arg(long, default_value_t = 45.0)]
        theta_b: f64,
        #[arg(long, default_value_t = -45.0)]
        theta_b2: f64,
    },
    /// Exact CHSH values of local hidden-variable models.
    #[command(group = clap::ArgGroup::new("source").required(true).args(["model", "random"]))]
    ChshLhv {
        /// Model JSON file.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Number of random models to generate.
        #[arg(long)]
        random: Option<u64>,
        /// Largest number of hidden states in a random model.
        #[arg(long, default_value_t = 32)]
        max_lambdas: usize,
        /// Setting rows used as a, a', b, b' (0-based).
        #[arg(long, num_args = 4, value_delimiter = ',', default_values_t = [0, 1, 0, 1])]
        pairing: Vec<usize>,
    },
    /// Singlet correlations on 0, 45, 90, 180 degrees plus --grid.
    #[command(allow_negative_numbers = true)]
    Correlations {
        #[arg(long, default_value_t = 0.0)]
        theta_a: f64,
        /// Extra theta_b values, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid: Vec<f64>,
    },
    /// Generalized Monty Hall: exact and simulated win rates, posterior.
    Monty {
        #[arg(long, default_value_t = 3)]
        doors: u64,
        /// Doors the host opens.
        #[arg(long, conflicts_with = "open_all_but_one")]
        open: Option<u64>,
        /// Host opens all doors but the pick and one other.
        #[arg(long)]
        open_all_but_one: bool,
        /// Player's door (1-based).
        #[arg(long, default_value_t = 1)]
        pick: u64,
        /// Doors the host opened (1-based, comma separated) for the posterior.
        #[arg(long, value_delimiter = ',')]
        opened: Vec<u64>,
    },
    /// Nucleus, cat and observer evolving unitarily.
    #[command(allow_negative_numbers = true)]
    Cat {
        /// Waiting time in half-lives.
        #[arg(long, default_value_t = 1.0)]
        time: f64,
    },
    /// Born distribution and dephasing of a pure state.
    #[command(allow_negative_numbers = true)]
    Measure {
        /// Amplitudes, comma separated, each `re` or `re:im`.
        #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true,
              value_parser = commands::parse_amplitude)]
        state: Vec<Complex64>,
        #[arg(long, value_enum, default_value_t = Basis::Spin)]
        basis: Basis,
        /// Analyzer angle in degrees for the spin basis.
        #[arg(long, default_value_t = 0.0)]
        angle: f64,
    },
}

fn run(cli: Cli) -> Result<report::Report, CliError> {
    let g = &cli.global;
    let cfg = RunConfig { seed: g.seed, trials: g.trials, workers: usize::from(g.workers) };
    match cli.command {
        Command::ChshQuantum { theta_a, theta_a2, theta_b, theta_b2 } => {
            let settings = ChshSettings::from_degrees(theta_a, theta_a2, theta_b, theta_b2)?;
            commands::chsh_quantum(cfg, settings)
        }
        Command::ChshLhv { model, random, max_lambdas, pairing } => {
            let pairing = ChshPairing { a: pairing[0], a_prime: pairing[1], b: pairing[2], b_prime: pairing[3] };
            let source = match (&model, random) {
                (Some(path), _) => LhvSource::File(path),
                (None, Some(count)) => LhvSource::Random { count, max_lambdas },
                (None, None) => unreachable!("clap requires one source"),
            };
            commands::chsh_lhv(cfg, source, pairing)
        }
        Command::Correlations { theta_a, grid } => commands::correlations(cfg, theta_a, &grid),
        Command::Monty { doors, open, open_all_but_one, pick, opened } => {
            commands::monty(cfg, &MontyArgs { doors, open, open_all_but_one, pick, opened })
        }
        Command::Cat { time } => commands::cat(time),
        Command::Measure { state, basis, angle } => commands::measure(&state, basis, angle),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (format, out) = (cli.global.format, cli.global.out.clone());
    match run(cli) {
        Ok(report) => {
            if let Err(e) = report.write_to(format, out.as_deref()) {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(1);
            }
            match report.violation {
                Some(msg) => {
                    eprintln!("internal assertion failed: {msg}");
                    ExitCode::from(2)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal assertion failed: {msg}");
            ExitCode::from(2)
        }
    }
}

//! Command-line harness for the experiment workbench.
//!
//! Every subcommand emits an [`report::ExperimentReport`] in human, JSON or
//! CSV form. Exit codes: 0 when all checks pass (or the command only
//! classifies), 1 when a statistical or numeric check fails, 2 on usage or
//! input errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod report;

use commands::{CliError, RegressArgs};
use report::OutputFormat;

/// Two-station experiment workbench: exact outcome tables, instruction-set
/// bounds, detection models, latent-block regression and seeded Monte Carlo.
#[derive(Debug, Parser)]
#[command(name = "bellsim", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    pub format: OutputFormat,

    /// Worker threads for the trial engine (default: all cores). Counts are
    /// identical for every worker count.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the singlet color table and test all nine setting pairs
    /// against their analytic outcome probabilities.
    Quantum {
        /// Number of trials.
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Random seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sample an instruction-set model and report its equal-color
    /// statistics next to the 1/3 floor.
    Lhv {
        /// `uniform`, `uniform-two-equal`, or eight comma-separated weights.
        #[arg(long, default_value = "uniform")]
        dist: String,
        /// Number of trials.
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Random seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Instruction-set model with state-dependent detection (p, q):
    /// closed forms plus Monte Carlo confirmation.
    Loophole {
        /// Detection probability at a doubled letter; accepts a decimal in
        /// [0, 1] or the token `sqrt3/2`.
        #[arg(long, value_parser = parse_probability)]
        p: f64,
        /// Detection probability for three-equal-letter states; same syntax
        /// as --p.
        #[arg(long, value_parser = parse_probability)]
        q: f64,
        /// Number of trials.
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        /// Random seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Latent-block regression recovery on a generated instance
    /// (--n/--p/--k) or on CSV matrices (--z/--t).
    Regress {
        /// Number of observations of a generated instance.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: Option<u64>,
        /// Known-block width of a generated instance.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        p: Option<u64>,
        /// Latent-block width.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        q: u64,
        /// Response width of a generated instance.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: Option<u64>,
        /// Random seed for instance generation.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV file with the observed response Z.
        #[arg(long)]
        z: Option<PathBuf>,
        /// CSV file with the known block T.
        #[arg(long)]
        t: Option<PathBuf>,
    },
    /// Classify a parameter query against a registry file as realizable or
    /// a total parameter.
    Params {
        /// Registry file: one `id: label, label, ...` line per experiment.
        #[arg(long)]
        registry: PathBuf,
        /// Parameter labels of the query.
        #[arg(required = true)]
        query: Vec<String>,
    },
    /// Print the minimum equal-color frequency attainable by instruction
    /// sets on different settings.
    Bound,
}

/// Probability argument: a decimal in [0, 1], or `sqrt3/2`.
fn parse_probability(raw: &str) -> Result<f64, String> {
    let value = if raw == "sqrt3/2" {
        3f64.sqrt() / 2.0
    } else {
        raw.parse::<f64>().map_err(|e| format!("{e}"))?
    };
    if !(0.0..=1.0).contains(&value) {
        return Err(format!("{value} is outside [0, 1]"));
    }
    Ok(value)
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}

/// Parses the process arguments, dispatches, prints the report, and maps
/// the outcome to the exit-code contract.
pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // Clap exits 2 on usage errors and 0 for --help/--version.
        Err(e) => e.exit(),
    };
    let workers = cli.workers.map_or_else(default_workers, |w| w as usize);

    let result = match cli.command {
        Command::Quantum { trials, seed } => commands::cmd_quantum(trials, seed, workers),
        Command::Lhv { dist, trials, seed } => commands::cmd_lhv(&dist, trials, seed, workers),
        Command::Loophole { p, q, trials, seed } => {
            commands::cmd_loophole(p, q, trials, seed, workers)
        }
        Command::Regress {
            n,
            p,
            q,
            k,
            seed,
            z,
            t,
        } => commands::cmd_regress(RegressArgs {
            n: n.map(|v| v as usize),
            p: p.map(|v| v as usize),
            q: q as usize,
            k: k.map(|v| v as usize),
            seed,
            z,
            t,
        }),
        Command::Params { registry, query } => commands::cmd_params(&registry, &query),
        Command::Bound => commands::cmd_bound(),
    };

    match result {
        Err(CliError::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Ok(report) => {
            print!("{}", ensure_trailing_newline(report.render(cli.format)));
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn ensure_trailing_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

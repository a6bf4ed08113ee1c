use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod render;
mod repro;
mod source;

use render::Format;
use source::SourceArgs;

const DEFAULT_SEED: u64 = 0x1ac0;

#[derive(Parser, Debug)]
#[command(name = "involute", version, about = "Exact computations for involutive random walks")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, global = true, default_value_t = Format::Pretty)]
    format: Format,
    /// Seed for every random choice
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Transition matrix P, or the down-step matrix H with --down
    Matrix {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        down: bool,
    },
    /// Exact stationary distribution, with the closed form for named families
    Stationary {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Signed eigenvalues and the characteristic polynomial check
    Spectrum {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        n: Option<usize>,
        /// Also fit the empirical mixing rate
        #[arg(long)]
        mixing: bool,
    },
    /// Right and left eigenvectors of a named family
    Eigvec {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Decide a property; exits 2 with a witness when it fails
    Check {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(value_enum)]
        property: commands::Property,
    },
    /// Identify a walk with a named family
    Classify {
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["mu", "nu"])]
        lambda: Option<String>,
        #[arg(long, requires = "nu")]
        mu: Option<String>,
        #[arg(long, requires = "mu")]
        nu: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Exceptional second eigenvalues nu_m(mu) admissible on n states
    Ladder {
        #[arg(long)]
        mu: String,
        #[arg(long)]
        n: usize,
    },
    /// Sample a trajectory
    Simulate {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        start: usize,
        /// Print the whole trajectory instead of visit frequencies
        #[arg(long)]
        trajectory: bool,
    },
    /// The walk on subsets of {1,...,m}
    Subsets {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p: String,
        /// Print the transition matrix
        #[arg(long)]
        matrix: bool,
    },
    /// Continuous walks on [0,1]
    Continuum {
        #[arg(long, num_args = 2, value_names = ["A", "B"], conflicts_with = "trig")]
        kappa: Option<Vec<u32>>,
        #[arg(long)]
        trig: bool,
        /// Highest eigenfunction degree
        #[arg(long, default_value_t = 6)]
        degree: usize,
        /// Distance between discrete eigenvectors and g_d for these n
        #[arg(long, value_delimiter = ',', value_name = "N,...")]
        convergence: Option<Vec<usize>>,
    },
    /// Search for reversible walks outside the named families
    Conjecture {
        /// Sizes to search
        #[arg(long, value_delimiter = ',', default_values_t = [3usize, 4, 5, 6, 7, 8])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        max_denominator: u32,
        /// Emit one JSON record per reversible walk
        #[arg(long)]
        records: bool,
    },
    /// Regenerate a displayed table or figure
    Repro {
        #[arg(value_enum)]
        target: repro::Target,
    },
}

#[derive(Debug)]
pub enum CliError {
    /// Exit code 2: a precondition or property failed.
    Validation(String),
    /// Exit code 1.
    Internal(String),
}

impl From<involute::Error> for CliError {
    fn from(e: involute::Error) -> Self {
        match e {
            involute::Error::QuadratureNonConvergence { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

/// The command's normal output plus, on a failed check, its diagnostic.
pub struct Outcome {
    pub report: render::Report,
    pub failure: Option<String>,
}

impl From<render::Report> for Outcome {
    fn from(report: render::Report) -> Self {
        Outcome { report, failure: None }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("INVOLUTE_THREADS") else {
        return Ok(());
    };
    let k: usize = v
        .parse()
        .ok()
        .filter(|&k| k > 0)
        .ok_or_else(|| CliError::Validation(format!("INVOLUTE_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(k)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    configure_threads()?;
    let seed = cli.seed;
    match cli.command {
        Command::Matrix { source, n, down } => commands::matrix(&source.resolve(n)?, down),
        Command::Stationary { source, n } => commands::stationary(&source.resolve(n)?),
        Command::Spectrum { source, n, mixing } => commands::spectrum(&source.resolve(n)?, mixing),
        Command::Eigvec { source, n } => commands::eigvec(&source.resolve(n)?),
        Command::Check { source, n, property } => commands::check(&source.resolve(n)?, property, seed),
        Command::Classify { lambda, mu, nu, n } => commands::classify(lambda, mu, nu, n),
        Command::Ladder { mu, n } => commands::ladder(&mu, n),
        Command::Simulate { source, n, steps, start, trajectory } => {
            commands::simulate(&source.resolve(n)?, steps, start, trajectory, seed)
        }
        Command::Subsets { m, p, matrix } => commands::subsets(m, &p, matrix),
        Command::Continuum { kappa, trig, degree, convergence } => {
            commands::continuum(kappa, trig, degree, convergence)
        }
        Command::Conjecture { n, samples, max_denominator, records } => {
            commands::conjecture(&n, samples, max_denominator, records, seed)
        }
        Command::Repro { target } => repro::run(target),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let outcome = run(cli);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match outcome {
        Ok(Outcome { report, failure }) => {
            if out.write_all(report.render(format).as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            match failure {
                None => ExitCode::SUCCESS,
                Some(msg) => {
                    eprintln!("check failed: {msg}");
                    ExitCode::from(2)
                }
            }
        }
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}

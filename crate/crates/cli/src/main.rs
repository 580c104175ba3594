//! `riesz`: regularized Riesz potentials, centers and ball proximity from the
//! command line.

mod commands;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "riesz", version, about = "Regularized Riesz potentials, centers and asphericity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Seed for Monte Carlo rules and start points.
    #[arg(long, default_value_t = riesz_core::quadrature::DEFAULT_SEED)]
    seed: u64,
    /// Number of quadrature directions (default depends on the dimension).
    #[arg(long)]
    directions: Option<usize>,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Record the wall-clock time in the metadata header.
    #[arg(long)]
    timestamp: bool,
}

#[derive(Debug, Args)]
struct RingArgs {
    /// Grid points per axis for the ring search.
    #[arg(long, default_value_t = 64)]
    grid: usize,
    /// Grid candidates refined by the simplex search.
    #[arg(long, default_value_t = 8)]
    candidates: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// `rho = 1 + eps cos(k theta)`; the parameter is eps.
    StarCos,
    /// Parallel body of a point cloud; the parameter is ell.
    ParallelBody,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the regularized potential at points.
    Potential {
        /// `builtin:NAME` or a JSON shape file.
        #[arg(long)]
        shape: String,
        #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Vec<f64>,
        /// Comma-separated coordinates; repeat for several points.
        #[arg(long = "point", required = true, value_parser = commands::parse_point, allow_hyphen_values = true)]
        points: Vec<Vec<f64>>,
        /// Add the normalized potential column.
        #[arg(long)]
        vhat: bool,
        /// Add gradient columns, left empty where the formula does not apply.
        #[arg(long)]
        gradient: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Compare closed-form unit-ball potentials with the engine.
    BallOracle {
        #[arg(long)]
        n: usize,
        #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Vec<f64>,
        #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
        t: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Locate the maximizers of the normalized potential.
    Center {
        #[arg(long)]
        shape: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = 24)]
        starts: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Count centers over a one-parameter family and a list of lambda.
    Sweep {
        #[arg(long, value_enum)]
        family: Family,
        /// Family parameters (eps or ell).
        #[arg(long, required = true, value_delimiter = ',')]
        params: Vec<f64>,
        #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Vec<f64>,
        /// Frequency for `star-cos`.
        #[arg(long, default_value_t = 3)]
        k: u32,
        /// Point cloud for `parallel-body`, as `x,y;x,y;...`.
        #[arg(long, default_value = "0,0;1,0", allow_hyphen_values = true)]
        points: String,
        #[arg(long, default_value_t = 48)]
        starts: usize,
        /// Skip the asphericity column.
        #[arg(long)]
        no_asphericity: bool,
        /// Heatmap path; defaults to the CSV path with an `.svg` extension.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        rings: RingArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Smallest minimal-ring width divided by the inner radius.
    Asphericity {
        #[arg(long)]
        shape: String,
        #[command(flatten)]
        rings: RingArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Centers and radii of the thinnest enclosing annulus.
    MinimalRing {
        #[arg(long)]
        shape: String,
        #[command(flatten)]
        rings: RingArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Ball closest in bi-Hausdorff distance.
    BestBall {
        #[arg(long)]
        shape: String,
        #[command(flatten)]
        rings: RingArgs,
        #[command(flatten)]
        common: Common,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("RIESZ_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Validation(format!("RIESZ_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Validation(format!("cannot configure thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            let err = CliError::Validation(first.trim_start_matches("error: ").to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(2);
        }
    };
    match configure_threads().and_then(|()| commands::run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

#[derive(Parser, Debug)]
#[command(name = "epskit", version, about = "Build, verify and analyze error-free perfectly secret ciphers")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Logarithm base for printed information quantities.
    #[arg(long, global = true, value_enum, default_value_t = LogBase::Two)]
    pub base: LogBase,
    /// Seed for the deterministic generator used by `simulate`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Decimals printed for floating-point values.
    #[arg(long, global = true, default_value_t = 4)]
    pub precision: usize,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogBase {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    E,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Table,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Otp,
    Partition,
    CepHuffman,
    CepShannon,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entropy, support size, smallest mass and the lower bounds on H(X), H(R).
    Analyze { dist: PathBuf },
    /// Construct a cipher for a source and report its key accounting.
    Build {
        #[arg(long, value_enum)]
        scheme: Scheme,
        /// Partition size; defaults to the exact LCM construction.
        #[arg(long)]
        theta: Option<u64>,
        /// Code alphabet size for the compress-encrypt-pad schemes.
        #[arg(long, default_value_t = 2)]
        arity: u32,
        dist: PathBuf,
    },
    /// Run the EPS checks and lower bounds on a joint or cipher file.
    Verify { input: PathBuf },
    /// Repeated use of the fresh-bit scheme, drawing key bits from a pool.
    Simulate {
        #[arg(long, default_value_t = 16)]
        rounds: usize,
        /// Initial number of shared key bits.
        #[arg(long, default_value_t = 32)]
        pool: usize,
    },
    /// Extract a fresh key from the residual randomness of a system.
    Recycle {
        /// Target key distribution.
        #[arg(long)]
        target: PathBuf,
        /// Treat the input as one residual distribution instead of a joint or cipher.
        #[arg(long)]
        residual: bool,
        input: PathBuf,
    },
    /// Floor-rounded partition codes over a list of θ values.
    Sweep {
        #[arg(long, value_delimiter = ',', default_values_t = [10u64, 100, 1000, 10000])]
        thetas: Vec<u64>,
        dist: PathBuf,
    },
    /// Constructive consumption/channel-use frontier on a γ grid.
    Frontier {
        /// Explicit grid; overrides --points and --gamma-max.
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10)]
        points: usize,
        #[arg(long, default_value_t = 2.25)]
        gamma_max: f64,
        #[arg(long, default_value_t = 64)]
        max_theta: u64,
        #[arg(long, default_value_t = 4)]
        max_matrix: usize,
        dist: PathBuf,
    },
    /// Regenerate a comparison table and diff it against the published values.
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    let result = match cli.command {
        Command::Analyze { dist } => commands::analyze(&g, &dist),
        Command::Build {
            scheme,
            theta,
            arity,
            dist,
        } => commands::build(&g, scheme, theta, arity, &dist),
        Command::Verify { input } => commands::verify(&g, &input),
        Command::Simulate { rounds, pool } => commands::simulate(&g, rounds, pool),
        Command::Recycle {
            target,
            residual,
            input,
        } => commands::recycle(&g, &target, residual, &input),
        Command::Sweep { thetas, dist } => commands::sweep(&g, &thetas, &dist),
        Command::Frontier {
            gammas,
            points,
            gamma_max,
            max_theta,
            max_matrix,
            dist,
        } => {
            let grid = gammas.unwrap_or_else(|| {
                let steps = points.max(2) - 1;
                (0..=steps).map(|i| gamma_max * i as f64 / steps as f64).collect()
            });
            commands::frontier(&g, &grid, max_theta, max_matrix, &dist)
        }
        Command::Tables { which } => commands::tables(&g, which),
    };
    match result {
        Ok(status) => status.into(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code().into()
        }
    }
}

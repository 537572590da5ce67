use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eddeg::cli::{self, CliError, CommandOutput};
use eddeg::mixed_volume::Algorithm;

/// Mixed-volume bound and numerical count of Euclidean distance critical points.
#[derive(Parser)]
#[command(name = "eddeg", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mixed volume of the Newton polytopes of the Lagrange system.
    Bound {
        file: PathBuf,
        #[arg(long, default_value = "ie")]
        algorithm: Algorithm,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Critical points found by homotopy continuation.
    Count {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Residual tolerance for accepting an endpoint.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Compare bound and count. Exit codes: 0 equal, 2 count below bound,
    /// 3 unreliable, 1 error.
    Verify {
        file: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Face functions of the Lagrange system under one direction.
    Faces {
        file: PathBuf,
        /// Comma-separated integers `w1,..,wn,v1,..,vm`.
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Vertices of the Newton polytopes.
    Polytopes {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn run(command: Command) -> Result<CommandOutput, CliError> {
    match command {
        Command::Bound {
            file,
            algorithm,
            seed,
            json,
        } => cli::cmd_bound(&file, algorithm, seed, json),
        Command::Count {
            file,
            seed,
            tol,
            json,
        } => cli::cmd_count(&file, seed, tol, json),
        Command::Verify { file, seed, json } => cli::cmd_verify(&file, seed, json),
        Command::Faces {
            file,
            w,
            seed,
            json,
        } => cli::cmd_faces(&file, &cli::parse_direction(&w)?, seed, json),
        Command::Polytopes { file, json } => cli::cmd_polytopes(&file, json),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = cli::threads_from_env().and_then(|t| cli::with_threads(t, || run(args.command)));
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

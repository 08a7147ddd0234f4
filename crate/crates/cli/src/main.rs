//! `dyadic`: build, encode and check dyadic subbases.
//!
//! Exit status is 0 on success, 1 when a check finds a violation and 2 on
//! usage, configuration or I/O errors.

mod commands;
mod demo;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "dyadic", version, about = "Build, encode and check dyadic subbases")]
#[command(after_help = "\
Subbase files are JSON, one of
  {\"kind\": \"gray\", \"pairs\": 16}
  {\"kind\": \"compactified\", \"pairs\": 16, \"resolution\": \"1/1024\"}
  {\"kind\": \"distance\", \"space\": \"square\", \"resolution\": \"1/32\",
   \"cuts\": [{\"center_index\": 0, \"center\": \"(0, 0)\", \"c\": \"3/4\"}]}
Finite space files are {\"points\": [[x, ...], ...], \"metric\": [[d00, d01, ...], ...]}
with numbers or \"p/q\" strings.

SUBBASE_THREADS caps the number of worker threads.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
pub struct SpaceArgs {
    /// Named space: interval, circle, square, torus or compactified
    #[arg(long, conflicts_with = "space_file")]
    pub space: Option<String>,

    /// Finite metric space given as a JSON file
    #[arg(long, value_name = "FILE")]
    pub space_file: Option<PathBuf>,

    /// Grid step of the sample, e.g. 1/256
    #[arg(long, value_name = "Q")]
    pub resolution: Option<String>,
}

#[derive(Args, Clone, Debug)]
pub struct CheckArgs {
    #[arg(long, value_name = "FILE")]
    pub subbase: PathBuf,

    #[command(flatten)]
    pub space: SpaceArgs,

    #[arg(long)]
    pub depth: usize,

    /// Closure radius; defaults to twice the resolution
    #[arg(long, value_name = "Q")]
    pub delta: Option<String>,

    /// Also write the report as JSON
    #[arg(long, value_name = "FILE")]
    pub json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a subbase of distance cuts
    Build {
        #[command(flatten)]
        space: SpaceArgs,

        #[arg(long)]
        pairs: usize,

        /// Also avoid values tied to the boundaries of earlier pairs
        #[arg(long)]
        strong: bool,

        #[arg(long, default_value_t = 0)]
        seed: u64,

        #[arg(long, default_value_t = 1e-4)]
        avoid_margin: f64,

        #[arg(long, default_value_t = 1000)]
        max_retries: u32,

        #[arg(long, value_name = "FILE")]
        out: PathBuf,

        /// Write one JSON record per pair to this file
        #[arg(long, value_name = "FILE")]
        log: Option<PathBuf>,
    },
    /// Print the code of a point
    Encode {
        #[arg(long, value_name = "FILE")]
        subbase: PathBuf,

        /// A point such as 1/4, 0.3,0.7 or p
        #[arg(long)]
        point: String,

        #[arg(long)]
        depth: usize,
    },
    /// List the prefixes of sampled codes up to a depth
    Kslice {
        #[arg(long, value_name = "FILE")]
        subbase: PathBuf,

        #[command(flatten)]
        space: SpaceArgs,

        #[arg(long)]
        depth: usize,

        /// Write the Hasse diagram in DOT format
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Check closures of S(sigma) for sigma over 0, 1 and bottom
    CheckProper(CheckArgs),
    /// Check closures of S(sigma) for sigma over 0, 1, boundary and bottom
    CheckStrong(CheckArgs),
    /// Check that the K slice is a cusl under re-enumerations
    CheckCusl {
        #[arg(long, value_name = "FILE")]
        subbase: PathBuf,

        #[command(flatten)]
        space: SpaceArgs,

        #[arg(long)]
        depth: usize,

        /// Number of random permutations of the first `depth` indices tried
        /// besides the identity
        #[arg(long, default_value_t = 0)]
        permutations: usize,

        /// Try every permutation of the first `depth` indices instead
        #[arg(long)]
        all_permutations: bool,

        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reproduce a worked example end to end
    Demo {
        #[arg(value_enum)]
        which: DemoKind,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DemoKind {
    Gray,
    Duplication,
    Compactification,
}

/// What a command wants the process to exit with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    CheckFailed,
}

fn init_threads() -> Result<usize, String> {
    let Ok(text) = std::env::var("SUBBASE_THREADS") else {
        return Ok(rayon::current_num_threads());
    };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("SUBBASE_THREADS must be a positive integer, got {text:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())?;
    Ok(threads)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match init_threads() {
        Ok(n) => n,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Build {
            space,
            pairs,
            strong,
            seed,
            avoid_margin,
            max_retries,
            out,
            log,
        } => commands::build(
            &space,
            dyadic_core::BuilderParams {
                count: pairs,
                avoid_margin,
                max_retries,
                rng_seed: seed,
                strong,
            },
            &out,
            log.as_deref(),
            threads,
        ),
        Command::Encode { subbase, point, depth } => commands::encode(&subbase, &point, depth),
        Command::Kslice {
            subbase,
            space,
            depth,
            dot,
        } => commands::kslice(&subbase, &space, depth, dot.as_deref(), threads),
        Command::CheckProper(args) => commands::check(&args, false, threads),
        Command::CheckStrong(args) => commands::check(&args, true, threads),
        Command::CheckCusl {
            subbase,
            space,
            depth,
            permutations,
            all_permutations,
            seed,
        } => commands::check_cusl(&subbase, &space, depth, permutations, all_permutations, seed, threads),
        Command::Demo { which } => demo::run(which, threads),
    };
    match result {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

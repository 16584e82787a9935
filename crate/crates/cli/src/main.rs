use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use treebed_core::{CubeId, HoroPoint, Norm, Strategy};

mod commands;
mod config;

#[derive(Parser, Debug)]
#[command(
    name = "treebed",
    version,
    about = "Embed rescaled hyperbolic space into a product of trees and check the construction",
    allow_negative_numbers = true
)]
struct Cli {
    /// Worker threads for sampling and checks (default: all cores).
    #[arg(long, global = true, env = "TREEBED_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Horizontal dimension n.
    #[arg(long)]
    n: Option<usize>,
    /// Scaling factor p.
    #[arg(long)]
    p: Option<u32>,
    /// TOML manifest supplying defaults for any flag.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Machine-readable JSON output.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Dot,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Image of a point in every colored tree.
    Embed {
        #[command(flatten)]
        common: Common,
        /// Height t.
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// Horizontal position, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        /// Send every point to this level instead of the nearest one.
        #[arg(long, allow_hyphen_values = true)]
        level: Option<i64>,
    },
    /// Hyperbolic distance between two points given as `t,x1,...`.
    Distance {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        z: HoroPoint,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        w: HoroPoint,
    },
    /// Number of edges between two cubes of one color, given as `c,k,g1,...`.
    TreeDist {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        u: CubeId,
        #[arg(long, allow_hyphen_values = true)]
        v: CubeId,
        /// Levels scanned per parent lookup before giving up.
        #[arg(long)]
        scan_cap: Option<u32>,
    },
    /// Exact check that the level-0 cubes of all colors cover R^n.
    CheckCovering {
        #[command(flatten)]
        common: Common,
    },
    /// Exact separation verdicts on random same-color cube pairs.
    CheckSeparation {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
        k_min: i64,
        #[arg(long, default_value_t = 4, allow_hyphen_values = true)]
        k_max: i64,
    },
    /// Sample point pairs, measure both distances and fit the envelope.
    Verify(VerifyArgs),
    /// Union of tree paths joining the listed cubes.
    ExportSubtree {
        #[command(flatten)]
        common: Common,
        /// File with one cube id `c,k,g1,...` per line; `#` starts a comment.
        #[arg(long)]
        ids: PathBuf,
        #[arg(long, value_enum)]
        format: Option<GraphFormat>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        scan_cap: Option<u32>,
    },
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    strategy: Option<Strategy>,
    #[arg(long, allow_hyphen_values = true)]
    t_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t_max: Option<f64>,
    #[arg(long)]
    x_radius: Option<f64>,
    #[arg(long)]
    norm: Option<Norm>,
    #[arg(long)]
    scan_cap: Option<u32>,
    /// Report file (default: standard output).
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<ReportFormat>,
    /// Include wall-clock time in the JSON report.
    #[arg(long)]
    timing: bool,
    /// Send every point to this level (a broken embedding, for comparison).
    #[arg(long, allow_hyphen_values = true)]
    level: Option<i64>,
}

fn parse_point(s: &str) -> Result<HoroPoint, String> {
    let values = s
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    match values.split_first() {
        Some((&t, x)) if !x.is_empty() => Ok(HoroPoint::new(t, x.to_vec())),
        _ => Err("expected t,x1[,x2,...]".into()),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] treebed_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_resource_limit() => 3,
            _ => 2,
        }
    }
}

/// Whether the command's check passed.
pub type Outcome = Result<bool, CliError>;

fn run(cli: Cli) -> Outcome {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Embed { common, t, x, level } => commands::embed(&common, HoroPoint::new(t, x), level),
        Command::Distance { common, z, w } => commands::distance(&common, &z, &w),
        Command::TreeDist { common, u, v, scan_cap } => commands::tree_dist(&common, &u, &v, scan_cap),
        Command::CheckCovering { common } => commands::check_covering(&common),
        Command::CheckSeparation {
            common,
            samples,
            seed,
            k_min,
            k_max,
        } => commands::check_separation(&common, samples, seed, k_min, k_max),
        Command::Verify(args) => commands::verify(&args),
        Command::ExportSubtree {
            common,
            ids,
            format,
            output,
            scan_cap,
        } => commands::export_subtree(&common, &ids, format, output, scan_cap),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("error: {e}");
            if let CliError::Core(treebed_core::Error::InvalidParams { .. }) = e {
                eprintln!("valid parameters satisfy n >= 1, p >= 2 and 1/(p-1) + 1/p < 1/(n+1)");
            }
            ExitCode::from(e.exit_code())
        }
    }
}

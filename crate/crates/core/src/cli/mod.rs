//! The `cech` command line.
//!
//! Every command prints one JSON report on stdout. Exit status is 0 on
//! success, 1 on any input or validation error and 2 when the answer is an
//! obstruction; obstructions always carry a witness.

mod commands;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use report::{ExitStatus, RunReport, VERSION};

pub const DEFAULT_SEED: u64 = 20_011;

#[derive(Debug, Parser)]
#[command(name = "cech", version, about = "Covers, nerves, Cech cocycles, lifts and flat bundles")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct GlobalArgs {
    /// Coefficient group (z, zmod, r, t, sign, unit-quaternion, quaternion, gl); checked against the file.
    #[arg(long, global = true)]
    pub group: Option<String>,
    /// Parameter of zmod or gl.
    #[arg(long = "n", global = true)]
    pub n: Option<u64>,
    /// Tolerance for continuous groups.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Cocycle convention: abg (default) or gba; overrides a bundle file.
    #[arg(long, global = true)]
    pub convention: Option<String>,
    /// Highest nerve dimension built (1 or 2).
    #[arg(long, global = true, default_value_t = 2)]
    pub max_dim: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Omit wall-clock timings so reports are byte-stable.
    #[arg(long, global = true)]
    pub no_timings: bool,
}

/// `-` reads from stdin.
type Input = PathBuf;

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Order, coverage and adjacency classes of a cover.
    Analyze { cover: Input },
    /// Nerve simplices, components and fundamental cycles.
    Nerve { cover: Input },
    /// Cocycle condition of a 1-cochain.
    Check {
        cochain: Input,
        #[arg(long)]
        cover: Input,
    },
    /// Solve δ₀t = r or report a holonomy witness.
    Solve {
        cochain: Input,
        #[arg(long)]
        cover: Input,
    },
    /// Lift a cocycle along a homomorphism.
    Lift {
        cochain: Input,
        #[arg(long)]
        cover: Input,
        /// r-to-t, z-to-zmod:n, zmod-to-zmod:n:m or gl-det:n.
        #[arg(long)]
        via: String,
    },
    /// First cohomology of the nerve.
    H1 {
        cover: Input,
        /// z, r or zmod:n (zmod alone takes --n).
        #[arg(long, default_value = "z")]
        coeff: String,
    },
    /// Global section test for a bundle file.
    Section { bundle: Input },
    /// Gauge-fixed holonomy around each fundamental cycle of a bundle.
    Holonomy { bundle: Input },
    /// Order-one refinement of an interval cover.
    RefineIntervals { cover: Input },
    /// Emit a generated cover file.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
        /// Write the cover here and print a report instead of the cover.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Partition-of-unity solve of a real function cocycle.
    PouSolve {
        cover: Input,
        /// Function cochain file (per-edge point tables).
        cochain: Input,
    },
}

#[derive(Clone, Debug, Subcommand)]
pub enum GenerateKind {
    /// Brick cover of the unit square.
    Brick {
        #[arg(long, default_value_t = 3)]
        rows: usize,
        #[arg(long, default_value_t = 3)]
        cols: usize,
        #[arg(long = "inflate", default_value_t = 0.05)]
        inflate: f64,
        /// Unshifted grid of squares.
        #[arg(long)]
        aligned: bool,
        #[arg(long, default_value_t = 30)]
        resolution: usize,
    },
    /// Random open intervals on a sample of [0, 1].
    Intervals {
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 0.4)]
        max_width: f64,
    },
    /// Overlapping arcs of a sampled circle.
    CircleArcs {
        #[arg(long, default_value_t = 3)]
        arcs: usize,
        #[arg(long, default_value_t = 30)]
        samples: usize,
        #[arg(long, default_value_t = 0.2)]
        overlap: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Nerve { .. } => "nerve",
            Command::Check { .. } => "check",
            Command::Solve { .. } => "solve",
            Command::Lift { .. } => "lift",
            Command::H1 { .. } => "h1",
            Command::Section { .. } => "section",
            Command::Holonomy { .. } => "holonomy",
            Command::RefineIntervals { .. } => "refine-intervals",
            Command::Generate { .. } => "generate",
            Command::PouSolve { .. } => "pou-solve",
        }
    }
}

/// Parses `args` (program name first) and runs the command against the
/// process streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { ExitStatus::InputError as i32 } else { ExitStatus::Ok as i32 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{rendered}") } else { write!(out, "{rendered}") };
            return code;
        }
    };
    let name = cli.command.name();
    match commands::execute(&cli) {
        Ok(commands::Output::Report(report)) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report.to_value()).expect("report serializes"));
            report.status as i32
        }
        Ok(commands::Output::Raw(text)) => {
            let _ = writeln!(out, "{text}");
            ExitStatus::Ok as i32
        }
        Err(e) => {
            let value = report::error_value(name, &e);
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("report serializes"));
            let _ = writeln!(err, "cech {name}: {e}");
            ExitStatus::InputError as i32
        }
    }
}

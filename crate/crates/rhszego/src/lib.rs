//! File formats, reports, verification suites and the command-line frontend
//! for `rhszego-core`.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

pub mod commands;
pub mod io;
pub mod report;
pub mod verify;

pub use verify::Suite;

/// Bundled genus-one sample curve.
pub const SAMPLE_CURVE: &str = include_str!("../data/sample_curve.json");
/// Characteristic (with normalization point) for the sample curve.
pub const SAMPLE_CHAR: &str = include_str!("../data/sample_char.json");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] rhszego_core::Error),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "ConfigError",
            CliError::Core(e) => e.code(),
            CliError::Write { .. } => "WriteError",
        }
    }

    /// 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Write { .. } => 2,
            CliError::Core(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rhszego", version, about = "Szegő-kernel solutions of 2x2 Riemann-Hilbert problems on hyperelliptic curves")]
pub struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Period matrices of a curve.
    Periods {
        #[arg(long)]
        curve: PathBuf,
    },
    /// Theta function with characteristics, gradient and Hessian.
    ThetaEval {
        #[arg(long)]
        input: PathBuf,
    },
    /// Ψ on a grid, all monodromies and residues.
    Solve {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long = "char")]
        ch: PathBuf,
        /// Normalization point as RE,IM.
        #[arg(long, allow_hyphen_values = true)]
        lambda0: String,
        /// Grid points per side for the Ψ samples.
        #[arg(long, default_value_t = 9)]
        grid: usize,
        /// Also write the samples as CSV.
        #[arg(long)]
        grid_csv: Option<PathBuf>,
    },
    /// Monodromy around branch point K (zero-based, sorted order).
    Monodromy {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long = "char")]
        ch: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Closed-form tau function.
    Tau {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long = "char")]
        ch: PathBuf,
        /// Curve file whose branch points fix the branches of the fractional powers.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Run a verification suite; exits 0 iff every check passes.
    Verify {
        #[arg(long)]
        curve: PathBuf,
        #[arg(long = "char")]
        ch: PathBuf,
        #[arg(long)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Covering data of a quasi-permutation representation.
    Covering {
        #[arg(long)]
        rep: PathBuf,
    },
}

/// Rendered report and the exit code it implies.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub json: String,
    pub exit_code: i32,
}

fn render<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

/// Thread pool sized by `RH_NUM_THREADS` (rayon's default when unset).
pub fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("RH_NUM_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Config(format!("RH_NUM_THREADS must be a positive integer, got {v:?}")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

/// Execute one command. The report is also written to `output` when given.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    use io::read_json;
    let ok = |json: String| Outcome { json, exit_code: 0 };
    let out = match &cli.command {
        Command::Periods { curve } => ok(render(&commands::periods(&read_json(curve)?)?)),
        Command::ThetaEval { input } => ok(render(&commands::theta_eval(&read_json(input)?)?)),
        Command::Solve { curve, ch, lambda0, grid, grid_csv } => {
            let l0 = io::parse_complex(lambda0)?;
            let r = commands::solve(&read_json(curve)?, &read_json(ch)?, l0, *grid)?;
            if let Some(p) = grid_csv {
                write_file(p, &commands::samples_csv(&r.samples))?;
            }
            ok(render(&r))
        }
        Command::Monodromy { curve, ch, n } => ok(render(&commands::monodromy(&read_json(curve)?, &read_json(ch)?, *n)?)),
        Command::Tau { curve, ch, reference } => {
            let rf: Option<io::CurveFile> = reference.as_deref().map(read_json).transpose()?;
            ok(render(&commands::tau(&read_json(curve)?, &read_json(ch)?, rf.as_ref())?))
        }
        Command::Verify { curve, ch, suite, seed } => {
            let (curve, ch) = (read_json(curve)?, read_json(ch)?);
            let r = thread_pool()?.install(|| commands::verify(&curve, &ch, *suite, *seed))?;
            Outcome { json: render(&r), exit_code: if r.all_pass { 0 } else { 1 } }
        }
        Command::Covering { rep } => ok(render(&commands::covering(&read_json(rep)?)?)),
    };
    if let Some(p) = &cli.output {
        write_file(p, &out.json)?;
    }
    Ok(out)
}

/// Machine-readable error report.
pub fn error_json(e: &CliError) -> String {
    render(&serde_json::json!({"error": e.code(), "message": e.to_string()}))
}

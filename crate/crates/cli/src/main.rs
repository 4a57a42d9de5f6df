mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "wedge-eof",
    version,
    about = "Verification suites and scans for entanglement of formation on antisymmetric 3x3 states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Simplex grid step; its reciprocal must be an integer.
    #[arg(long, global = true, env = "WEDGE_EOF_GRID_STEP")]
    grid_step: Option<f64>,
    /// Number of random samples (bases, density pairs or states).
    #[arg(long, global = true, env = "WEDGE_EOF_SAMPLES")]
    samples: Option<usize>,
    #[arg(long, global = true, env = "WEDGE_EOF_SEED", default_value_t = 0)]
    seed: u64,
    /// Verification tolerance; the default depends on the command.
    #[arg(long, global = true, env = "WEDGE_EOF_TOL")]
    tol: Option<f64>,
    /// Eigenvalues at or below this are treated as zero in entropies.
    #[arg(long, global = true, env = "WEDGE_EOF_CLIP_TOL", default_value_t = 1e-14)]
    clip_tol: f64,
    /// Output file (a directory for scan-bounds); stdout if absent.
    #[arg(long, global = true, env = "WEDGE_EOF_OUT")]
    out: Option<std::path::PathBuf>,
    #[arg(long, global = true, env = "WEDGE_EOF_FORMAT", value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cofactor identities and the aligning local unitary on random bases.
    VerifyLemma1 {
        /// Replace the first basis with a non-orthonormal one.
        #[arg(long, hide = true)]
        inject_nonorthonormal: bool,
    },
    /// Analytic versus numeric spectrum of the reduced state over the simplex.
    ScanSpectrum,
    /// Polynomial entropy bounds on [0, 1/3] and the bound chain over the simplex.
    ScanBounds {
        /// The z-curve is sampled at k / z_divisions.
        #[arg(long, env = "WEDGE_EOF_Z_DIVISIONS", default_value_t = 1200)]
        z_divisions: usize,
    },
    /// Upper and lower evidence for additivity on random density pairs.
    VerifyAdditivity {
        #[command(flatten)]
        budget: BudgetArgs,
        /// Random pure states of the product range pushed through the bound chain.
        #[arg(long, env = "WEDGE_EOF_RANGE_SAMPLES", default_value_t = 64)]
        range_samples: usize,
    },
    /// Emit seeded random states on the antisymmetric subspace.
    SampleStates {
        #[arg(long, value_enum, default_value_t = StateKind::AntisymDensity)]
        kind: StateKind,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct BudgetArgs {
    /// Total objective evaluations per optimization.
    #[arg(long, env = "WEDGE_EOF_BUDGET", default_value_t = 128_000)]
    pub budget: usize,
    #[arg(long, env = "WEDGE_EOF_STARTS", default_value_t = 32)]
    pub starts: usize,
    #[arg(long, env = "WEDGE_EOF_EVALS_PER_START", default_value_t = 4000)]
    pub evals_per_start: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    AntisymState,
    TwoCopyState,
    AntisymDensity,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<bool, ConfigError> {
    let c = cli.common;
    let build = |default_samples: usize, default_tol: f64, default_format: Format| {
        RunConfig::new(
            c.grid_step,
            c.samples.unwrap_or(default_samples),
            c.seed,
            c.tol.unwrap_or(default_tol),
            c.clip_tol,
            c.out.clone(),
            c.format.unwrap_or(default_format),
        )
    };
    let json_only = |name: &str| match c.format {
        Some(Format::Csv) => Err(ConfigError::Usage(format!("{name} only emits JSON"))),
        _ => Ok(()),
    };
    match cli.command {
        Command::VerifyLemma1 { inject_nonorthonormal } => {
            json_only("verify-lemma1")?;
            let cfg = build(1000, 1e-10, Format::Json)?;
            commands::lemma1::run(&cfg, inject_nonorthonormal)
        }
        Command::ScanSpectrum => {
            let cfg = build(1, 1e-10, Format::Csv)?;
            commands::spectrum::run(&cfg)
        }
        Command::ScanBounds { z_divisions } => {
            let cfg = build(1, 1e-9, Format::Csv)?;
            commands::bounds::run(&cfg, z_divisions)
        }
        Command::VerifyAdditivity { budget, range_samples } => {
            json_only("verify-additivity")?;
            let cfg = build(5, 1e-6, Format::Json)?;
            commands::additivity::run(&cfg, &budget, range_samples)
        }
        Command::SampleStates { kind } => {
            let cfg = build(1, 1e-10, Format::Json)?;
            commands::sample::run(&cfg, kind)
        }
    }
}

use std::fmt;
use std::path::PathBuf;

use wedge_eof::xi::grid_divisions;
use wedge_eof::Tolerances;

use crate::Format;

pub const DEFAULT_GRID_STEP: f64 = 0.05;
pub const MAX_GRID_STEP: f64 = 0.1;

#[derive(Debug)]
pub enum ConfigError {
    Usage(String),
    Io(std::io::Error),
    Compute(wedge_eof::Error),
}

impl ConfigError {
    pub fn exit_code(&self) -> u8 {
        match self {
            ConfigError::Usage(_) | ConfigError::Io(_) => 2,
            ConfigError::Compute(_) => 1,
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Usage(msg) => write!(f, "{msg}"),
            ConfigError::Io(e) => write!(f, "io: {e}"),
            ConfigError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl From<std::io::Error> for ConfigError {
    fn from(e: std::io::Error) -> Self {
        ConfigError::Io(e)
    }
}

impl From<wedge_eof::Error> for ConfigError {
    fn from(e: wedge_eof::Error) -> Self {
        ConfigError::Compute(e)
    }
}

impl From<csv::Error> for ConfigError {
    fn from(e: csv::Error) -> Self {
        ConfigError::Io(e.into())
    }
}

impl From<serde_json::Error> for ConfigError {
    fn from(e: serde_json::Error) -> Self {
        ConfigError::Io(e.into())
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub grid_step: f64,
    /// `N` with `grid_step = 1 / N`.
    pub divisions: usize,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(
        grid_step: Option<f64>,
        samples: usize,
        seed: u64,
        tol: f64,
        clip: f64,
        out: Option<PathBuf>,
        format: Format,
    ) -> Result<Self, ConfigError> {
        let grid_step = grid_step.unwrap_or(DEFAULT_GRID_STEP);
        if !(grid_step > 0.0 && grid_step <= MAX_GRID_STEP) {
            return Err(ConfigError::Usage(format!(
                "--grid-step must lie in (0, {MAX_GRID_STEP}], got {grid_step}"
            )));
        }
        let divisions = grid_divisions(grid_step)
            .map_err(|_| ConfigError::Usage(format!("--grid-step {grid_step} is not the reciprocal of an integer")))?;
        if samples == 0 {
            return Err(ConfigError::Usage("--samples must be at least 1".into()));
        }
        for (name, v) in [("--tol", tol), ("--clip-tol", clip)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError::Usage(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(RunConfig {
            grid_step,
            divisions,
            samples,
            seed,
            tol,
            tolerances: Tolerances {
                clip,
                ..Tolerances::default()
            },
            out,
            format,
        })
    }
}

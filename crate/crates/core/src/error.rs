use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong while building models, solving spectra,
/// propagating states or emitting results.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },

    #[error("lattice window too small: {sites} sites (need at least 3)")]
    WindowTooSmall { sites: usize },

    #[error("invalid lattice window: {0}")]
    InvalidWindow(String),

    #[error("window [{n_min}, {n_max}] is not symmetric about n = 0")]
    AsymmetricWindow { n_min: i64, n_max: i64 },

    #[error("Bloch coefficients singular at kappa = {kappa} (delta = 0 and cos(kappa d) = 0)")]
    DegeneratePoint { kappa: f64 },

    #[error("Landau-Zener estimate needs F*Delta != 0")]
    ZeroSweep,

    #[error("operation requires a non-zero static force")]
    ZeroForce,

    #[error("only {found} interior eigenstates available, need at least {needed}")]
    TooFewInteriorStates { found: usize, needed: usize },

    #[error("folded eigenvalues do not form two ladders: {0}")]
    ClusterFailure(String),

    #[error("ladders degenerate: folded offsets {a} and {b} closer than {tol}")]
    DegenerateLadder { a: f64, b: f64, tol: f64 },

    #[error("monodromy not unimodular: |mu| deviates from 1 by {deviation:e}")]
    NonUnimodular { deviation: f64 },

    #[error("integrator failed: {0}")]
    StepSize(String),

    #[error("band completeness deficit {deficit:e} exceeds {tol:e}")]
    CompletenessDeficit { deficit: f64, tol: f64 },

    #[error("wave packet leaked {leak:e} of its norm into the guard band (limit {limit:e})")]
    Leakage { leak: f64, limit: f64 },

    #[error("window overflow: {0}")]
    WindowOverflow(String),

    #[error("branch windows overlap: {0}")]
    WindowsOverlap(String),

    #[error("need at least {needed} samples, got {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("sinusoid fit residual {residual:e} exceeds {limit:e}")]
    FitResidual { residual: f64, limit: f64 },

    #[error("beat period diverges: dF = 2 E0")]
    DivergentPeriod,

    #[error("no root in bracket [{lo}, {hi}]: {reason}")]
    NoRoot { lo: f64, hi: f64, reason: String },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParams { .. } | Error::InvalidWindow(_) => 2,
            Error::WindowTooSmall { .. } | Error::AsymmetricWindow { .. } => 2,
            Error::WindowsOverlap(_) => 2,
            Error::Io { .. } => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

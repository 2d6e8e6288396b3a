//! The two Wannier-Stark ladders and their offset.
//!
//! Both engines produce two folded offsets `x` and `dF - x`; which one is
//! called ladder 0 is a convention. We take the one closest (on the circle of
//! circumference `2dF`) to a closed-form reference: the weak-gap Bessel value
//! when a zone-edge passage is more likely to tunnel than not, the uncoupled
//! elliptic value otherwise. The reference is odd in `delta` and even in
//! `Delta`, so the resulting offset inherits both symmetries.

mod approx;
mod diag;
mod floquet;

use serde::Serialize;

pub use approx::{offset_approx_bessel, offset_approx_elliptic};
pub use diag::{interior_eigenstates, ladder_offset_diag, InteriorState};
pub use floquet::{ladder_offset_floquet, monodromy, DEFAULT_KAPPA_STEPS, MIN_KAPPA_STEPS};

use crate::bands::landau_zener_probability;
use crate::error::{Error, Result};
use crate::lattice::{LatticeWindow, ModelParams};

/// Relative closeness (in units of `dF`) below which the ladders are flagged
/// as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Diagonalization,
    Floquet,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Diagonalization => "diagonalization",
            Method::Floquet => "floquet",
        }
    }
}

/// How to compute a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Engine {
    Diagonalization(LatticeWindow),
    Floquet { kappa_steps: usize },
}

impl Engine {
    pub fn floquet() -> Self {
        Engine::Floquet {
            kappa_steps: DEFAULT_KAPPA_STEPS,
        }
    }

    pub fn run(&self, params: &ModelParams) -> Result<LadderSpectrum> {
        match self {
            Engine::Diagonalization(window) => ladder_offset_diag(params, window),
            Engine::Floquet { kappa_steps } => ladder_offset_floquet(params, *kappa_steps),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderSpectrum {
    pub params: ModelParams,
    /// Ladder-0 offset in `(-|dF|, |dF|]`.
    pub offset_e0: f64,
    /// The other folded offset, `dF - offset_e0` up to numerical error.
    pub partner: f64,
    /// Rung spacing `2|dF|`.
    pub spacing: f64,
    /// Characteristic exponents `z0`, `z1` (offset per unit force).
    pub exponents: (f64, f64),
    /// Eigenvalues per ladder.
    pub eigenvalues: [Vec<f64>; 2],
    pub method: Method,
    /// Offsets closer than [`DEGENERACY_TOL`]` * |dF|`; labelling is ambiguous.
    pub degenerate: bool,
    /// Engine-specific error estimate of `offset_e0`.
    pub error_estimate: f64,
}

impl LadderSpectrum {
    /// `E_{alpha,n}`: `E0 + 2n dF` for ladder 0, `-E0 + (2n+1) dF` for ladder 1.
    pub fn rung(&self, alpha: usize, n: i64) -> f64 {
        let fd = 0.5 * self.spacing;
        match alpha {
            0 => self.offset_e0 + 2.0 * n as f64 * fd,
            _ => -self.offset_e0 + (2 * n + 1) as f64 * fd,
        }
    }

    /// Same spectrum with every energy multiplied by `factor` (force and
    /// energies scaled together).
    fn scaled(mut self, factor: f64, params: ModelParams) -> Self {
        self.params = params;
        self.offset_e0 *= factor;
        self.partner *= factor;
        self.spacing *= factor;
        self.error_estimate *= factor;
        for list in &mut self.eigenvalues {
            list.iter_mut().for_each(|e| *e *= factor);
        }
        self
    }
}

/// Fold `e` into `(-|dF|, |dF|]`.
pub fn fold_offset(e: f64, fd: f64) -> f64 {
    let fd = fd.abs();
    fd - (fd - e).rem_euclid(2.0 * fd)
}

/// Distance between `a` and `b` modulo `2|dF|`.
pub fn circular_distance(a: f64, b: f64, fd: f64) -> f64 {
    let fd = fd.abs();
    (((a - b) + fd).rem_euclid(2.0 * fd) - fd).abs()
}

/// Closed-form value used to label the ladders.
pub fn labeling_reference(params: &ModelParams) -> f64 {
    match landau_zener_probability(params) {
        Ok(p) if p > 0.5 => offset_approx_bessel(params),
        _ => offset_approx_elliptic(params),
    }
}

/// Pick ladder 0 among two folded offsets. Returns `(e0, partner, degenerate)`.
pub(crate) fn label_ladders(a: f64, b: f64, params: &ModelParams) -> (f64, f64, bool) {
    let fd = params.fd();
    let reference = labeling_reference(params);
    let (da, db) = (
        circular_distance(a, reference, fd),
        circular_distance(b, reference, fd),
    );
    let (e0, partner) = if da <= db { (a, b) } else { (b, a) };
    let degenerate = circular_distance(a, b, fd) < DEGENERACY_TOL * fd.abs();
    (e0, partner, degenerate)
}

/// Spectrum at `params` obtained from a computation at `|F d| = reference_fd`
/// and rescaled.
pub fn rescale_spectrum(params: &ModelParams, reference_fd: f64, engine: &Engine) -> Result<LadderSpectrum> {
    params.validate()?;
    let fd = params.fd();
    if fd == 0.0 {
        return Err(Error::ZeroForce);
    }
    if !(reference_fd.is_finite() && reference_fd > 0.0) {
        return Err(Error::InvalidParams {
            field: "reference_Fd",
            reason: format!("must be positive, got {reference_fd}"),
        });
    }
    let factor = fd.abs() / reference_fd;
    let reduced = ModelParams {
        delta: params.delta / factor,
        big_delta: params.big_delta / factor,
        force: reference_fd / params.d,
        ..*params
    };
    Ok(engine.run(&reduced)?.scaled(factor, *params))
}

//! Field-free minibands of the period-doubled chain.
//!
//! Quasimomenta live in the reduced zone `[-pi/2d, pi/2d)`; anything outside
//! is folded back. Band `0` carries the `(-1)^{beta+1}` sign choice, so with
//! `gamma = sgn(delta)` it is the lower band for `delta >= 0` and the upper
//! one for `delta < 0`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::ModelParams;

/// Miniband label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Band {
    Zero,
    One,
}

impl Band {
    pub fn index(self) -> usize {
        match self {
            Band::Zero => 0,
            Band::One => 1,
        }
    }

    pub fn from_index(beta: usize) -> Option<Self> {
        match beta {
            0 => Some(Band::Zero),
            1 => Some(Band::One),
            _ => None,
        }
    }
}

/// Bloch coefficients `u`, `v` and the normalisation `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochCoefficients {
    pub u: f64,
    pub v: f64,
    pub norm: f64,
}

/// One sample of the band structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandPoint {
    pub kappa: f64,
    pub e0: f64,
    pub e1: f64,
    pub u: f64,
    pub v: f64,
    pub norm: f64,
    pub coupling: Complex64,
}

/// Fold `kappa` into `[-pi/2d, pi/2d)`.
pub fn fold_kappa(kappa: f64, d: f64) -> f64 {
    let period = PI / d;
    let half = 0.5 * period;
    (kappa + half).rem_euclid(period) - half
}

fn root(kappa: f64, params: &ModelParams) -> f64 {
    let c = (kappa * params.d).cos();
    params.delta.hypot(params.big_delta * c)
}

pub fn dispersion(band: Band, kappa: f64, params: &ModelParams) -> f64 {
    let sign = match band {
        Band::Zero => -1.0,
        Band::One => 1.0,
    };
    0.5 * params.gamma() * sign * root(kappa, params)
}

pub fn bloch_coefficients(kappa: f64, params: &ModelParams) -> Result<BlochCoefficients> {
    let u = params.big_delta * (kappa * params.d).cos();
    let v = params.delta + params.gamma() * root(kappa, params);
    let norm = PI * (u * u + v * v) / params.d;
    // u and v both vanish only when delta = 0 and cos(kappa d) = 0 (up to rounding)
    let scale = params.delta.abs().max(params.big_delta.abs());
    if norm == 0.0 || (u * u + v * v) <= (1e-14 * scale).powi(2) {
        return Err(Error::DegeneratePoint { kappa });
    }
    Ok(BlochCoefficients { u, v, norm })
}

/// Site-`n` coefficient of the Bloch wave of `band` at `kappa`.
pub fn bloch_wave_amplitude(band: Band, kappa: f64, n: i64, params: &ModelParams) -> Result<Complex64> {
    let BlochCoefficients { u, v, norm } = bloch_coefficients(kappa, params)?;
    let even = n.rem_euclid(2) == 0;
    let kd = kappa * params.d;
    let (coef, phase) = match (band, even) {
        (Band::Zero, true) => (u, (n + 1) as f64 * kd),
        (Band::Zero, false) => (v, (n + 1) as f64 * kd),
        (Band::One, true) => (v, n as f64 * kd),
        (Band::One, false) => (-u, n as f64 * kd),
    };
    Ok(Complex64::from_polar(coef / norm.sqrt(), phase))
}

/// Reduced interband matrix element `M`; identically zero at `delta = 0`.
pub fn coupling(kappa: f64, params: &ModelParams) -> Complex64 {
    if params.delta == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let kd = kappa * params.d;
    let c = kd.cos();
    let denom = 2.0 * params.delta.powi(2) + 2.0 * (params.big_delta * c).powi(2);
    let modulus = params.fd() * params.big_delta * params.delta * kd.sin() / denom;
    // -i e^{i kd}
    Complex64::new(0.0, -modulus) * Complex64::from_polar(1.0, kd)
}

/// Single-passage Zener transition probability across the zone edge.
pub fn landau_zener_probability(params: &ModelParams) -> Result<f64> {
    let sweep = params.d * (params.force * params.big_delta).abs();
    if sweep == 0.0 {
        return Err(Error::ZeroSweep);
    }
    let p = (-PI * params.delta * params.delta / (2.0 * sweep)).exp();
    Ok(p.clamp(0.0, 1.0))
}

/// Minimum of `E1 - E0` over the zone, reached at the zone edge.
pub fn band_gap(params: &ModelParams) -> f64 {
    params.delta.abs()
}

pub fn band_point(kappa: f64, params: &ModelParams) -> Result<BandPoint> {
    let kappa = fold_kappa(kappa, params.d);
    let BlochCoefficients { u, v, norm } = bloch_coefficients(kappa, params)?;
    Ok(BandPoint {
        kappa,
        e0: dispersion(Band::Zero, kappa, params),
        e1: dispersion(Band::One, kappa, params),
        u,
        v,
        norm,
        coupling: coupling(kappa, params),
    })
}

/// `points` samples over the closed reduced zone `[-pi/2d, pi/2d]`.
///
/// At `delta = 0` the zone edges are skipped because the Bloch coefficients
/// are singular there.
pub fn sample_bands(params: &ModelParams, points: usize) -> Result<Vec<BandPoint>> {
    params.validate()?;
    if points < 2 {
        return Err(Error::InvalidParams {
            field: "kpoints",
            reason: format!("need at least 2 grid points, got {points}"),
        });
    }
    let edge = FRAC_PI_2 / params.d;
    (0..points)
        .map(|j| -edge + 2.0 * edge * j as f64 / (points - 1) as f64)
        .filter(|k| params.delta != 0.0 || (k * params.d).cos().abs() > 1e-12)
        .map(|k| {
            // keep +pi/2d as is rather than folding it onto -pi/2d
            let folded = band_point(k, params)?;
            Ok(BandPoint { kappa: k, ..folded })
        })
        .collect()
}

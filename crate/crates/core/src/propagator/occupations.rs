//! Miniband populations and band projection.
//!
//! With `phi_e(kappa) = sum_m psi_{2m} e^{-i 2m kappa d}` and
//! `phi_o(kappa) = sum_m psi_{2m+1} e^{-i (2m+1) kappa d}`,
//!
//! ```text
//! |<chi_0|psi>|^2 = |u phi_e + v phi_o|^2 / N
//! |<chi_1|psi>|^2 = |v phi_e - u phi_o|^2 / N
//! ```
//!
//! integrated over the reduced zone with a midpoint rule, doubling the
//! number of nodes until the populations settle.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::bands::{bloch_coefficients, Band};
use crate::error::{Error, Result};
use crate::lattice::{ModelParams, WavePacket};

const COMPLETENESS_TOL: f64 = 1e-6;
const CONVERGENCE_TOL: f64 = 1e-12;
const MAX_NODES: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandOccupations {
    pub t: f64,
    pub p0: f64,
    pub p1: f64,
    /// Set at `delta = 0`, where the two minibands touch and the split is
    /// taken against the folded single band.
    pub degenerate: bool,
}

impl BandOccupations {
    pub fn at(mut self, t: f64) -> Self {
        self.t = t;
        self
    }
}

fn midpoints(nodes: usize, d: f64) -> impl Iterator<Item = f64> {
    let width = PI / d;
    (0..nodes).map(move |j| -0.5 * width + (j as f64 + 0.5) * width / nodes as f64)
}

/// `(phi_e, phi_o)` at `kd = kappa d`.
fn even_odd(psi: &WavePacket, kd: f64) -> (Complex64, Complex64) {
    let mut even = Complex64::new(0.0, 0.0);
    let mut odd = Complex64::new(0.0, 0.0);
    let step = Complex64::from_polar(1.0, -kd);
    let mut phase = Complex64::from_polar(1.0, -(psi.window().n_min as f64) * kd);
    for (n, a) in psi.window().sites().zip(psi.amplitudes()) {
        if n.rem_euclid(2) == 0 {
            even += a * phase;
        } else {
            odd += a * phase;
        }
        phase *= step;
    }
    (even, odd)
}

fn populations(psi: &WavePacket, params: &ModelParams, nodes: usize) -> Result<(f64, f64)> {
    let weight = PI / params.d / nodes as f64;
    let mut p = (0.0, 0.0);
    for kappa in midpoints(nodes, params.d) {
        let c = bloch_coefficients(kappa, params)?;
        let (e, o) = even_odd(psi, kappa * params.d);
        p.0 += (e * c.u + o * c.v).norm_sqr() / c.norm;
        p.1 += (e * c.v - o * c.u).norm_sqr() / c.norm;
    }
    Ok((p.0 * weight, p.1 * weight))
}

/// Populations `(p0, p1)` of the two minibands.
pub fn band_occupations(psi: &WavePacket, params: &ModelParams, kappa_points: usize) -> Result<BandOccupations> {
    params.validate()?;
    let mut nodes = kappa_points.max(16);
    let mut prev = populations(psi, params, nodes)?;
    loop {
        if nodes >= MAX_NODES {
            break;
        }
        nodes *= 2;
        let next = populations(psi, params, nodes)?;
        let change = (next.0 - prev.0).abs().max((next.1 - prev.1).abs());
        prev = next;
        if change < CONVERGENCE_TOL {
            break;
        }
    }
    let deficit = (psi.norm_sqr() - prev.0 - prev.1).abs();
    if deficit > COMPLETENESS_TOL {
        return Err(Error::CompletenessDeficit {
            deficit,
            tol: COMPLETENESS_TOL,
        });
    }
    Ok(BandOccupations {
        t: 0.0,
        p0: prev.0,
        p1: prev.1,
        degenerate: params.delta == 0.0,
    })
}

/// Project `psi` onto one miniband and renormalise, using `nodes`
/// quadrature points over the reduced zone.
pub fn project_band(psi: &WavePacket, band: Band, params: &ModelParams, nodes: usize) -> Result<WavePacket> {
    params.validate()?;
    if nodes == 0 {
        return Err(Error::InvalidParams {
            field: "kpoints",
            reason: "projection needs at least one node".into(),
        });
    }
    let window = *psi.window();
    let weight = PI / params.d / nodes as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); window.len()];
    for kappa in midpoints(nodes, params.d) {
        let c = bloch_coefficients(kappa, params)?;
        let kd = kappa * params.d;
        let (e, o) = even_odd(psi, kd);
        // chi(n) <chi|psi> = coef_n e^{i n kd} * overlap / N, common phases cancel
        let (overlap, ce, co) = match band {
            Band::Zero => (e * c.u + o * c.v, c.u, c.v),
            Band::One => (e * c.v - o * c.u, c.v, -c.u),
        };
        let scale = overlap * (weight / c.norm);
        let step = Complex64::from_polar(1.0, kd);
        let mut phase = Complex64::from_polar(1.0, window.n_min as f64 * kd);
        for (i, slot) in out.iter_mut().enumerate() {
            let n = window.site(i);
            let coef = if n.rem_euclid(2) == 0 { ce } else { co };
            *slot += scale * phase * coef;
            phase *= step;
        }
    }
    WavePacket::new(window, out)
}

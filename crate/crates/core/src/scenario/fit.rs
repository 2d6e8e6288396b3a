//! Fixed-frequency cosine fit of stroboscopic band populations.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::ModelParams;
use crate::propagator::BandOccupations;

pub const MIN_FIT_SAMPLES: usize = 8;
pub const DEFAULT_FIT_RESIDUAL: f64 = 1e-2;

/// `p0(n) = X + Y cos(omega n + phi)` with `omega = pi (dF - 2 E0)/dF`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationFit {
    pub x: f64,
    /// Non-negative amplitude.
    pub y: f64,
    /// Phase in `(-pi, pi]`; zero when `y` vanishes.
    pub phi: f64,
    /// Angular frequency per sample, fixed from the ladder offset.
    pub omega: f64,
    /// Root-mean-square deviation of the samples from the fit.
    pub residual: f64,
    /// Lower-band populations at `t = n T1`, as `(n, p0)`.
    pub samples: Vec<(u64, f64)>,
}

impl OccupationFit {
    pub fn eval(&self, n: f64) -> f64 {
        self.x + self.y * (self.omega * n + self.phi).cos()
    }
}

/// Fit stroboscopic samples (taken at integer multiples of `T1`) without
/// a residual check.
pub fn fit_unchecked(samples: &[BandOccupations], params: &ModelParams, e0: f64) -> Result<OccupationFit> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_FIT_SAMPLES,
            found: samples.len(),
        });
    }
    let fd = params.fd().abs();
    if fd == 0.0 {
        return Err(Error::ZeroForce);
    }
    let t1 = PI * params.hbar / fd;
    let omega = PI * (fd - 2.0 * e0) / fd;
    let mut points = Vec::with_capacity(samples.len());
    for s in samples {
        let n = (s.t / t1).round();
        if n < 0.0 || (s.t - n * t1).abs() > 1e-9 * t1.max(s.t) {
            return Err(Error::InvalidParams {
                field: "samples",
                reason: format!("t = {} is not a multiple of T1 = {t1}", s.t),
            });
        }
        points.push((n as u64, s.p0));
    }
    let m = points.len();
    let design = DMatrix::from_fn(m, 3, |i, j| {
        let arg = omega * points[i].0 as f64;
        match j {
            0 => 1.0,
            1 => arg.cos(),
            _ => arg.sin(),
        }
    });
    let rhs = DVector::from_iterator(m, points.iter().map(|p| p.1));
    let coef = design
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::StepSize(format!("least squares failed: {e}")))?;
    let residual = ((&design * &coef - &rhs).norm_squared() / m as f64).sqrt();
    let (a, b) = (coef[1], coef[2]);
    let y = a.hypot(b);
    let phi = if y > 0.0 { (-b).atan2(a) } else { 0.0 };
    Ok(OccupationFit {
        x: coef[0],
        y,
        phi,
        omega,
        residual,
        samples: points,
    })
}

/// Fit and reject the result when the residual exceeds `residual_limit`.
pub fn fit_occupation_sinusoid(
    samples: &[BandOccupations],
    params: &ModelParams,
    e0: f64,
    residual_limit: f64,
) -> Result<OccupationFit> {
    let fit = fit_unchecked(samples, params, e0)?;
    if fit.residual.is_nan() || fit.residual > residual_limit {
        return Err(Error::FitResidual {
            residual: fit.residual,
            limit: residual_limit,
        });
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(params: &ModelParams, e0: f64, x: f64, y: f64, phi: f64, count: u64) -> Vec<BandOccupations> {
        let t1 = PI * params.hbar / params.fd().abs();
        let omega = PI * (params.fd().abs() - 2.0 * e0) / params.fd().abs();
        (0..count)
            .map(|n| {
                let p0 = x + y * (omega * n as f64 + phi).cos();
                BandOccupations {
                    t: n as f64 * t1,
                    p0,
                    p1: 1.0 - p0,
                    degenerate: false,
                }
            })
            .collect()
    }

    #[test]
    fn recovers_parameters() {
        let p = ModelParams::new(17.19, 80.0, 1.0);
        let s = synthetic(&p, -0.5178, 0.5, 0.45, 0.3, 40);
        let fit = fit_occupation_sinusoid(&s, &p, -0.5178, 1e-10).unwrap();
        assert!((fit.x - 0.5).abs() < 1e-12);
        assert!((fit.y - 0.45).abs() < 1e-12);
        assert!((fit.phi - 0.3).abs() < 1e-12);
        assert!((fit.eval(3.0) - s[3].p0).abs() < 1e-12);
    }

    #[test]
    fn constant_occupation() {
        let p = ModelParams::new(1.0, 3.0, 2.0);
        let s = synthetic(&p, 0.3, 0.8, 0.0, 0.0, 10);
        let fit = fit_occupation_sinusoid(&s, &p, 0.3, 1e-12).unwrap();
        assert!(fit.y < 1e-12 && (fit.x - 0.8).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let p = ModelParams::new(1.0, 3.0, 1.0);
        let s = synthetic(&p, 0.1, 0.5, 0.2, 0.0, 7);
        assert!(matches!(fit_unchecked(&s, &p, 0.1), Err(Error::TooFewSamples { .. })));
        let mut s = synthetic(&p, 0.1, 0.5, 0.2, 0.0, 12);
        s[5].p0 += 0.3;
        assert!(matches!(fit_occupation_sinusoid(&s, &p, 0.1, 1e-2), Err(Error::FitResidual { .. })));
        s[5].t += 0.1;
        assert!(fit_unchecked(&s, &p, 0.1).is_err());
    }
}

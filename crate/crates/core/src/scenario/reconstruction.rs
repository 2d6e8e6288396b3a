//! Reconstruction periods `T1`, `T2` and their commensurability.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::ModelParams;

pub const DEFAULT_RATIO_TOL: f64 = 1e-4;
pub const DEFAULT_MAX_DENOMINATOR: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReconstructionReport {
    /// Half Bloch period `pi hbar / |dF|`.
    pub t1: f64,
    /// Ladder beat period `2 pi hbar / |dF - 2 E0|`.
    pub t2: f64,
    pub ratio: f64,
    /// `(r, s)` with `T2/T1 ~ r/s`; `None` when no fraction within
    /// tolerance has a small enough denominator.
    pub rational: Option<(u64, u64)>,
    /// `r T1 = s T2`.
    pub t_bz: Option<f64>,
    /// `|<psi(0)|psi(T_BZ)>|`, filled in by the scenarios.
    pub fidelity: Option<f64>,
}

/// Fraction `p/q` with the smallest `q <= max_den` such that
/// `|x - p/q| <= tol`, searched through convergents and semiconvergents.
pub fn best_rational(x: f64, tol: f64, max_den: u64) -> Option<(u64, u64)> {
    if !(x.is_finite() && x >= 0.0) {
        return None;
    }
    if (x - x.round()).abs() <= tol {
        return Some((x.round() as u64, 1));
    }
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor() as u64;
        // semiconvergents (h0 + j h1)/(k0 + j k1), j = 1..=a, the last one
        // being the convergent; denominator 1 was checked above
        let first = if k1 == 0 { a + 1 } else { 1 };
        for j in first..=a {
            let q = k0 + j * k1;
            if q > max_den {
                return None;
            }
            let p = h0 + j * h1;
            if (x - p as f64 / q as f64).abs() <= tol {
                return Some((p, q));
            }
        }
        let (h2, k2) = (h0 + a * h1, k0 + a * k1);
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = rest - a as f64;
        if frac <= 0.0 {
            break;
        }
        rest = 1.0 / frac;
    }
    None
}

/// `T1`, `T2` and `T_BZ` for ladder offset `e0`.
pub fn reconstruction_times(params: &ModelParams, e0: f64, tol: f64, max_den: u64) -> Result<ReconstructionReport> {
    params.validate()?;
    let fd = params.fd().abs();
    if fd == 0.0 {
        return Err(Error::ZeroForce);
    }
    let beat = (fd - 2.0 * e0).abs();
    if beat <= 1e-14 * fd {
        return Err(Error::DivergentPeriod);
    }
    let t1 = PI * params.hbar / fd;
    let t2 = 2.0 * PI * params.hbar / beat;
    let ratio = t2 / t1;
    let rational = best_rational(ratio, tol, max_den);
    Ok(ReconstructionReport {
        t1,
        t2,
        ratio,
        rational,
        t_bz: rational.map(|(r, _)| r as f64 * t1),
        fidelity: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_ratio() {
        let r = reconstruction_times(&ModelParams::new(1.0, 1.0, 1.0), 0.0, 1e-4, 10_000).unwrap();
        assert_eq!(r.t1, PI);
        assert_eq!(r.t2, 2.0 * PI);
        assert_eq!(r.rational, Some((2, 1)));
        assert_eq!(r.t_bz, Some(2.0 * PI));
    }

    #[test]
    fn fractions() {
        assert_eq!(best_rational(0.5, 1e-9, 100), Some((1, 2)));
        assert_eq!(best_rational(PI, 1e-3, 1000), Some((201, 64)));
        assert_eq!(best_rational(PI, 1e-6, 1000), Some((355, 113)));
        assert_eq!(best_rational(PI, 1e-12, 1000), None);
        assert_eq!(best_rational(3.0, 1e-12, 10), Some((3, 1)));
    }

    #[test]
    fn smallest_denominator_by_brute_force() {
        for &x in &[0.982512, 1.618034, 0.2857, 2.6457513, 0.0071] {
            let tol = 1e-4;
            let brute = (1..=10_000u64).find_map(|q| {
                let p = (x * q as f64).round() as u64;
                ((x - p as f64 / q as f64).abs() <= tol).then_some((p, q))
            });
            assert_eq!(best_rational(x, tol, 10_000), brute, "{x}");
        }
    }

    #[test]
    fn divergent_beat() {
        let p = ModelParams::new(1.0, 1.0, 1.0);
        assert!(matches!(reconstruction_times(&p, 0.5, 1e-4, 100), Err(Error::DivergentPeriod)));
    }
}

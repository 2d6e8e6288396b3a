//! Ladder offsets from the monodromy of the two-band quasimomentum system.
//!
//! Writing the eigenvalue problem in the Bloch basis gives a 2x2 linear ODE
//! in `y = kappa d` with `pi`-periodic coefficients,
//!
//! ```text
//! dY/dy = i/(F d) [[E0(y) - dF, M(y)*], [M(y), E1(y)]] Y,
//! ```
//!
//! whose monodromy over one period has eigenvalues `exp(i pi z / d)`. The
//! offsets are `F z` modulo `2dF`.
//!
//! The generator is `i` times a Hermitian matrix, so a fourth-order Magnus
//! step with an exact 2x2 exponential keeps the propagator unitary. The
//! coupling peaks at the zone edge with a width of order `delta/Delta`, so
//! steps shrink geometrically towards `y = pi/2`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Matrix2;
use num_complex::Complex64;

use super::{fold_offset, label_ladders, LadderSpectrum, Method};
use crate::bands::{coupling, dispersion, Band};
use crate::error::{Error, Result};
use crate::lattice::ModelParams;

pub const DEFAULT_KAPPA_STEPS: usize = 512;
pub const MIN_KAPPA_STEPS: usize = 64;
const UNIMODULAR_TOL: f64 = 1e-9;
const CONVERGENCE_TOL: f64 = 1e-10;
const MAX_REFINEMENTS: usize = 10;
const LISTED_RUNGS: i64 = 16;

type C2 = Matrix2<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn generator(y: f64, params: &ModelParams) -> C2 {
    let fd = params.fd();
    let kappa = y / params.d;
    let e0 = dispersion(Band::Zero, kappa, params) - fd;
    let e1 = dispersion(Band::One, kappa, params);
    let m = coupling(kappa, params);
    let i = c(0.0, 1.0 / fd);
    Matrix2::new(i * e0, i * m.conj(), i * m, i * e1)
}

/// `exp(omega)` for a 2x2 complex matrix.
fn expm2(omega: &C2) -> C2 {
    let mean = (omega[(0, 0)] + omega[(1, 1)]) * 0.5;
    let b = omega - C2::identity() * mean;
    let s2 = b[(0, 0)] * b[(0, 0)] + b[(0, 1)] * b[(1, 0)];
    let s = s2.sqrt();
    let (ch, sh_over_s) = if s.norm() < 1e-6 {
        (1.0 + s2 * 0.5 + s2 * s2 / 24.0, 1.0 + s2 / 6.0 + s2 * s2 / 120.0)
    } else {
        (s.cosh(), s.sinh() / s)
    };
    (C2::identity() * ch + b * sh_over_s) * mean.exp()
}

/// Step grid on `[0, pi]`: steps of at most `h`, shrinking like
/// `eta (w + |y - pi/2|)` near the zone edge.
fn grid(h: f64, eta: f64, w: f64) -> Vec<f64> {
    let mut half = vec![0.0];
    let mut s = 0.0;
    while s < FRAC_PI_2 {
        s = (s + h.min(eta * (w + s))).min(FRAC_PI_2);
        half.push(s);
    }
    let mut ys: Vec<f64> = half.iter().rev().map(|s| FRAC_PI_2 - s).collect();
    ys.extend(half.iter().skip(1).map(|s| FRAC_PI_2 + s));
    ys[0] = 0.0;
    *ys.last_mut().unwrap() = PI;
    ys
}

fn integrate(params: &ModelParams, steps: usize) -> C2 {
    let w = if params.big_delta == 0.0 || params.delta == 0.0 {
        1.0
    } else {
        (params.delta.abs() / params.big_delta.abs()).clamp(1e-8, 1.0)
    };
    let h = PI / steps as f64;
    let eta = 4.0 / steps as f64;
    let ys = grid(h, eta, w);
    let r3 = 3f64.sqrt();
    let (c1, c2) = (0.5 - r3 / 6.0, 0.5 + r3 / 6.0);
    let mut y_mat = C2::identity();
    for pair in ys.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let dy = b - a;
        let a1 = generator(a + c1 * dy, params);
        let a2 = generator(a + c2 * dy, params);
        let comm = a2 * a1 - a1 * a2;
        let omega = (a1 + a2) * c(0.5 * dy, 0.0) + comm * c(r3 / 12.0 * dy * dy, 0.0);
        y_mat = expm2(&omega) * y_mat;
    }
    y_mat
}

fn eigenvalues2(m: &C2) -> (Complex64, Complex64) {
    let half_tr = (m[(0, 0)] + m[(1, 1)]) * 0.5;
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = (half_tr * half_tr - det).sqrt();
    (half_tr + disc, half_tr - disc)
}

/// Monodromy matrix over one period `kappa in [0, pi/d]`, with `steps`
/// base steps. Uses `|F|`; the offset does not depend on the sign of `F`.
pub fn monodromy(params: &ModelParams, steps: usize) -> Result<Matrix2<Complex64>> {
    params.validate()?;
    if params.force == 0.0 {
        return Err(Error::ZeroForce);
    }
    let p = params.with_force(params.force.abs());
    Ok(integrate(&p, steps))
}

fn offsets_from(m: &C2, params: &ModelParams) -> Result<((f64, f64), (f64, f64))> {
    // Checked on the matrix: near degenerate ladders the eigenvalue
    // square root amplifies round-off far beyond the true deviation.
    let defect = m.adjoint() * m - C2::identity();
    let deviation = defect.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let (mu0, mu1) = eigenvalues2(m);
    if deviation > UNIMODULAR_TOL {
        return Err(Error::NonUnimodular { deviation });
    }
    let d = params.d;
    let z = (d * mu0.arg() / PI, d * mu1.arg() / PI);
    let fd = params.fd().abs();
    let f = params.force.abs();
    Ok((z, (fold_offset(f * z.0, fd), fold_offset(f * z.1, fd))))
}

/// Ladder offset from the Floquet monodromy. The step count starts at
/// `kappa_steps` and doubles until the offsets change by less than `1e-10`.
pub fn ladder_offset_floquet(params: &ModelParams, kappa_steps: usize) -> Result<LadderSpectrum> {
    if kappa_steps < MIN_KAPPA_STEPS {
        return Err(Error::InvalidParams {
            field: "kappa_steps",
            reason: format!("need at least {MIN_KAPPA_STEPS}, got {kappa_steps}"),
        });
    }
    let mut steps = kappa_steps;
    let mut prev = offsets_from(&monodromy(params, steps)?, params)?;
    let mut change = f64::INFINITY;
    if params.delta == 0.0 {
        // The minibands touch at the zone edge and the passage there is a
        // complete transfer, which the decoupled system cannot represent.
        // The chain is then a plain cosine band with offsets 0 and dF.
        let fd = params.fd().abs();
        prev = ((0.0, params.d), (0.0, fold_offset(fd, fd)));
        change = 0.0;
    }
    for _ in 0..MAX_REFINEMENTS {
        if change < CONVERGENCE_TOL {
            break;
        }
        steps *= 2;
        let next = offsets_from(&monodromy(params, steps)?, params)?;
        let fd = params.fd().abs();
        // compare as unordered pairs
        let same = super::circular_distance(next.1 .0, prev.1 .0, fd)
            .max(super::circular_distance(next.1 .1, prev.1 .1, fd));
        let swapped = super::circular_distance(next.1 .0, prev.1 .1, fd)
            .max(super::circular_distance(next.1 .1, prev.1 .0, fd));
        change = same.min(swapped);
        prev = next;
    }
    let (z, (a, b)) = prev;
    let (e0, partner, degenerate) = label_ladders(a, b, params);
    let exponents = if e0 == a { z } else { (z.1, z.0) };
    let fd = params.fd().abs();
    let rungs = |alpha: i64| -> Vec<f64> {
        (-LISTED_RUNGS..=LISTED_RUNGS)
            .map(|n| {
                if alpha == 0 {
                    e0 + 2.0 * n as f64 * fd
                } else {
                    -e0 + (2 * n + 1) as f64 * fd
                }
            })
            .collect()
    };
    Ok(LadderSpectrum {
        params: *params,
        offset_e0: e0,
        partner,
        spacing: 2.0 * fd,
        exponents,
        eigenvalues: [rungs(0), rungs(1)],
        method: Method::Floquet,
        degenerate,
        error_estimate: change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential_matches_series() {
        let omega = Matrix2::new(c(0.1, 0.3), c(-0.2, 0.05), c(0.4, -0.1), c(-0.3, 0.2));
        let mut term = C2::identity();
        let mut sum = C2::identity();
        for k in 1..30 {
            term = term * omega * c(1.0 / k as f64, 0.0);
            sum += term;
        }
        assert!((expm2(&omega) - sum).norm() < 1e-14);
        let tiny = omega * c(1e-9, 0.0);
        assert!((expm2(&tiny) - (C2::identity() + tiny)).norm() < 1e-17);
    }

    #[test]
    fn grid_covers_period_and_refines_at_edge() {
        let ys = grid(0.1, 0.05, 1e-3);
        assert_eq!(ys[0], 0.0);
        assert_eq!(*ys.last().unwrap(), PI);
        assert!(ys.windows(2).all(|p| p[1] > p[0]));
        assert!(ys.contains(&FRAC_PI_2));
        let min_step = ys.windows(2).map(|p| p[1] - p[0]).fold(f64::MAX, f64::min);
        assert!(min_step < 1e-4);
    }

    #[test]
    fn decoupled_offsets() {
        let s = ladder_offset_floquet(&ModelParams::new(0.0, 5.0, 1.0), 128).unwrap();
        let mut offs = [s.offset_e0, s.partner];
        offs.sort_by(f64::total_cmp);
        assert!(offs[0].abs() < 1e-10, "{offs:?}");
        assert!((offs[1] - 1.0).abs() < 1e-10, "{offs:?}");
        assert!(s.offset_e0.abs() < 1e-10);
    }

    #[test]
    fn narrow_gap_approaches_bessel_limit() {
        let q = ModelParams::new(1e-3, 5.0, 1.0);
        let s = ladder_offset_floquet(&q, 512).unwrap();
        let expected = 0.5e-3 * libm::j0(5.0);
        assert!((s.offset_e0 - expected).abs() < 1e-6, "{} vs {expected}", s.offset_e0);
    }

    #[test]
    fn monodromy_is_unitary() {
        let m = monodromy(&ModelParams::new(17.19, 80.0, 1.0), 512).unwrap();
        let prod = m.adjoint() * m;
        assert!((prod - C2::identity()).norm() < 1e-10);
    }

    #[test]
    fn quoted_offset() {
        let s = ladder_offset_floquet(&ModelParams::new(17.19, 80.0, 1.0), 512).unwrap();
        assert!((s.offset_e0 + 0.5178).abs() < 1e-3, "{}", s.offset_e0);
        assert!(!s.degenerate);
        let mirrored = ladder_offset_floquet(&ModelParams::new(17.19, 80.0, -1.0), 512).unwrap();
        assert_eq!(mirrored.offset_e0, s.offset_e0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ladder_offset_floquet(&ModelParams::new(1.0, 1.0, 1.0), 10).is_err());
        assert!(matches!(
            ladder_offset_floquet(&ModelParams::new(1.0, 1.0, 0.0), 128),
            Err(Error::ZeroForce)
        ));
    }
}

//! Second-order quasimomentum engine.
//!
//! With `x = kappa d - C(t)`, `alpha = Delta/(2dF)` and `beta = delta/(2dF)`
//! the first-order system decouples into
//!
//! ```text
//! A'' + (beta^2 - i alpha sin x + alpha^2 cos^2 x) A = 0
//! B'' + (beta^2 + i alpha sin x + alpha^2 cos^2 x) B = 0
//! ```
//!
//! with `A' = -i alpha cos(x) A + i beta B` and `B' = i alpha cos(x) B + i beta A`
//! supplying the initial slopes of every constant-force segment.

use num_complex::Complex64;
use rayon::prelude::*;

use super::kappa::{kappa_grid, KappaOptions, KappaPropagatorState};
use super::ode::{integrate, Tolerances};
use super::{check_kappa_points, schedule_of, split_by_segment, ForceSchedule};
use crate::error::{Error, Result};
use crate::lattice::ModelParams;

pub fn evolve_whittaker_hill(params: &ModelParams, times: &[f64], kappa_points: usize) -> Result<Vec<KappaPropagatorState>> {
    evolve_whittaker_hill_with(params, &schedule_of(params), times, kappa_points, KappaOptions::default())
}

fn run_one(
    kappa: f64,
    params: &ModelParams,
    schedule: &ForceSchedule,
    parts: &[(f64, f64, Vec<usize>)],
    times: &[f64],
    tol: Tolerances,
) -> Result<Vec<[Complex64; 2]>> {
    let i = Complex64::new(0.0, 1.0);
    let mut out = vec![[Complex64::new(0.0, 0.0); 2]; times.len()];
    let (mut a, mut b) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    let last_needed = parts.iter().rposition(|p| !p.2.is_empty()).unwrap_or(0);
    for (k, (start, force, idx)) in parts.iter().enumerate().take(last_needed + 1) {
        let fd = params.d * force;
        if fd == 0.0 {
            return Err(Error::ZeroForce);
        }
        let alpha = params.big_delta / (2.0 * fd);
        let beta = params.delta / (2.0 * fd);
        let c0 = schedule.gauge_phase(*start, params.d, params.hbar);
        let x0 = kappa * params.d - c0;
        let to_x = |t: f64| x0 - fd / params.hbar * (t - start);
        let ca = x0.cos();
        let y0 = [a, (-i * alpha * ca) * a + i * beta * b, b, (i * alpha * ca) * b + i * beta * a];
        let rhs = |x: f64, y: &[Complex64], dy: &mut [Complex64]| {
            let (s, c) = x.sin_cos();
            let common = beta * beta + alpha * alpha * c * c;
            let qa = Complex64::new(common, -alpha * s);
            let qb = Complex64::new(common, alpha * s);
            dy[0] = y[1];
            dy[1] = -qa * y[0];
            dy[2] = y[3];
            dy[3] = -qb * y[2];
        };
        let mut targets: Vec<f64> = idx.iter().map(|&j| to_x(times[j])).collect();
        if k < last_needed {
            targets.push(to_x(parts[k + 1].0));
        }
        let states = integrate(rhs, x0, &y0, &targets, tol)?;
        for (j, &ti) in idx.iter().enumerate() {
            out[ti] = [states[j][0], states[j][2]];
        }
        if k < last_needed {
            let s = states.last().expect("breakpoint state");
            a = s[0];
            b = s[2];
        }
    }
    Ok(out)
}

/// Integrate the decoupled second-order equations under a
/// piecewise-constant, nowhere vanishing force.
pub fn evolve_whittaker_hill_with(
    params: &ModelParams,
    schedule: &ForceSchedule,
    times: &[f64],
    kappa_points: usize,
    options: KappaOptions,
) -> Result<Vec<KappaPropagatorState>> {
    params.validate()?;
    check_kappa_points(kappa_points)?;
    let parts = split_by_segment(schedule, times)?;
    let grid = kappa_grid(kappa_points, params.d);
    let mut tol = options.tol;
    for attempt in 0..=options.max_retries {
        let per_kappa: Vec<Vec<[Complex64; 2]>> = grid
            .par_iter()
            .map(|&k| run_one(k, params, schedule, &parts, times, tol))
            .collect::<Result<_>>()?;
        let states: Vec<KappaPropagatorState> = times
            .iter()
            .enumerate()
            .map(|(j, &t)| KappaPropagatorState {
                kappa_grid: grid.clone(),
                a: per_kappa.iter().map(|v| v[j][0]).collect(),
                b: per_kappa.iter().map(|v| v[j][1]).collect(),
                gauge_phase: schedule.gauge_phase(t, params.d, params.hbar),
                t,
                d: params.d,
            })
            .collect();
        let drift = states.iter().map(|s| s.unitarity_drift()).fold(0.0, f64::max);
        if drift <= options.unitarity_limit {
            return Ok(states);
        }
        if attempt == options.max_retries {
            return Err(Error::StepSize(format!(
                "unitarity drift {drift:e} above {:e} after {} refinements",
                options.unitarity_limit, options.max_retries
            )));
        }
        tol = tol.tightened(100.0);
    }
    unreachable!("loop returns on the last attempt")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gapless_case_is_single_band_phase() {
        let p = ModelParams::new(0.0, 5.0, 1.0);
        let t = 2.0;
        let s = &evolve_whittaker_hill(&p, &[t], 64).unwrap()[0];
        for (k, a) in s.kappa_grid.iter().zip(&s.a) {
            let phase = 2.5 * (k.sin() - (k - t).sin());
            assert!((a - Complex64::from_polar(1.0, phase)).norm() < 1e-9);
        }
    }

    #[test]
    fn flat_band_oscillator() {
        // Delta = 0: constant coefficients, A = cos(beta (x - x0)) in x
        let p = ModelParams::new(1.2, 0.0, 1.0);
        let t = 1.7;
        let s = &evolve_whittaker_hill(&p, &[t], 64).unwrap()[0];
        let beta: f64 = 0.6;
        for a in &s.a {
            assert!((a - Complex64::new((beta * t).cos(), 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn needs_force() {
        let p = ModelParams::new(1.0, 1.0, 0.0);
        assert!(matches!(evolve_whittaker_hill(&p, &[1.0], 64), Err(Error::ZeroForce)));
    }
}

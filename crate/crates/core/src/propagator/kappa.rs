//! First-order quasimomentum engine.
//!
//! For each `kappa` on a uniform grid over `[-pi/d, pi/d)`,
//!
//! ```text
//! dA/dt =  i (Delta/2hbar) cos(kappa d - C(t)) A - i (delta/2hbar) B
//! dB/dt = -i (Delta/2hbar) cos(kappa d - C(t)) B - i (delta/2hbar) A
//! ```
//!
//! from `A = 1`, `B = 0`. `C(t)` is evaluated in closed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::ode::{integrate, Tolerances};
use super::{check_kappa_points, schedule_of, split_by_segment, ForceSchedule};
use crate::error::{Error, Result};
use crate::lattice::{ModelParams, WavePacket};

/// `(A, B)` on the quasimomentum grid at time `t`, with gauge phase `C(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KappaPropagatorState {
    pub kappa_grid: Vec<f64>,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub gauge_phase: f64,
    pub t: f64,
    /// Lattice period the grid refers to.
    pub d: f64,
}

impl KappaPropagatorState {
    pub fn initial(kappa_grid: Vec<f64>, d: f64) -> Self {
        let n = kappa_grid.len();
        KappaPropagatorState {
            kappa_grid,
            a: vec![Complex64::new(1.0, 0.0); n],
            b: vec![Complex64::new(0.0, 0.0); n],
            gauge_phase: 0.0,
            t: 0.0,
            d,
        }
    }

    /// `max_kappa | |A|^2 + |B|^2 - 1 |`.
    pub fn unitarity_drift(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| (a.norm_sqr() + b.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Fourier coefficients `c_m` with `f(kappa) = sum_m c_m exp(i m kappa d)`
    /// for `|m| <= grid/2`.
    fn fourier(&self, values: &[Complex64]) -> Vec<(i64, Complex64)> {
        let n = self.kappa_grid.len();
        let half = (n / 2) as i64;
        (-half..half)
            .map(|m| {
                let sum: Complex64 = self
                    .kappa_grid
                    .iter()
                    .zip(values)
                    .map(|(k, v)| v * Complex64::from_polar(1.0, -(m as f64) * k * self.d))
                    .sum();
                (m, sum / n as f64)
            })
            .collect()
    }

    /// Act with `exp(-i C N) (A(K) + L B(K))` on `psi0`, where `K` shifts
    /// amplitudes by one site. Amplitude shifted in from outside the window
    /// is zero.
    pub fn apply(&self, psi0: &WavePacket) -> Result<WavePacket> {
        let a = self.fourier(&self.a);
        let b = self.fourier(&self.b);
        let window = *psi0.window();
        let amps = window
            .sites()
            .map(|n| {
                let mut sa = Complex64::new(0.0, 0.0);
                let mut sb = Complex64::new(0.0, 0.0);
                for ((m, am), (_, bm)) in a.iter().zip(&b) {
                    let src = psi0.amplitude(n + m);
                    if src.re != 0.0 || src.im != 0.0 {
                        sa += am * src;
                        sb += bm * src;
                    }
                }
                let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                (sa + sb * sign) * Complex64::from_polar(1.0, -self.gauge_phase * n as f64)
            })
            .collect();
        WavePacket::from_raw(window, amps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaOptions {
    pub tol: Tolerances,
    /// Largest accepted `| |A|^2 + |B|^2 - 1 |`; exceeding it triggers a
    /// tighter rerun.
    pub unitarity_limit: f64,
    pub max_retries: usize,
}

impl Default for KappaOptions {
    fn default() -> Self {
        KappaOptions {
            tol: Tolerances::default(),
            unitarity_limit: 1e-9,
            max_retries: 2,
        }
    }
}

/// Uniform grid of `points` quasimomenta over `[-pi/d, pi/d)`.
pub fn kappa_grid(points: usize, d: f64) -> Vec<f64> {
    (0..points)
        .map(|j| -PI / d + 2.0 * PI * j as f64 / (points as f64 * d))
        .collect()
}

pub fn evolve_kappa(params: &ModelParams, times: &[f64], kappa_points: usize) -> Result<Vec<KappaPropagatorState>> {
    evolve_kappa_with(params, &schedule_of(params), times, kappa_points, KappaOptions::default())
}

fn run_one(
    kappa: f64,
    params: &ModelParams,
    schedule: &ForceSchedule,
    parts: &[(f64, f64, Vec<usize>)],
    times: &[f64],
    tol: Tolerances,
) -> Result<Vec<[Complex64; 2]>> {
    let half_band = params.big_delta / (2.0 * params.hbar);
    let half_gap = params.delta / (2.0 * params.hbar);
    let kd = kappa * params.d;
    let mut out = vec![[Complex64::new(0.0, 0.0); 2]; times.len()];
    let mut y = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let last_needed = parts.iter().rposition(|p| !p.2.is_empty()).unwrap_or(0);
    for (k, (start, force, idx)) in parts.iter().enumerate().take(last_needed + 1) {
        let c0 = schedule.gauge_phase(*start, params.d, params.hbar);
        let rate = params.d * force / params.hbar;
        let rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
            let c = c0 + rate * (t - start);
            let w = half_band * (kd - c).cos();
            dy[0] = Complex64::new(0.0, w) * y[0] - Complex64::new(0.0, half_gap) * y[1];
            dy[1] = Complex64::new(0.0, -w) * y[1] - Complex64::new(0.0, half_gap) * y[0];
        };
        let mut targets: Vec<f64> = idx.iter().map(|&i| times[i]).collect();
        if k < last_needed {
            targets.push(parts[k + 1].0);
        }
        let states = integrate(rhs, *start, &y, &targets, tol)?;
        for (j, &i) in idx.iter().enumerate() {
            out[i] = [states[j][0], states[j][1]];
        }
        if k < last_needed {
            y = states.last().expect("breakpoint state").clone();
        }
    }
    Ok(out)
}

/// Integrate the quasimomentum system under a piecewise-constant force.
pub fn evolve_kappa_with(
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
            .map(|(i, &t)| KappaPropagatorState {
                kappa_grid: grid.clone(),
                a: per_kappa.iter().map(|v| v[i][0]).collect(),
                b: per_kappa.iter().map(|v| v[i][1]).collect(),
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

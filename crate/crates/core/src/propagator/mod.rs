//! Time evolution of wave packets.
//!
//! Three engines are available and cross-check each other:
//!
//! * [`evolve_real_space`]: exact exponential of the truncated Hamiltonian
//!   through its eigen-decomposition (reference engine);
//! * [`evolve_kappa`]: the per-quasimomentum 2x2 system for the functions
//!   `A(kappa, t)`, `B(kappa, t)` of the operator ansatz
//!   `U = exp(-i C N) (A(K) + L B(K))`;
//! * [`evolve_whittaker_hill`]: the same functions obtained from the
//!   decoupled second-order equations in `x = kappa d - C(t)`.
//!
//! The force may change at breakpoints (see [`ForceSchedule`]); the
//! quasimomentum engines restart there with the accumulated gauge phase.

mod checkpoint;
mod kappa;
pub mod ode;
mod occupations;
mod real_space;
mod whittaker_hill;

use serde::Serialize;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC};
pub use kappa::{evolve_kappa, evolve_kappa_with, kappa_grid, KappaOptions, KappaPropagatorState};
pub use occupations::{band_occupations, project_band, BandOccupations};
pub use real_space::{evolve_real_space, evolve_real_space_with, RealSpaceOptions, RealSpacePropagator, Trajectory};
pub use whittaker_hill::{evolve_whittaker_hill, evolve_whittaker_hill_with};

use crate::error::{Error, Result};
use crate::lattice::ModelParams;

pub const DEFAULT_KAPPA_POINTS: usize = 256;
pub const MIN_KAPPA_POINTS: usize = 64;

/// Piecewise-constant force: `initial` from `t = 0`, then each
/// `(time, force)` pair takes over at `time`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForceSchedule {
    pub initial: f64,
    pub changes: Vec<(f64, f64)>,
}

impl ForceSchedule {
    pub fn constant(force: f64) -> Self {
        ForceSchedule {
            initial: force,
            changes: Vec::new(),
        }
    }

    /// `force` up to `flip_time`, `-force` afterwards.
    pub fn flipped_at(force: f64, flip_time: f64) -> Self {
        ForceSchedule {
            initial: force,
            changes: vec![(flip_time, -force)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut last = 0.0;
        for &(t, f) in &self.changes {
            if !(t.is_finite() && f.is_finite()) || t < last {
                return Err(Error::InvalidParams {
                    field: "force schedule",
                    reason: "breakpoints must be finite, non-negative and increasing".into(),
                });
            }
            last = t;
        }
        Ok(())
    }

    /// Segments `(start, force)` in order, the first starting at 0.
    pub fn segments(&self) -> Vec<(f64, f64)> {
        std::iter::once((0.0, self.initial))
            .chain(self.changes.iter().copied())
            .collect()
    }

    pub fn force_at(&self, t: f64) -> f64 {
        self.segments()
            .iter()
            .rev()
            .find(|(start, _)| t >= *start)
            .map_or(self.initial, |s| s.1)
    }

    /// `C(t) = (d/hbar) int_0^t F`.
    pub fn gauge_phase(&self, t: f64, d: f64, hbar: f64) -> f64 {
        let segs = self.segments();
        let mut acc = 0.0;
        for (k, &(start, force)) in segs.iter().enumerate() {
            if t <= start {
                break;
            }
            let end = segs.get(k + 1).map_or(t, |s| s.0.min(t));
            acc += force * (end - start);
        }
        d / hbar * acc
    }
}

/// Split ascending output times into runs belonging to the same force
/// segment. Returns `(segment start, force, indices into times)`.
pub(crate) fn split_by_segment(schedule: &ForceSchedule, times: &[f64]) -> Result<Vec<(f64, f64, Vec<usize>)>> {
    schedule.validate()?;
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParams {
            field: "times",
            reason: "output times must be finite, non-negative and ascending".into(),
        });
    }
    let segs = schedule.segments();
    Ok(segs
        .iter()
        .enumerate()
        .map(|(k, &(start, force))| {
            let end = segs.get(k + 1).map_or(f64::INFINITY, |s| s.0);
            let idx = times
                .iter()
                .enumerate()
                .filter(|(_, &t)| t >= start && t < end)
                .map(|(i, _)| i)
                .collect();
            (start, force, idx)
        })
        .collect())
}

pub(crate) fn check_kappa_points(kappa_points: usize) -> Result<()> {
    if kappa_points < MIN_KAPPA_POINTS {
        return Err(Error::InvalidParams {
            field: "kpoints",
            reason: format!("need at least {MIN_KAPPA_POINTS}, got {kappa_points}"),
        });
    }
    Ok(())
}

pub(crate) fn schedule_of(params: &ModelParams) -> ForceSchedule {
    ForceSchedule::constant(params.force)
}

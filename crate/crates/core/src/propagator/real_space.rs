//! Reference engine: `psi(t) = V exp(-i E t / hbar) V^T psi(0)` on the
//! truncated lattice.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{schedule_of, split_by_segment, ForceSchedule};
use crate::error::{Error, Result};
use crate::lattice::{build_hamiltonian, LatticeWindow, ModelParams, WavePacket};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealSpaceOptions {
    /// Largest tolerated probability inside the guard bands.
    pub leak_limit: f64,
}

impl Default for RealSpaceOptions {
    fn default() -> Self {
        RealSpaceOptions { leak_limit: 1e-6 }
    }
}

/// Eigen-decomposition of one Hamiltonian, reusable for any time step.
#[derive(Debug, Clone)]
pub struct RealSpacePropagator {
    window: LatticeWindow,
    hbar: f64,
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl RealSpacePropagator {
    pub fn new(params: &ModelParams, window: &LatticeWindow) -> Result<Self> {
        let h = build_hamiltonian(params, window)?.dense();
        let eig = SymmetricEigen::new(h);
        Ok(RealSpacePropagator {
            window: *window,
            hbar: params.hbar,
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    /// `exp(-i H dt / hbar) psi`; `dt` may be negative.
    pub fn step(&self, psi: &WavePacket, dt: f64) -> Result<WavePacket> {
        if *psi.window() != self.window {
            return Err(Error::InvalidWindow("packet and propagator windows differ".into()));
        }
        let re = DVector::from_iterator(psi.amplitudes().len(), psi.amplitudes().iter().map(|a| a.re));
        let im = DVector::from_iterator(psi.amplitudes().len(), psi.amplitudes().iter().map(|a| a.im));
        let cr = self.vectors.tr_mul(&re);
        let ci = self.vectors.tr_mul(&im);
        let mut rr = DVector::zeros(cr.len());
        let mut ri = DVector::zeros(cr.len());
        for k in 0..cr.len() {
            let phase = Complex64::from_polar(1.0, -self.energies[k] * dt / self.hbar);
            let c = Complex64::new(cr[k], ci[k]) * phase;
            rr[k] = c.re;
            ri[k] = c.im;
        }
        let out_re = &self.vectors * rr;
        let out_im = &self.vectors * ri;
        let amps = out_re
            .iter()
            .zip(out_im.iter())
            .map(|(r, i)| Complex64::new(*r, *i))
            .collect();
        WavePacket::from_raw(self.window, amps)
    }
}

/// States at the requested times plus leakage bookkeeping.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<WavePacket>,
    /// Largest guard-band probability seen at any output time.
    pub max_guard_weight: f64,
}

/// Evolve under constant force; errors if the packet reaches the guard band.
pub fn evolve_real_space(psi0: &WavePacket, params: &ModelParams, times: &[f64]) -> Result<Trajectory> {
    evolve_real_space_with(psi0, params, &schedule_of(params), times, RealSpaceOptions::default())
}

/// Evolve under a piecewise-constant force. `params.force` is ignored in
/// favour of `schedule`.
pub fn evolve_real_space_with(
    psi0: &WavePacket,
    params: &ModelParams,
    schedule: &ForceSchedule,
    times: &[f64],
    options: RealSpaceOptions,
) -> Result<Trajectory> {
    params.validate()?;
    let window = *psi0.window();
    let parts = split_by_segment(schedule, times)?;
    let mut states = vec![None; times.len()];
    let mut current = psi0.clone();
    let mut current_t = 0.0;
    let mut cache: Vec<(f64, RealSpacePropagator)> = Vec::new();
    let mut max_guard: f64 = psi0.guard_weight();

    let last_needed = parts.iter().rposition(|p| !p.2.is_empty()).unwrap_or(0);
    for (k, (start, force, idx)) in parts.iter().enumerate().take(last_needed + 1) {
        let segment_end = (k < last_needed).then(|| parts[k + 1].0);
        let prop_idx = match cache.iter().position(|(f, _)| f == force) {
            Some(i) => i,
            None => {
                cache.push((*force, RealSpacePropagator::new(&params.with_force(*force), &window)?));
                cache.len() - 1
            }
        };
        let prop = &cache[prop_idx].1;
        if current_t != *start {
            current = prop.step(&current, start - current_t)?;
            current_t = *start;
        }
        for &i in idx {
            let psi = prop.step(&current, times[i] - *start)?;
            max_guard = max_guard.max(psi.guard_weight());
            states[i] = Some(psi);
        }
        if let Some(end) = segment_end {
            current = prop.step(&current, end - *start)?;
            current_t = end;
            max_guard = max_guard.max(current.guard_weight());
        }
    }
    if max_guard > options.leak_limit {
        return Err(Error::Leakage {
            leak: max_guard,
            limit: options.leak_limit,
        });
    }
    Ok(Trajectory {
        times: times.to_vec(),
        states: states.into_iter().map(|s| s.expect("every time belongs to a segment")).collect(),
        max_guard_weight: max_guard,
    })
}

//! Named experiments built on the propagators and the ladder spectrum.

mod beam_splitter;
mod fit;
mod modes;
mod packets;
mod reconstruction;
mod tune;

use serde::Serialize;

pub use beam_splitter::{run_beam_splitter, BeamSplitterOptions, BeamSplitterReport};
pub use fit::{fit_occupation_sinusoid, fit_unchecked, OccupationFit, DEFAULT_FIT_RESIDUAL, MIN_FIT_SAMPLES};
pub use modes::{dominant_frequencies, run_breathing_mode, run_oscillating_mode, zener_transfer, ModeOptions, ZenerTransfer};
pub use packets::{make_gaussian_packet, PacketBand, PROJECTION_NODES};
pub use reconstruction::{
    best_rational, reconstruction_times, ReconstructionReport, DEFAULT_MAX_DENOMINATOR, DEFAULT_RATIO_TOL,
};
pub use tune::{period_ratio, tune_delta, TuneResult, DEFAULT_SCAN_POINTS, RATIO_TOL};

use crate::lattice::{LatticeWindow, ModelParams};
use crate::propagator::BandOccupations;

/// Everything a scenario run produces. Fields that do not apply to a
/// scenario are left empty or `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub params: ModelParams,
    pub window: LatticeWindow,
    pub times: Vec<f64>,
    /// `|psi_n(t)|^2` per output time, ordered like `window.sites()`.
    #[serde(skip)]
    pub densities: Vec<Vec<f64>>,
    pub occupations: Vec<BandOccupations>,
    pub centroids: Vec<f64>,
    pub widths: Vec<f64>,
    /// Ladder offset used for the periods and the fit.
    pub offset_e0: Option<f64>,
    pub reconstruction: Option<ReconstructionReport>,
    /// Populations at `t = n T1`.
    pub stroboscopic: Vec<BandOccupations>,
    pub fit: Option<OccupationFit>,
    /// Strongest `(frequency, amplitude)` peaks of the width signal.
    pub width_peaks: Vec<(f64, f64)>,
    pub beam_splitter: Option<BeamSplitterReport>,
    pub max_guard_weight: f64,
}

impl ScenarioReport {
    pub(crate) fn empty(name: &str, params: ModelParams, window: LatticeWindow) -> Self {
        ScenarioReport {
            name: name.to_string(),
            params,
            window,
            times: Vec::new(),
            densities: Vec::new(),
            occupations: Vec::new(),
            centroids: Vec::new(),
            widths: Vec::new(),
            offset_e0: None,
            reconstruction: None,
            stroboscopic: Vec::new(),
            fit: None,
            width_peaks: Vec::new(),
            beam_splitter: None,
            max_guard_weight: 0.0,
        }
    }
}

/// `0, dt, 2dt, ...` up to and including `horizon`.
pub fn time_grid(horizon: f64, dt: f64) -> Vec<f64> {
    let steps = (horizon / dt * (1.0 + 1e-12)).floor() as usize;
    let mut times: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    if horizon - times[steps] > 1e-9 * dt {
        times.push(horizon);
    }
    times
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_hits_horizon() {
        let g = time_grid(1.0, 0.25);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g = time_grid(1.0, 0.3);
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        let g = time_grid(2.0 * std::f64::consts::PI, std::f64::consts::PI / 32.0);
        assert_eq!(g.len(), 65);
    }
}

use serde::{Deserialize, Serialize};

use super::packets::{make_gaussian_packet, PacketBand};
use super::{time_grid, ScenarioReport};
use crate::bands::landau_zener_probability;
use crate::error::{Error, Result};
use crate::lattice::{LatticeWindow, ModelParams};
use crate::propagator::{evolve_real_space_with, ForceSchedule, RealSpaceOptions};

/// Branch windows may share at most this many sites; the default pair
/// touches at two.
pub const MAX_WINDOW_OVERLAP: i64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamSplitterOptions {
    /// `T_B / 2` when unset.
    pub flip_time: Option<f64>,
    /// `3 T_B / 2` when unset.
    pub measure_time: Option<f64>,
    pub left: (i64, i64),
    pub right: (i64, i64),
    pub packet_width: f64,
    pub packet_center: f64,
    pub packet_band: PacketBand,
    /// Density snapshots between 0 and the measurement time, inclusive.
    pub snapshots: usize,
    pub leak_limit: f64,
}

impl Default for BeamSplitterOptions {
    fn default() -> Self {
        BeamSplitterOptions {
            flip_time: None,
            measure_time: None,
            left: (-100, -40),
            right: (-41, 20),
            packet_width: 10.0,
            packet_center: 0.0,
            packet_band: PacketBand::None,
            snapshots: 97,
            leak_limit: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BeamSplitterReport {
    pub flip_time: f64,
    pub measure_time: f64,
    pub left_window: (i64, i64),
    pub right_window: (i64, i64),
    pub pop_left: f64,
    pub pop_right: f64,
    /// Probability outside both windows.
    pub out_of_window: f64,
    /// Probability on sites counted in both windows.
    pub overlap_weight: f64,
    pub lz_prediction: f64,
    /// `pop_left / (pop_left + pop_right)`.
    pub left_fraction: f64,
}

fn check_windows(left: (i64, i64), right: (i64, i64)) -> Result<i64> {
    for (name, (lo, hi)) in [("left", left), ("right", right)] {
        if lo > hi {
            return Err(Error::InvalidWindow(format!("{name} branch window [{lo}, {hi}] is empty")));
        }
    }
    let shared = (left.1.min(right.1) - left.0.max(right.0) + 1).max(0);
    if shared > MAX_WINDOW_OVERLAP {
        return Err(Error::WindowsOverlap(format!(
            "[{}, {}] and [{}, {}] share {shared} sites (at most {MAX_WINDOW_OVERLAP} allowed)",
            left.0, left.1, right.0, right.1
        )));
    }
    Ok(shared)
}

/// Evolve a Gaussian under `F` up to the flip, under `-F` afterwards, and
/// weigh the two branches at the measurement time.
pub fn run_beam_splitter(
    params: &ModelParams,
    window: &LatticeWindow,
    options: &BeamSplitterOptions,
) -> Result<ScenarioReport> {
    params.validate()?;
    if params.force == 0.0 {
        return Err(Error::ZeroForce);
    }
    check_windows(options.left, options.right)?;
    let tb = params.bloch_time();
    let flip_time = options.flip_time.unwrap_or(0.5 * tb);
    let measure_time = options.measure_time.unwrap_or(1.5 * tb);
    if !(flip_time >= 0.0 && measure_time >= flip_time && measure_time.is_finite()) {
        return Err(Error::InvalidParams {
            field: "measure_time",
            reason: format!("need 0 <= flip_time <= measure_time, got {flip_time}, {measure_time}"),
        });
    }
    let lz_prediction = landau_zener_probability(params)?;
    let psi0 = make_gaussian_packet(
        options.packet_width,
        options.packet_center,
        options.packet_band,
        params,
        window,
    )?;

    let snapshots = options.snapshots.max(2);
    let mut times = time_grid(measure_time, measure_time / (snapshots - 1) as f64);
    if measure_time == 0.0 {
        times = vec![0.0];
    }
    let schedule = ForceSchedule::flipped_at(params.force, flip_time);
    let trajectory = evolve_real_space_with(
        &psi0,
        params,
        &schedule,
        &times,
        RealSpaceOptions {
            leak_limit: options.leak_limit,
        },
    )?;
    let last = trajectory.states.last().expect("at least one output time");
    let pop_left = last.weight_in(options.left.0, options.left.1);
    let pop_right = last.weight_in(options.right.0, options.right.1);
    let shared = (options.left.0.max(options.right.0), options.left.1.min(options.right.1));
    let overlap_weight = if shared.0 <= shared.1 {
        last.weight_in(shared.0, shared.1)
    } else {
        0.0
    };
    let out_of_window = (last.norm_sqr() - pop_left - pop_right + overlap_weight).max(0.0);

    let mut report = ScenarioReport::empty("beam-splitter", *params, *window);
    report.max_guard_weight = trajectory.max_guard_weight;
    report.densities = trajectory.states.iter().map(|s| s.density()).collect();
    report.centroids = trajectory.states.iter().map(|s| s.centroid()).collect();
    report.widths = trajectory.states.iter().map(|s| s.rms_width()).collect();
    report.times = trajectory.times;
    report.beam_splitter = Some(BeamSplitterReport {
        flip_time,
        measure_time,
        left_window: options.left,
        right_window: options.right,
        pop_left,
        pop_right,
        out_of_window,
        overlap_weight,
        lz_prediction,
        left_fraction: pop_left / (pop_left + pop_right),
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_overlap_rules() {
        assert_eq!(check_windows((-100, -40), (-41, 20)).unwrap(), 2);
        assert_eq!(check_windows((-10, -5), (0, 5)).unwrap(), 0);
        assert!(matches!(check_windows((-10, 0), (-5, 5)), Err(Error::WindowsOverlap(_))));
        assert!(check_windows((3, 1), (5, 6)).is_err());
    }
}

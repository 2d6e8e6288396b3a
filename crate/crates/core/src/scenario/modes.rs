use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::fit::fit_unchecked;
use super::packets::{make_gaussian_packet, PacketBand};
use super::reconstruction::{reconstruction_times, DEFAULT_MAX_DENOMINATOR, DEFAULT_RATIO_TOL};
use super::{time_grid, ScenarioReport};
use crate::error::{Error, Result};
use crate::lattice::{LatticeWindow, ModelParams, WavePacket};
use crate::propagator::{band_occupations, BandOccupations, RealSpacePropagator, DEFAULT_KAPPA_POINTS};
use crate::spectrum::Engine;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModeOptions {
    /// Output spacing; `T_B / 64` when unset.
    pub dt: Option<f64>,
    pub packet_width: f64,
    pub packet_center: f64,
    pub packet_band: PacketBand,
    pub kappa_points: usize,
    pub leak_limit: f64,
    /// Band populations at every output time (stroboscopic ones are always
    /// computed).
    pub occupations: bool,
    /// Number of width-spectrum peaks to report.
    pub peaks: usize,
}

impl Default for ModeOptions {
    fn default() -> Self {
        ModeOptions {
            dt: None,
            packet_width: 10.0,
            packet_center: 0.0,
            packet_band: PacketBand::None,
            kappa_points: DEFAULT_KAPPA_POINTS,
            leak_limit: 1e-6,
            occupations: true,
            peaks: 4,
        }
    }
}

/// Strongest local maxima `(frequency, amplitude)` of the discrete Fourier
/// transform of a uniformly sampled signal, mean removed.
pub fn dominant_frequencies(times: &[f64], signal: &[f64], count: usize) -> Vec<(f64, f64)> {
    let n = signal.len().min(times.len());
    if n < 4 {
        return Vec::new();
    }
    let dt = times[1] - times[0];
    let mean = signal[..n].iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex<f64>> = signal[..n].iter().map(|x| Complex::new(x - mean, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let amp: Vec<f64> = buf[..=n / 2].iter().map(|c| c.norm() / n as f64).collect();
    let mut peaks: Vec<(f64, f64)> = (1..amp.len())
        .filter(|&k| amp[k] >= amp[k - 1] && amp.get(k + 1).is_none_or(|&next| amp[k] > next))
        .map(|k| (k as f64 / (n as f64 * dt), amp[k]))
        .collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    peaks.truncate(count);
    peaks
}

fn check_leak(psi: &WavePacket, limit: f64) -> Result<f64> {
    let leak = psi.guard_weight();
    if leak > limit {
        return Err(Error::Leakage { leak, limit });
    }
    Ok(leak)
}

fn run_mode(
    name: &str,
    params: &ModelParams,
    window: &LatticeWindow,
    horizon: f64,
    options: &ModeOptions,
    width: f64,
    band: PacketBand,
) -> Result<ScenarioReport> {
    params.validate()?;
    if params.force == 0.0 {
        return Err(Error::ZeroForce);
    }
    if !(horizon.is_finite() && horizon >= 0.0) {
        return Err(Error::InvalidParams {
            field: "horizon",
            reason: format!("must be finite and non-negative, got {horizon}"),
        });
    }
    let dt = options.dt.unwrap_or(params.bloch_time() / 64.0);
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParams {
            field: "dt",
            reason: format!("must be positive, got {dt}"),
        });
    }
    let psi0 = make_gaussian_packet(width, options.packet_center, band, params, window)?;
    let prop = RealSpacePropagator::new(params, window)?;
    let mut report = ScenarioReport::empty(name, *params, *window);

    report.times = time_grid(horizon, dt);
    let mut states = Vec::with_capacity(report.times.len());
    for &t in &report.times {
        let psi = prop.step(&psi0, t)?;
        report.max_guard_weight = report.max_guard_weight.max(check_leak(&psi, options.leak_limit)?);
        states.push(psi);
    }
    report.densities = states.iter().map(|s| s.density()).collect();
    report.centroids = states.iter().map(|s| s.centroid()).collect();
    report.widths = states.iter().map(|s| s.rms_width()).collect();
    if options.occupations {
        report.occupations = occupations_at(&states, &report.times, params, options.kappa_points)?;
    }

    let e0 = Engine::floquet().run(params)?.offset_e0;
    report.offset_e0 = Some(e0);
    let mut recon = match reconstruction_times(params, e0, DEFAULT_RATIO_TOL, DEFAULT_MAX_DENOMINATOR) {
        Ok(r) => Some(r),
        Err(Error::DivergentPeriod) => None,
        Err(e) => return Err(e),
    };
    let t1 = std::f64::consts::PI * params.hbar / params.fd().abs();
    let strobe_times: Vec<f64> = (0..=((horizon / t1) * (1.0 + 1e-12)).floor() as usize)
        .map(|n| n as f64 * t1)
        .collect();
    let mut strobe_states = Vec::with_capacity(strobe_times.len());
    for &t in &strobe_times {
        let psi = prop.step(&psi0, t)?;
        report.max_guard_weight = report.max_guard_weight.max(check_leak(&psi, options.leak_limit)?);
        strobe_states.push(psi);
    }
    report.stroboscopic = occupations_at(&strobe_states, &strobe_times, params, options.kappa_points)?;
    report.fit = fit_unchecked(&report.stroboscopic, params, e0).ok();

    if let Some(r) = recon.as_mut() {
        if let Some(t_bz) = r.t_bz {
            let psi = prop.step(&psi0, t_bz)?;
            r.fidelity = Some(psi0.overlap(&psi).norm());
        }
    }
    report.reconstruction = recon;
    // the final sample may be off-grid and duplicates t = 0 for whole periods
    let m = report.times.len().saturating_sub(1);
    report.width_peaks = dominant_frequencies(&report.times[..m], &report.widths[..m], options.peaks);
    Ok(report)
}

fn occupations_at(
    states: &[WavePacket],
    times: &[f64],
    params: &ModelParams,
    kappa_points: usize,
) -> Result<Vec<BandOccupations>> {
    states
        .par_iter()
        .zip(times)
        .map(|(s, &t)| band_occupations(s, params, kappa_points).map(|o| o.at(t)))
        .collect()
}

/// Broad Gaussian start (width and band from `options`), evolved to
/// `horizon` with the density map, band populations, stroboscopic fit and
/// the fidelity at `T_BZ`.
pub fn run_oscillating_mode(
    params: &ModelParams,
    window: &LatticeWindow,
    horizon: f64,
    options: &ModeOptions,
) -> Result<ScenarioReport> {
    run_mode(
        "oscillating",
        params,
        window,
        horizon,
        options,
        options.packet_width,
        options.packet_band,
    )
}

/// Single-site start at `options.packet_center`; `packet_width` and
/// `packet_band` are ignored. The width spectrum is reported in
/// `width_peaks`.
pub fn run_breathing_mode(
    params: &ModelParams,
    window: &LatticeWindow,
    horizon: f64,
    options: &ModeOptions,
) -> Result<ScenarioReport> {
    run_mode("breathing", params, window, horizon, options, 0.0, PacketBand::None)
}

/// Interband transfer of a single-band packet after a partial Bloch cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZenerTransfer {
    pub params: ModelParams,
    pub occupations: BandOccupations,
    /// Population that left the initially occupied band.
    pub transferred: f64,
    pub lz_prediction: f64,
}

/// Evolve a `packet_band` Gaussian (lower band when unset) to `time`,
/// `T_B / 2` by default, and weigh the other band.
pub fn zener_transfer(
    params: &ModelParams,
    window: &LatticeWindow,
    time: Option<f64>,
    options: &ModeOptions,
) -> Result<ZenerTransfer> {
    params.validate()?;
    if params.force == 0.0 {
        return Err(Error::ZeroForce);
    }
    let t = time.unwrap_or(0.5 * params.bloch_time());
    let band = match options.packet_band {
        PacketBand::None => PacketBand::Lower,
        b => b,
    };
    let psi0 = make_gaussian_packet(options.packet_width, options.packet_center, band, params, window)?;
    let psi = RealSpacePropagator::new(params, window)?.step(&psi0, t)?;
    check_leak(&psi, options.leak_limit)?;
    let occupations = band_occupations(&psi, params, options.kappa_points)?.at(t);
    let transferred = match band.band(params).expect("band chosen above") {
        crate::bands::Band::Zero => occupations.p1,
        crate::bands::Band::One => occupations.p0,
    };
    Ok(ZenerTransfer {
        params: *params,
        occupations,
        transferred,
        lz_prediction: crate::bands::landau_zener_probability(params)?,
    })
}

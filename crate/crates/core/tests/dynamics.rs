//! Propagation, occupations and reconstruction across engines.

use num_complex::Complex64;
use proptest::prelude::*;

use bloch_zener::propagator::{
    band_occupations, evolve_kappa, evolve_real_space, evolve_whittaker_hill, read_checkpoint, write_checkpoint,
    ForceSchedule, KappaPropagatorState, RealSpacePropagator,
};
use bloch_zener::scenario::{
    best_rational, make_gaussian_packet, run_breathing_mode, run_oscillating_mode, ModeOptions, PacketBand,
};
use bloch_zener::spectrum::Engine;
use bloch_zener::{LatticeWindow, ModelParams, WavePacket};

fn conj(psi: &WavePacket) -> WavePacket {
    WavePacket::from_raw(*psi.window(), psi.amplitudes().iter().map(|a| a.conj()).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn real_space_norm_and_time_reversal(
        delta in -6.0..6.0f64,
        big in 0.0..8.0f64,
        f in -2.0..2.0f64,
        width in 1.0..6.0f64,
        t in 0.0..10.0f64,
    ) {
        let p = ModelParams::new(delta, big, f);
        let w = LatticeWindow::symmetric(64, 8).unwrap();
        let psi0 = make_gaussian_packet(width, 0.0, PacketBand::None, &p, &w).unwrap();
        let prop = RealSpacePropagator::new(&p, &w).unwrap();
        let psi = prop.step(&psi0, t).unwrap();
        prop_assert!((psi.norm_sqr() - 1.0).abs() <= 1e-10);
        // H is real: conj . U(t) . conj . U(t) = 1
        let back = conj(&prop.step(&conj(&psi), t).unwrap());
        let err = back.amplitudes().iter().zip(psi0.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-7, "{}", err);
    }

    #[test]
    fn occupations_are_complementary(
        delta in 0.1..10.0f64,
        big in 0.1..20.0f64,
        width in 2.0..12.0f64,
        center in -20.0..20.0f64,
    ) {
        let p = ModelParams::new(delta, big, 1.0);
        let w = LatticeWindow::symmetric(96, 16).unwrap();
        let psi = make_gaussian_packet(width, center, PacketBand::None, &p, &w).unwrap();
        let o = band_occupations(&psi, &p, 256).unwrap();
        prop_assert!((o.p0 + o.p1 - 1.0).abs() <= 1e-6);
        prop_assert!(o.p0 >= -1e-12 && o.p1 >= -1e-12);
    }

    #[test]
    fn gauge_phase_is_exact(f in -5.0..5.0f64, d in 0.5..2.0f64, hbar in 0.5..2.0f64, t in 0.0..100.0f64) {
        let c = ForceSchedule::constant(f).gauge_phase(t, d, hbar);
        prop_assert!((c - d * f * t / hbar).abs() <= 4.0 * f64::EPSILON * (d * f * t / hbar).abs());
    }

    #[test]
    fn checkpoint_round_trip(
        amps in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 1..40),
        t in 0.0..50.0f64,
        c in -100.0..100.0f64,
        d in 0.5..3.0f64,
    ) {
        let n = amps.len();
        let grid: Vec<f64> = (0..n).map(|j| -std::f64::consts::PI / d + 2.0 * std::f64::consts::PI * j as f64 / (n as f64 * d)).collect();
        let state = KappaPropagatorState {
            kappa_grid: grid,
            a: amps.iter().map(|x| Complex64::new(x.0, x.1)).collect(),
            b: amps.iter().map(|x| Complex64::new(x.2, x.3)).collect(),
            gauge_phase: c,
            t,
            d,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("state.bin");
        write_checkpoint(&path, &state).unwrap();
        let back = read_checkpoint(&path).unwrap();
        prop_assert_eq!(back.a, state.a);
        prop_assert_eq!(back.b, state.b);
        prop_assert_eq!(back.kappa_grid, state.kappa_grid);
        prop_assert_eq!((back.t, back.gauge_phase), (state.t, state.gauge_phase));
        prop_assert!((back.d - state.d).abs() <= 1e-14 * state.d);
    }

    #[test]
    fn reduced_fractions_come_back(r in 1u64..200, s in 1u64..60) {
        let g = gcd(r, s);
        let got = best_rational(r as f64 / s as f64, 1e-9, 10_000);
        prop_assert_eq!(got, Some((r / g, s / g)));
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn kappa_engines_agree(delta in 0.5..6.0f64, big in 0.5..6.0f64, f in 0.5..2.0f64) {
        let p = ModelParams::new(delta, big, f);
        let times: Vec<f64> = (0..=8).map(|k| k as f64 * p.bloch_time() / 4.0).collect();
        let a = evolve_kappa(&p, &times, 64).unwrap();
        let b = evolve_whittaker_hill(&p, &times, 64).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!(x.unitarity_drift() <= 1e-9);
            for j in 0..x.a.len() {
                prop_assert!((x.a[j] - y.a[j]).norm() <= 1e-8 && (x.b[j] - y.b[j]).norm() <= 1e-8);
            }
        }
    }
}

#[test]
fn kappa_reconstruction_matches_real_space() {
    let p = ModelParams::new(1.5, 4.0, 1.0);
    let w = LatticeWindow::symmetric(96, 16).unwrap();
    let psi0 = make_gaussian_packet(6.0, 3.0, PacketBand::Lower, &p, &w).unwrap();
    let times: Vec<f64> = (0..=12).map(|k| k as f64 * p.bloch_time() / 6.0).collect();
    let real = evolve_real_space(&psi0, &p, &times).unwrap();
    for (state, k) in real.states.iter().zip(evolve_kappa(&p, &times, 256).unwrap()) {
        let rebuilt = k.apply(&psi0).unwrap();
        let err = rebuilt.amplitudes().iter().zip(state.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err <= 1e-8, "t = {}: {err}", k.t);
    }
}

#[test]
fn fitted_frequency_locks_to_ladder_offset() {
    let p = ModelParams::new(1.5, 4.0, 1.0);
    let w = LatticeWindow::symmetric(128, 16).unwrap();
    let opts = ModeOptions {
        packet_band: PacketBand::Lower,
        occupations: false,
        ..ModeOptions::default()
    };
    let r = run_oscillating_mode(&p, &w, 6.0 * p.bloch_time(), &opts).unwrap();
    let e0 = Engine::floquet().run(&p).unwrap().offset_e0;
    let fit = r.fit.expect("enough stroboscopic samples");
    let expected = std::f64::consts::PI * (p.fd() - 2.0 * e0) / p.fd();
    assert!((fit.omega - expected).abs() <= 1e-12, "{} vs {expected}", fit.omega);
    assert!(fit.residual <= 1e-6, "{}", fit.residual);
    assert!(fit.x > 0.0 && fit.y >= 0.0);
    for o in &r.stroboscopic {
        assert!((o.p0 + o.p1 - 1.0).abs() <= 1e-6);
    }
}

#[test]
fn fidelity_recurs_at_multiples_of_reconstruction_time() {
    let p = ModelParams::new(6.734, 80.0, 1.0);
    let w = LatticeWindow::default();
    let opts = ModeOptions {
        occupations: false,
        ..ModeOptions::default()
    };
    let r = run_oscillating_mode(&p, &w, p.bloch_time(), &opts).unwrap();
    let t_bz = r.reconstruction.unwrap().t_bz.unwrap();
    let psi0 = make_gaussian_packet(10.0, 0.0, PacketBand::None, &p, &w).unwrap();
    let prop = RealSpacePropagator::new(&p, &w).unwrap();
    for k in [1.0, 2.0] {
        let f = psi0.overlap(&prop.step(&psi0, k * t_bz).unwrap()).norm();
        assert!(f >= 0.99, "k = {k}: {f}");
    }
}

#[test]
fn occupation_step_at_half_period() {
    let p = ModelParams::new(6.734, 80.0, 1.0);
    let tb = p.bloch_time();
    let r = run_oscillating_mode(&p, &LatticeWindow::default(), tb, &ModeOptions::default()).unwrap();
    let half = r.occupations.iter().find(|o| (o.t - 0.5 * tb).abs() < 1e-9).unwrap();
    assert!((half.p1 - 0.41).abs() < 0.01, "{}", half.p1);
}

#[test]
fn wide_gap_suppresses_transitions() {
    let p = ModelParams::new(60.0, 80.0, 1.0);
    let opts = ModeOptions {
        packet_band: PacketBand::Lower,
        ..ModeOptions::default()
    };
    let r = run_oscillating_mode(&p, &LatticeWindow::default(), 2.0 * p.bloch_time(), &opts).unwrap();
    assert!(r.occupations.iter().all(|o| o.p1 < 0.01));
}

#[test]
fn breathing_spectrum_has_bloch_and_half_period_lines() {
    let p = ModelParams::new(6.734, 80.0, 1.0);
    let tb = p.bloch_time();
    let r = run_breathing_mode(&p, &LatticeWindow::default(), 8.0 * tb, &ModeOptions::default()).unwrap();
    let t_bz = r.reconstruction.as_ref().unwrap().t_bz.unwrap();
    let t1 = 0.5 * tb;
    let lines: Vec<f64> = r.width_peaks.iter().take(2).map(|(f, _)| *f).collect();
    let resolution = 1.0 / (8.0 * tb);
    assert!(lines.iter().any(|f| (f - 1.0 / t_bz).abs() < 0.5 * resolution), "{lines:?}");
    assert!(lines.iter().any(|f| (f - 1.0 / t1).abs() < 0.5 * resolution), "{lines:?}");
}

#[test]
fn gapless_breathing_stays_in_place() {
    let p = ModelParams::new(0.0, 4.0, 1.0);
    let tb = p.bloch_time();
    let w = LatticeWindow::symmetric(64, 8).unwrap();
    let r = run_breathing_mode(&p, &w, 4.0 * tb, &ModeOptions::default()).unwrap();
    assert!(r.centroids.iter().all(|c| c.abs() < 1e-9));
    let at = |t: f64| r.widths[r.times.iter().position(|s| (s - t).abs() < 1e-9).unwrap()];
    assert!(at(tb).abs() < 1e-9 && at(2.0 * tb).abs() < 1e-9);
    assert!(at(0.5 * tb) > 1.0);
    let main = r.width_peaks[0].0;
    assert!((main - 1.0 / tb).abs() < 0.5 / (4.0 * tb), "{main}");
}

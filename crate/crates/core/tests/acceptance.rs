//! End-to-end acceptance checks at desk scale (window +-256, guard 32,
//! 256 quasimomenta). Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use bloch_zener::bands::landau_zener_probability;
use bloch_zener::propagator::{
    band_occupations, evolve_kappa, evolve_real_space, evolve_whittaker_hill, DEFAULT_KAPPA_POINTS,
};
use bloch_zener::scenario::{
    make_gaussian_packet, reconstruction_times, run_beam_splitter, run_oscillating_mode, zener_transfer,
    BeamSplitterOptions, ModeOptions, PacketBand, DEFAULT_MAX_DENOMINATOR, DEFAULT_RATIO_TOL,
};
use bloch_zener::spectrum::{
    circular_distance, fold_offset, interior_eigenstates, ladder_offset_diag, ladder_offset_floquet,
    offset_approx_bessel, offset_approx_elliptic, Engine, DEFAULT_KAPPA_STEPS,
};
use bloch_zener::{LatticeWindow, ModelParams, Result};

type Check = fn() -> Result<Verdict>;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn floquet(p: &ModelParams) -> Result<f64> {
    Ok(ladder_offset_floquet(p, DEFAULT_KAPPA_STEPS)?.offset_e0)
}

fn quoted_offsets() -> Result<Verdict> {
    let w = LatticeWindow::default();
    let mut worst: f64 = 0.0;
    let mut pass = true;
    let mut parts = Vec::new();
    for (delta, expected, tol) in [(6.734, 0.0, 1e-2), (17.19, -0.5178, 1e-3)] {
        let p = ModelParams::new(delta, 80.0, 1.0);
        let d = ladder_offset_diag(&p, &w)?.offset_e0;
        let f = floquet(&p)?;
        let err = (d - expected).abs().max((f - expected).abs());
        pass &= err <= tol;
        worst = worst.max(err / tol);
        parts.push(format!("delta={delta}: diag {d:.6} floquet {f:.6}"));
    }
    verdict(pass, format!("{} (worst error {worst:.3} of tolerance)", parts.join(", ")))
}

fn commensurability() -> Result<Verdict> {
    let p = ModelParams::new(17.19, 80.0, 1.0);
    let e0 = floquet(&p)?;
    let r = reconstruction_times(&p, e0, DEFAULT_RATIO_TOL, DEFAULT_MAX_DENOMINATOR)?;
    let t_bz = r.t_bz.unwrap_or(f64::NAN);
    let tb = p.bloch_time();
    let pass = r.rational == Some((56, 57)) && (t_bz - 28.0 * tb).abs() <= 1e-9 * tb;
    verdict(
        pass,
        format!("T2/T1 = {:.6} -> {:?}, T_BZ = {:.4} = {:.6} T_B", r.ratio, r.rational, t_bz, t_bz / tb),
    )
}

fn spectral_symmetries() -> Result<Verdict> {
    let mut rng = StdRng::seed_from_u64(3);
    let mut worst_delta: f64 = 0.0;
    let mut worst_big: f64 = 0.0;
    for _ in 0..50 {
        let delta = rng.random_range(0.05..12.0);
        let big = rng.random_range(0.1..20.0);
        let p = ModelParams::new(delta, big, 1.0);
        let e = floquet(&p)?;
        let e_neg = floquet(&p.with_delta(-delta))?;
        let e_big = floquet(&ModelParams::new(delta, -big, 1.0))?;
        worst_delta = worst_delta.max(circular_distance(e_neg, -e, 1.0));
        worst_big = worst_big.max(circular_distance(e_big, e, 1.0));
    }
    verdict(
        worst_delta <= 1e-6 && worst_big <= 1e-6,
        format!("max |E0(-delta)+E0(delta)| = {worst_delta:.2e}, max |E0(-Delta)-E0(Delta)| = {worst_big:.2e}"),
    )
}

/// Cluster folded energies on the circle of circumference `2 fd` without
/// using any ladder machinery: cut at the two widest gaps.
/// Returns the larger spread and the size of the smaller cluster.
fn cluster_spreads(energies: &[f64], fd: f64) -> (f64, usize) {
    let period = 2.0 * fd;
    let mut x: Vec<f64> = energies.iter().map(|e| e.rem_euclid(period)).collect();
    x.sort_by(f64::total_cmp);
    let n = x.len();
    let mut gaps: Vec<(f64, usize)> = (0..n)
        .map(|i| {
            let next = if i + 1 < n { x[i + 1] } else { x[0] + period };
            (next - x[i], i)
        })
        .collect();
    gaps.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (mut a, mut b) = (gaps[0].1, gaps[1].1);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    // clusters are x[a+1..=b] and the wrap-around rest
    let first = x[b] - x[a + 1];
    let second = if b + 1 == n {
        x[a] - x[0]
    } else {
        x[a] + period - x[b + 1]
    };
    (first.max(second), (b - a).min(n - (b - a)))
}

fn two_ladder_completeness() -> Result<Verdict> {
    let mut rng = StdRng::seed_from_u64(4);
    let w = LatticeWindow::default();
    let mut worst_spread: f64 = 0.0;
    let mut used = 0;
    while used < 20 {
        let fd = rng.random_range(0.5..2.0);
        let p = ModelParams::new(rng.random_range(0.2..8.0), rng.random_range(0.5..12.0), fd);
        if Engine::floquet().run(&p)?.degenerate {
            continue;
        }
        used += 1;
        let energies: Vec<f64> = interior_eigenstates(&p, &w)?.iter().map(|s| s.energy).collect();
        let (spread, smaller) = cluster_spreads(&energies, fd);
        worst_spread = worst_spread.max(spread / fd);
        if smaller == 0 {
            worst_spread = f64::INFINITY;
        }
    }
    verdict(
        worst_spread <= 1e-6,
        format!("20 parameter sets, worst intra-cluster spread {worst_spread:.2e} dF"),
    )
}

fn approximation_limits() -> Result<Verdict> {
    let mut worst_bessel: f64 = 0.0;
    for k in 0..=38 {
        let big = 0.5 + 0.25 * k as f64;
        let p = ModelParams::new(0.01, big, 1.0);
        worst_bessel = worst_bessel.max(circular_distance(floquet(&p)?, offset_approx_bessel(&p), 1.0));
    }
    let p = ModelParams::new(40.0, 4.0, 1.0);
    let exact = fold_offset(floquet(&p)?, 1.0);
    let approx = fold_offset(offset_approx_elliptic(&p), 1.0);
    let rel = (approx - exact).abs() / exact.abs();
    verdict(
        worst_bessel <= 1e-3 && rel <= 0.05,
        format!("Bessel max error {worst_bessel:.2e}; elliptic {approx:.6} vs exact {exact:.6} ({:.2}%)", 100.0 * rel),
    )
}

fn figure_params() -> (ModelParams, LatticeWindow, Vec<f64>) {
    let p = ModelParams::new(6.734, 80.0, 1.0);
    let tb = p.bloch_time();
    let times = (0..=32).map(|k| k as f64 * tb / 16.0).collect();
    (p, LatticeWindow::default(), times)
}

fn engine_equivalence() -> Result<Verdict> {
    let (p, w, times) = figure_params();
    let kappa = evolve_kappa(&p, &times, DEFAULT_KAPPA_POINTS)?;
    let hill = evolve_whittaker_hill(&p, &times, DEFAULT_KAPPA_POINTS)?;
    let mut sup: f64 = 0.0;
    for (a, b) in kappa.iter().zip(&hill) {
        for j in 0..a.a.len() {
            sup = sup.max((a.a[j] - b.a[j]).norm()).max((a.b[j] - b.b[j]).norm());
        }
    }
    let psi0 = make_gaussian_packet(10.0, 0.0, PacketBand::None, &p, &w)?;
    let real = evolve_real_space(&psi0, &p, &times)?;
    let mut pop: f64 = 0.0;
    for (state, k) in real.states.iter().zip(&kappa) {
        let from_kappa = k.apply(&psi0)?;
        let a = band_occupations(state, &p, DEFAULT_KAPPA_POINTS)?;
        let b = band_occupations(&from_kappa, &p, DEFAULT_KAPPA_POINTS)?;
        pop = pop.max((a.p0 - b.p0).abs()).max((a.p1 - b.p1).abs());
    }
    verdict(
        sup <= 1e-8 && pop <= 2e-3,
        format!("kappa vs Whittaker-Hill sup {sup:.2e}; real-space vs kappa populations {pop:.2e}"),
    )
}

fn unitarity() -> Result<Verdict> {
    let (p, w, times) = figure_params();
    let drift = evolve_kappa(&p, &times, DEFAULT_KAPPA_POINTS)?
        .iter()
        .map(|s| s.unitarity_drift())
        .fold(0.0, f64::max);
    let psi0 = make_gaussian_packet(10.0, 0.0, PacketBand::None, &p, &w)?;
    let norm = evolve_real_space(&psi0, &p, &times)?
        .states
        .iter()
        .map(|s| (s.norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max);
    verdict(
        drift <= 1e-9 && norm <= 1e-10,
        format!("kappa drift {drift:.2e}, real-space norm drift {norm:.2e}"),
    )
}

fn reconstruction() -> Result<Verdict> {
    let w = LatticeWindow::default();
    let p = ModelParams::new(6.734, 80.0, 1.0);
    let tb = p.bloch_time();
    let fast = ModeOptions {
        occupations: false,
        ..ModeOptions::default()
    };
    let report = run_oscillating_mode(&p, &w, tb, &fast)?;
    let recon = report.reconstruction.expect("commensurate periods");
    let fidelity = recon.fidelity.unwrap_or(0.0);
    let at_tb = recon.t_bz.is_some_and(|t| (t - tb).abs() <= 1e-9 * tb);

    let p = ModelParams::new(17.19, 80.0, 1.0);
    let slow = ModeOptions {
        packet_band: PacketBand::Lower,
        ..fast
    };
    let report = run_oscillating_mode(&p, &w, 28.0 * p.bloch_time(), &slow)?;
    let residual = report.fit.as_ref().map_or(f64::INFINITY, |f| f.residual);
    let s = &report.stroboscopic;
    let back = s.get(56).map_or(f64::INFINITY, |o| (o.p0 - s[0].p0).abs());
    verdict(
        at_tb && fidelity >= 0.99 && residual <= 1e-2 && back <= 1e-2,
        format!("fidelity at T_B {fidelity:.8}; cosine fit residual {residual:.2e}; |p0(56 T1) - p0(0)| = {back:.2e}"),
    )
}

fn landau_zener() -> Result<Verdict> {
    let w = LatticeWindow::default();
    let opts = ModeOptions {
        packet_band: PacketBand::Lower,
        ..ModeOptions::default()
    };
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for delta in [2.0, 4.0, 6.0, 8.0, 10.0, 12.0] {
        let p = ModelParams::new(delta, 80.0, 1.0);
        let t = zener_transfer(&p, &w, Some(0.5 * p.bloch_time()), &opts)?;
        let rel = (t.transferred - t.lz_prediction).abs() / t.lz_prediction;
        worst = worst.max(rel);
        parts.push(format!("{delta}:{:.4}/{:.4}", t.transferred, t.lz_prediction));
    }
    verdict(
        worst <= 0.05,
        format!("worst relative error {:.2}% ({})", 100.0 * worst, parts.join(" ")),
    )
}

fn beam_splitter() -> Result<Verdict> {
    let p = ModelParams::new(6.734, 80.0, 1.0);
    let report = run_beam_splitter(&p, &LatticeWindow::default(), &BeamSplitterOptions::default())?;
    let b = report.beam_splitter.expect("beam-splitter summary");
    let combined = b.pop_left + b.pop_right - b.overlap_weight;
    let lz = landau_zener_probability(&p)?;
    let rel = (b.left_fraction - lz).abs() / lz;
    let split = b.overlap_weight <= 1e-6;
    verdict(
        combined >= 0.995 && rel <= 0.05 && split,
        format!(
            "left {:.5} right {:.5} combined {combined:.5} shared {:.1e}; left fraction {:.5} vs LZ {lz:.5} ({:.2}%)",
            b.pop_left,
            b.pop_right,
            b.overlap_weight,
            b.left_fraction,
            100.0 * rel
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("1 quoted ladder offsets, both engines", quoted_offsets),
        ("2 commensurability 56/57, T_BZ = 28 T_B", commensurability),
        ("3 spectral symmetries", spectral_symmetries),
        ("4 two-ladder completeness", two_ladder_completeness),
        ("5 approximation limits", approximation_limits),
        ("6 engine equivalence", engine_equivalence),
        ("7 unitarity and normalisation", unitarity),
        ("8 reconstruction", reconstruction),
        ("9 Landau-Zener transfer", landau_zener),
        ("10 beam splitter", beam_splitter),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(v) => (v.pass, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "{} criterion {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

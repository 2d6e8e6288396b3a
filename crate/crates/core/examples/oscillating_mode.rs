//! Broad packet, two parameter sets: reconstruction after one Bloch period,
//! and a slow occupation beat fitted at multiples of T1.

use bloch_zener::scenario::{run_oscillating_mode, ModeOptions, PacketBand};
use bloch_zener::{LatticeWindow, ModelParams};

fn main() -> bloch_zener::Result<()> {
    let w = LatticeWindow::default();

    let p = ModelParams::new(6.734, 80.0, 1.0);
    let r = run_oscillating_mode(&p, &w, 2.0 * p.bloch_time(), &ModeOptions::default())?;
    let recon = r.reconstruction.as_ref().expect("commensurate");
    println!("delta = 6.734: r/s = {:?}, fidelity at T_BZ = {:.8}", recon.rational, recon.fidelity.unwrap_or(0.0));
    let half = r.occupations.iter().min_by(|a, b| (a.t - 0.5 * p.bloch_time()).abs().total_cmp(&(b.t - 0.5 * p.bloch_time()).abs()));
    if let Some(o) = half {
        println!("  populations at T_B/2: p0 = {:.4}, p1 = {:.4}", o.p0, o.p1);
    }

    let p = ModelParams::new(17.19, 80.0, 1.0);
    let opts = ModeOptions {
        packet_band: PacketBand::Lower,
        occupations: false,
        ..ModeOptions::default()
    };
    let r = run_oscillating_mode(&p, &w, 28.0 * p.bloch_time(), &opts)?;
    if let Some(f) = &r.fit {
        println!(
            "delta = 17.19: p0(n T1) = {:.4} + {:.4} cos({:.5} n + {:.1e}), residual {:.1e}",
            f.x, f.y, f.omega, f.phi, f.residual
        );
    }
    for o in r.stroboscopic.iter().step_by(8) {
        println!("  t = {:>8.3}  p0 = {:.5}", o.t, o.p0);
    }
    Ok(())
}

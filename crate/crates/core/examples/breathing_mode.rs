//! Single-site start: the packet width breathes at the Bloch frequency and
//! at the interband beat.

use bloch_zener::scenario::{run_breathing_mode, ModeOptions};
use bloch_zener::{LatticeWindow, ModelParams};

fn main() -> bloch_zener::Result<()> {
    let p = ModelParams::new(6.734, 80.0, 1.0);
    let tb = p.bloch_time();
    let r = run_breathing_mode(&p, &LatticeWindow::default(), 8.0 * tb, &ModeOptions::default())?;
    let max = r.widths.iter().copied().fold(0.0, f64::max);
    println!("largest rms width {max:.2} sites");
    for (f, a) in &r.width_peaks {
        println!("width spectrum peak at {:.4} = {:.3} / T_B, amplitude {a:.3}", f, f * tb);
    }
    Ok(())
}

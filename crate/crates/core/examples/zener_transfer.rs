//! Interband transfer of a lower-band packet after half a Bloch period,
//! against the Landau-Zener formula.

use rayon::prelude::*;

use bloch_zener::scenario::{zener_transfer, ModeOptions, PacketBand};
use bloch_zener::{LatticeWindow, ModelParams};

fn main() -> bloch_zener::Result<()> {
    let w = LatticeWindow::default();
    let opts = ModeOptions {
        packet_band: PacketBand::Lower,
        ..ModeOptions::default()
    };
    let rows = (1..=7)
        .into_par_iter()
        .map(|k| zener_transfer(&ModelParams::new(2.0 * k as f64, 80.0, 1.0), &w, None, &opts))
        .collect::<bloch_zener::Result<Vec<_>>>()?;
    println!("{:>6} {:>10} {:>10} {:>8}", "delta", "numeric", "LZ", "rel");
    for r in rows {
        let rel = (r.transferred - r.lz_prediction) / r.lz_prediction;
        println!("{:>6} {:>10.6} {:>10.6} {:>+8.4}", r.params.delta, r.transferred, r.lz_prediction, rel);
    }
    Ok(())
}

//! Reverse the force half-way through a Bloch period: the two band
//! components run apart and are counted in two windows.

use bloch_zener::scenario::{run_beam_splitter, BeamSplitterOptions};
use bloch_zener::{LatticeWindow, ModelParams};

fn main() -> bloch_zener::Result<()> {
    let p = ModelParams::new(6.734, 80.0, 1.0);
    let r = run_beam_splitter(&p, &LatticeWindow::default(), &BeamSplitterOptions::default())?;
    let b = r.beam_splitter.expect("summary");
    println!("flip at {:.4}, measured at {:.4}", b.flip_time, b.measure_time);
    println!("left  {:?}: {:.5}", b.left_window, b.pop_left);
    println!("right {:?}: {:.5}", b.right_window, b.pop_right);
    println!("outside {:.2e}", b.out_of_window);
    println!("left fraction {:.5}, Landau-Zener {:.5}", b.left_fraction, b.lz_prediction);
    Ok(())
}

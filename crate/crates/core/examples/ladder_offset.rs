//! Offset of the two Wannier-Stark ladders, by diagonalising a finite
//! chain and from the one-period monodromy, next to the two closed-form
//! limits, all folded into (-|dF|, |dF|].

use bloch_zener::spectrum::{fold_offset, offset_approx_bessel, offset_approx_elliptic, Engine};
use bloch_zener::{LatticeWindow, ModelParams};

fn main() -> bloch_zener::Result<()> {
    let diag = Engine::Diagonalization(LatticeWindow::default());
    let floquet = Engine::floquet();
    println!("{:>7} {:>6} {:>12} {:>12} {:>10} {:>10}", "delta", "Delta", "diag", "floquet", "bessel", "elliptic");
    for (delta, big) in [(0.01, 2.0), (1.0, 2.0), (6.734, 80.0), (17.19, 80.0), (40.0, 4.0)] {
        let p = ModelParams::new(delta, big, 1.0);
        let a = diag.run(&p)?;
        let b = floquet.run(&p)?;
        println!(
            "{delta:>7} {big:>6} {:>12.8} {:>12.8} {:>10.6} {:>10.6}{}",
            a.offset_e0,
            b.offset_e0,
            fold_offset(offset_approx_bessel(&p), 1.0),
            fold_offset(offset_approx_elliptic(&p), 1.0),
            if b.degenerate { "  (degenerate)" } else { "" }
        );
    }
    Ok(())
}

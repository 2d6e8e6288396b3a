//! Miniband dispersion and the interband coupling (at F d = 1) across the
//! reduced zone.
//!
//!     cargo run --example minibands -- 18 80

use bloch_zener::bands::{band_gap, sample_bands};
use bloch_zener::ModelParams;

fn main() -> bloch_zener::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let delta = args.first().copied().unwrap_or(18.0);
    let big = args.get(1).copied().unwrap_or(80.0);
    let p = ModelParams::new(delta, big, 1.0);

    let points = sample_bands(&p, 9)?;
    println!("{:>9} {:>10} {:>10} {:>10}", "kappa", "E0", "E1", "|M|");
    for b in &points {
        println!("{:>9.4} {:>10.4} {:>10.4} {:>10.4}", b.kappa, b.e0, b.e1, b.coupling.norm());
    }
    let strongest = points.iter().max_by(|a, b| a.coupling.norm().total_cmp(&b.coupling.norm())).unwrap();
    println!("gap {:.4}, coupling peaks at kappa = {:.4}", band_gap(&p), strongest.kappa);
    Ok(())
}

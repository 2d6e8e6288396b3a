//! The three propagators side by side. The quasimomentum state is written
//! to a checkpoint and read back before it is mapped onto the lattice.

use bloch_zener::propagator::{
    evolve_kappa, evolve_real_space, evolve_whittaker_hill, read_checkpoint, write_checkpoint,
};
use bloch_zener::scenario::{make_gaussian_packet, PacketBand};
use bloch_zener::{LatticeWindow, ModelParams};

fn main() -> bloch_zener::Result<()> {
    let p = ModelParams::new(1.5, 4.0, 1.0);
    let w = LatticeWindow::symmetric(128, 16)?;
    let t = 0.75 * p.bloch_time();
    let psi0 = make_gaussian_packet(8.0, 0.0, PacketBand::None, &p, &w)?;

    let real = evolve_real_space(&psi0, &p, &[t])?.states.remove(0);
    let kappa = evolve_kappa(&p, &[t], 256)?.remove(0);
    let hill = evolve_whittaker_hill(&p, &[t], 256)?.remove(0);

    let path = std::env::temp_dir().join("bloch-zener-example.bzk");
    write_checkpoint(&path, &kappa)?;
    let restored = read_checkpoint(&path)?;
    let _ = std::fs::remove_file(&path);

    let sup = |a: &bloch_zener::WavePacket, b: &bloch_zener::WavePacket| {
        a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    };
    let from_kappa = restored.apply(&psi0)?;
    let from_hill = hill.apply(&psi0)?;
    println!("t = {t:.4}, centroid {:.4}, width {:.4}", real.centroid(), real.rms_width());
    println!("real space vs kappa:          {:.2e}", sup(&real, &from_kappa));
    println!("real space vs Whittaker-Hill: {:.2e}", sup(&real, &from_hill));
    println!("kappa unitarity drift:        {:.2e}", kappa.unitarity_drift());
    Ok(())
}

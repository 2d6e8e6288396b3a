//! Tune delta so that the occupation beat is commensurate with the Bloch
//! period, then read off the reconstruction time.

use bloch_zener::scenario::{reconstruction_times, tune_delta, DEFAULT_MAX_DENOMINATOR, DEFAULT_RATIO_TOL};
use bloch_zener::spectrum::Engine;
use bloch_zener::ModelParams;

fn main() -> bloch_zener::Result<()> {
    let engine = Engine::floquet();
    for (target, bracket) in [(2.0, (5.0, 9.0)), (56.0 / 57.0, (15.0, 19.0))] {
        let tuned = tune_delta(target, 80.0, 1.0, bracket, 64, &engine)?;
        let p = ModelParams::new(tuned.delta, 80.0, 1.0);
        let r = reconstruction_times(&p, tuned.spectrum.offset_e0, DEFAULT_RATIO_TOL, DEFAULT_MAX_DENOMINATOR)?;
        let (num, den) = r.rational.unwrap_or((0, 0));
        println!(
            "T2/T1 = {target:.6}: delta = {:.6}, E0 = {:+.6}, r/s = {num}/{den}, T_BZ = {:.4} ({} T_B)",
            tuned.delta,
            tuned.spectrum.offset_e0,
            r.t_bz.unwrap_or(f64::NAN),
            r.t_bz.unwrap_or(f64::NAN) / p.bloch_time()
        );
    }
    Ok(())
}

//! Binary checkpoint of a quasimomentum state.
//!
//! Little-endian layout: the 8-byte magic, `u64` grid size `N`, `f64 t`,
//! `f64 C`, `N` quasimomenta, then `N` `(re, im)` pairs for `A` and `N`
//! for `B`. The lattice period is not stored; it is recovered from the
//! first grid point, which sits at `-pi/d`.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::kappa::KappaPropagatorState;
use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"BZKSTATE";

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_checkpoint(path: &Path, state: &KappaPropagatorState) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let mut buf = Vec::with_capacity(32 + 40 * state.kappa_grid.len());
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&(state.kappa_grid.len() as u64).to_le_bytes());
    buf.extend_from_slice(&state.t.to_le_bytes());
    buf.extend_from_slice(&state.gauge_phase.to_le_bytes());
    for k in &state.kappa_grid {
        buf.extend_from_slice(&k.to_le_bytes());
    }
    for z in state.a.iter().chain(&state.b) {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&buf).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

fn corrupt(path: &Path, what: &str) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, what.to_string()),
    }
}

pub fn read_checkpoint(path: &Path) -> Result<KappaPropagatorState> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut bytes = Vec::new();
    BufReader::new(file).read_to_end(&mut bytes).map_err(io_err(path))?;
    if bytes.len() < 32 || &bytes[..8] != CHECKPOINT_MAGIC {
        return Err(corrupt(path, "not a checkpoint file"));
    }
    let word = |i: usize| -> [u8; 8] { bytes[i..i + 8].try_into().expect("8-byte slice") };
    let n = u64::from_le_bytes(word(8)) as usize;
    let expected = n.checked_mul(40).and_then(|x| x.checked_add(32));
    if expected != Some(bytes.len()) {
        return Err(corrupt(path, "checkpoint length does not match its header"));
    }
    let f = |i: usize| f64::from_le_bytes(word(i));
    let t = f(16);
    let gauge_phase = f(24);
    let kappa_grid: Vec<f64> = (0..n).map(|j| f(32 + 8 * j)).collect();
    let base = 32 + 8 * n;
    let pair = |j: usize| Complex64::new(f(base + 16 * j), f(base + 16 * j + 8));
    let a = (0..n).map(pair).collect();
    let b = (n..2 * n).map(pair).collect();
    let d = match kappa_grid.first() {
        Some(&k0) if k0 < 0.0 => -PI / k0,
        _ => return Err(corrupt(path, "quasimomentum grid does not start at -pi/d")),
    };
    Ok(KappaPropagatorState {
        kappa_grid,
        a,
        b,
        gauge_phase,
        t,
        d,
    })
}

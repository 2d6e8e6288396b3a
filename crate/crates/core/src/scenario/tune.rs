//! Choose `delta` so that `T2/T1` hits a target ratio.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::ModelParams;
use crate::spectrum::{Engine, LadderSpectrum};

pub const DEFAULT_SCAN_POINTS: usize = 64;
pub const RATIO_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TuneResult {
    pub delta: f64,
    /// `T2/T1` at `delta`.
    pub ratio: f64,
    pub ratio_error: f64,
    pub spectrum: LadderSpectrum,
}

/// `T2/T1 = 2|dF| / |dF - 2 E0|`.
pub fn period_ratio(spectrum: &LadderSpectrum) -> f64 {
    let fd = 0.5 * spectrum.spacing;
    2.0 * fd / (fd - 2.0 * spectrum.offset_e0).abs()
}

struct Objective<'a> {
    big_delta: f64,
    fd: f64,
    target: f64,
    engine: &'a Engine,
}

impl Objective<'_> {
    fn spectrum(&self, delta: f64) -> Result<LadderSpectrum> {
        self.engine.run(&ModelParams::new(delta, self.big_delta, self.fd))
    }

    fn signed(&self, delta: f64) -> Result<f64> {
        Ok(period_ratio(&self.spectrum(delta)?) - self.target)
    }
}

/// Shrink a sign-changing bracket; returns the endpoint with the smaller
/// mismatch, which matters when the sign change is a jump.
fn bisect(obj: &Objective, mut lo: f64, mut hi: f64, mut g_lo: f64, mut g_hi: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g = obj.signed(mid)?;
        if g == 0.0 {
            return Ok(mid);
        }
        if (g < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
            g_hi = g;
        }
    }
    Ok(if g_lo.abs() <= g_hi.abs() { lo } else { hi })
}

fn golden_min(obj: &Objective, mut a: f64, mut b: f64) -> Result<f64> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = obj.signed(c)?.abs();
    let mut fd = obj.signed(d)?.abs();
    for _ in 0..120 {
        if (b - a).abs() <= 1e-13 * (a.abs() + b.abs()).max(1.0) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = obj.signed(c)?.abs();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = obj.signed(d)?.abs();
        }
    }
    Ok(if fc < fd { c } else { d })
}

/// Find `delta` in `bracket` with `|T2/T1 - target| <= 1e-4`.
///
/// The bracket is scanned on `scan_points` nodes; sign changes are refined
/// by bisection and local minima of the mismatch by golden-section search.
/// Among acceptable candidates the one with the smallest mismatch wins.
pub fn tune_delta(
    target_ratio: f64,
    big_delta: f64,
    fd: f64,
    bracket: (f64, f64),
    scan_points: usize,
    engine: &Engine,
) -> Result<TuneResult> {
    let (lo, hi) = bracket;
    if !(target_ratio.is_finite() && target_ratio > 0.0) {
        return Err(Error::InvalidParams {
            field: "target_ratio",
            reason: format!("must be positive, got {target_ratio}"),
        });
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParams {
            field: "bracket",
            reason: format!("need lo < hi, got [{lo}, {hi}]"),
        });
    }
    if fd == 0.0 {
        return Err(Error::ZeroForce);
    }
    let obj = Objective {
        big_delta,
        fd,
        target: target_ratio,
        engine,
    };
    let m = scan_points.max(3);
    let nodes: Vec<f64> = (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect();
    let values = nodes.iter().map(|&x| obj.signed(x)).collect::<Result<Vec<_>>>()?;

    let mut candidates = Vec::new();
    for i in 0..m {
        if values[i] == 0.0 {
            candidates.push(nodes[i]);
        }
        if i + 1 < m && values[i] * values[i + 1] < 0.0 {
            candidates.push(bisect(&obj, nodes[i], nodes[i + 1], values[i], values[i + 1])?);
        }
        if i > 0 && i + 1 < m && values[i].abs() <= values[i - 1].abs() && values[i].abs() <= values[i + 1].abs() {
            candidates.push(golden_min(&obj, nodes[i - 1], nodes[i + 1])?);
        }
    }
    let mut best: Option<TuneResult> = None;
    for delta in candidates {
        let spectrum = obj.spectrum(delta)?;
        let ratio = period_ratio(&spectrum);
        let ratio_error = (ratio - target_ratio).abs();
        if ratio_error <= RATIO_TOL && best.as_ref().is_none_or(|b| ratio_error < b.ratio_error) {
            best = Some(TuneResult {
                delta,
                ratio,
                ratio_error,
                spectrum,
            });
        }
    }
    let best = best.ok_or_else(|| Error::NoRoot {
        lo,
        hi,
        reason: format!("T2/T1 never comes within {RATIO_TOL:e} of {target_ratio}"),
    })?;
    if best.spectrum.degenerate {
        return Err(Error::DegenerateLadder {
            a: best.spectrum.offset_e0,
            b: best.spectrum.partner,
            tol: crate::spectrum::DEGENERACY_TOL * fd.abs(),
        });
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_band_root_at_fold() {
        // Delta = 0: E0 = delta/2 folded; ratio 2 needs E0 = 0 or E0 = dF
        let r = tune_delta(2.0, 0.0, 1.0, (1.0, 3.0), 16, &Engine::floquet()).unwrap();
        assert!((r.delta - 2.0).abs() < 1e-6, "{}", r.delta);
    }

    #[test]
    fn reports_missing_root() {
        let r = tune_delta(10.0, 0.0, 1.0, (0.2, 0.4), 8, &Engine::floquet());
        assert!(matches!(r, Err(Error::NoRoot { .. })));
    }
}

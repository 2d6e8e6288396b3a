//! Ladder offsets from direct diagonalisation of the truncated lattice.

use nalgebra::{DVector, SymmetricEigen};

use super::{circular_distance, fold_offset, label_ladders, LadderSpectrum, Method};
use crate::error::{Error, Result};
use crate::lattice::{build_hamiltonian, LatticeWindow, ModelParams};

const MIN_INTERIOR: usize = 20;
const GUARD_WEIGHT_LIMIT: f64 = 1e-12;
/// Largest tolerated intra-cluster spread, in units of `|dF|`.
const CLUSTER_SPREAD_LIMIT: f64 = 1e-4;

/// Eigenstate of the truncated Hamiltonian that does not feel the walls.
#[derive(Debug, Clone)]
pub struct InteriorState {
    pub energy: f64,
    /// Real eigenvector over the window, unit norm.
    pub vector: DVector<f64>,
    pub centroid: f64,
}

/// Eigenstates with centroid at least `guard` sites from each edge and
/// negligible weight inside the guard bands, sorted by energy.
pub fn interior_eigenstates(params: &ModelParams, window: &LatticeWindow) -> Result<Vec<InteriorState>> {
    let h = build_hamiltonian(params, window)?.dense();
    let eig = SymmetricEigen::new(h);
    let guard = window.guard as f64;
    let lo = window.n_min as f64 + guard;
    let hi = window.n_max as f64 - guard;
    let mut states: Vec<InteriorState> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .filter_map(|(&energy, col)| {
            let mut centroid = 0.0;
            let mut guard_weight = 0.0;
            for (i, a) in col.iter().enumerate() {
                let n = window.site(i);
                let w = a * a;
                centroid += n as f64 * w;
                if window.in_guard_band(n) {
                    guard_weight += w;
                }
            }
            (centroid >= lo && centroid <= hi && guard_weight <= GUARD_WEIGHT_LIMIT).then(|| InteriorState {
                energy,
                vector: col.into_owned(),
                centroid,
            })
        })
        .collect();
    states.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(states)
}

/// Split folded values into two groups at the two widest gaps on the circle.
/// Returns `None` when everything sits in a single cluster.
fn two_clusters(folded: &[f64], fd: f64) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut order: Vec<usize> = (0..folded.len()).collect();
    order.sort_by(|&a, &b| folded[a].total_cmp(&folded[b]));
    let n = order.len();
    let mut gaps: Vec<(f64, usize)> = (0..n)
        .map(|k| {
            let a = folded[order[k]];
            let b = folded[order[(k + 1) % n]];
            let g = if k + 1 == n { b + 2.0 * fd - a } else { b - a };
            (g, k)
        })
        .collect();
    gaps.sort_by(|x, y| y.0.total_cmp(&x.0));
    if gaps[1].0 < CLUSTER_SPREAD_LIMIT * fd {
        return None;
    }
    let (k1, k2) = (gaps[0].1.min(gaps[1].1), gaps[0].1.max(gaps[1].1));
    let inner: Vec<usize> = order[k1 + 1..=k2].to_vec();
    let outer: Vec<usize> = order[..=k1].iter().chain(&order[k2 + 1..]).copied().collect();
    Some((inner, outer))
}

/// Circular mean and maximal deviation of a cluster.
fn center_and_spread(values: &[f64], fd: f64) -> (f64, f64) {
    let anchor = values[0];
    let wrap = |x: f64| ((x - anchor) + fd).rem_euclid(2.0 * fd) - fd;
    let mean_shift = values.iter().map(|&x| wrap(x)).sum::<f64>() / values.len() as f64;
    let center = fold_offset(anchor + mean_shift, fd);
    let spread = values
        .iter()
        .map(|&x| circular_distance(x, center, fd))
        .fold(0.0, f64::max);
    (center, spread)
}

/// Ladder offset from the interior eigenvalues of the truncated lattice.
pub fn ladder_offset_diag(params: &ModelParams, window: &LatticeWindow) -> Result<LadderSpectrum> {
    if params.force == 0.0 {
        return Err(Error::ZeroForce);
    }
    let states = interior_eigenstates(params, window)?;
    if states.len() < MIN_INTERIOR {
        return Err(Error::TooFewInteriorStates {
            found: states.len(),
            needed: MIN_INTERIOR,
        });
    }
    let fd = params.fd().abs();
    let energies: Vec<f64> = states.iter().map(|s| s.energy).collect();
    let folded: Vec<f64> = energies.iter().map(|&e| fold_offset(e, fd)).collect();

    let (groups, spread) = match two_clusters(&folded, fd) {
        Some((g0, g1)) => {
            let v0: Vec<f64> = g0.iter().map(|&i| folded[i]).collect();
            let v1: Vec<f64> = g1.iter().map(|&i| folded[i]).collect();
            let (c0, s0) = center_and_spread(&v0, fd);
            let (c1, s1) = center_and_spread(&v1, fd);
            ([(c0, g0), (c1, g1)], s0.max(s1))
        }
        None => {
            let (c, s) = center_and_spread(&folded, fd);
            let all: Vec<usize> = (0..folded.len()).collect();
            ([(c, all), (fold_offset(fd - c, fd), Vec::new())], s)
        }
    };
    if spread > CLUSTER_SPREAD_LIMIT * fd {
        return Err(Error::ClusterFailure(format!(
            "intra-cluster spread {spread:e} exceeds {:e}",
            CLUSTER_SPREAD_LIMIT * fd
        )));
    }
    let [(ca, ga), (cb, gb)] = groups;
    let (e0, partner, degenerate) = label_ladders(ca, cb, params);
    let (g0, g1) = if e0 == ca { (ga, gb) } else { (gb, ga) };
    let pick = |g: &[usize]| -> Vec<f64> { g.iter().map(|&i| energies[i]).collect::<Vec<_>>() };
    let mut l0 = pick(&g0);
    let mut l1 = pick(&g1);
    l0.sort_by(f64::total_cmp);
    l1.sort_by(f64::total_cmp);
    let f = params.force.abs();
    Ok(LadderSpectrum {
        params: *params,
        offset_e0: e0,
        partner,
        spacing: 2.0 * fd,
        exponents: (e0 / f, partner / f),
        eigenvalues: [l0, l1],
        method: Method::Diagonalization,
        degenerate,
        error_estimate: spread,
    })
}

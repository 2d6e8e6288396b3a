//! Period-doubled tight-binding model under a static force.
//!
//! The site basis `|n>` is truncated to a finite [`LatticeWindow`] with hard
//! walls. On that window the Hamiltonian is
//!
//! ```text
//! H = -(Delta/4) sum_n (|n><n+1| + |n><n-1|) + (delta/2) sum_n (-1)^n |n><n| + F d sum_n n |n><n|
//! ```
//!
//! together with the operators used by the spectral and dynamical analysis:
//! translations `T_m`, the parity-like map `X`, the gauge flip `G`
//! (realised as `delta -> -delta`), and the shift algebra `K`, `K^dagger`,
//! `N`, `L = (-1)^N`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of the model. `gamma` is derived from `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Miniband gap at the zone edge.
    pub delta: f64,
    /// Width of the unperturbed band.
    #[serde(rename = "Delta")]
    pub big_delta: f64,
    /// Static force.
    #[serde(rename = "F")]
    pub force: f64,
    /// Lattice period.
    pub d: f64,
    pub hbar: f64,
}

impl ModelParams {
    /// Reduced units, `d = hbar = 1`.
    pub fn new(delta: f64, big_delta: f64, force: f64) -> Self {
        ModelParams {
            delta,
            big_delta,
            force,
            d: 1.0,
            hbar: 1.0,
        }
    }

    pub fn with_lattice_period(mut self, d: f64) -> Self {
        self.d = d;
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_force(mut self, force: f64) -> Self {
        self.force = force;
        self
    }

    /// `sgn(delta)`, with `+1` at `delta = 0`.
    pub fn gamma(&self) -> f64 {
        if self.delta < 0.0 {
            -1.0
        } else {
            1.0
        }
    }

    /// Energy drop per lattice site, `F d`.
    pub fn fd(&self) -> f64 {
        self.force * self.d
    }

    /// Single-band Bloch time `2 pi hbar / |F d|`.
    pub fn bloch_time(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar / self.fd().abs()
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("delta", self.delta),
            ("Delta", self.big_delta),
            ("F", self.force),
            ("d", self.d),
            ("hbar", self.hbar),
        ];
        for (field, value) in finite {
            if !value.is_finite() {
                return Err(Error::InvalidParams {
                    field,
                    reason: format!("must be finite, got {value}"),
                });
            }
        }
        if self.d <= 0.0 {
            return Err(Error::InvalidParams {
                field: "d",
                reason: format!("must be positive, got {}", self.d),
            });
        }
        if self.hbar <= 0.0 {
            return Err(Error::InvalidParams {
                field: "hbar",
                reason: format!("must be positive, got {}", self.hbar),
            });
        }
        Ok(())
    }

    /// Same model with the sign of the gap flipped; the action of `G`.
    pub fn gauge_flipped(&self) -> Self {
        ModelParams {
            delta: -self.delta,
            ..*self
        }
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams::new(0.0, 0.0, 0.0)
    }
}

/// Finite range of site indices `n_min..=n_max`, with a guard band of
/// `guard` sites at each edge that physics assertions stay away from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeWindow {
    pub n_min: i64,
    pub n_max: i64,
    pub guard: usize,
}

impl LatticeWindow {
    pub const DEFAULT_HALF_WIDTH: i64 = 256;
    pub const DEFAULT_GUARD: usize = 32;

    pub fn new(n_min: i64, n_max: i64, guard: usize) -> Result<Self> {
        if n_max <= n_min {
            return Err(Error::InvalidWindow(format!(
                "n_min = {n_min} must be below n_max = {n_max}"
            )));
        }
        let sites = (n_max - n_min + 1) as usize;
        if sites < 3 {
            return Err(Error::WindowTooSmall { sites });
        }
        if 2 * guard >= (n_max - n_min) as usize {
            return Err(Error::InvalidWindow(format!(
                "guard {guard} must be below half the window width {}",
                (n_max - n_min) as f64 / 2.0
            )));
        }
        Ok(LatticeWindow { n_min, n_max, guard })
    }

    /// `[-half, half]`.
    pub fn symmetric(half: i64, guard: usize) -> Result<Self> {
        Self::new(-half, half, guard)
    }

    pub fn len(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> + Clone {
        self.n_min..=self.n_max
    }

    pub fn contains(&self, n: i64) -> bool {
        n >= self.n_min && n <= self.n_max
    }

    pub fn index(&self, n: i64) -> Option<usize> {
        self.contains(n).then(|| (n - self.n_min) as usize)
    }

    pub fn site(&self, index: usize) -> i64 {
        self.n_min + index as i64
    }

    /// Site lies at least `guard` sites away from both edges.
    pub fn is_interior(&self, n: i64) -> bool {
        n - self.n_min >= self.guard as i64 && self.n_max - n >= self.guard as i64
    }

    pub fn in_guard_band(&self, n: i64) -> bool {
        self.contains(n) && !self.is_interior(n)
    }

    pub fn is_symmetric(&self) -> bool {
        self.n_min == -self.n_max
    }
}

impl Default for LatticeWindow {
    fn default() -> Self {
        LatticeWindow {
            n_min: -Self::DEFAULT_HALF_WIDTH,
            n_max: Self::DEFAULT_HALF_WIDTH,
            guard: Self::DEFAULT_GUARD,
        }
    }
}

/// Complex amplitude per site of a window.
#[derive(Debug, Clone, PartialEq)]
pub struct WavePacket {
    window: LatticeWindow,
    amplitudes: Vec<Complex64>,
}

impl WavePacket {
    /// Normalised packet. Fails on a length mismatch or a zero vector.
    pub fn new(window: LatticeWindow, amplitudes: Vec<Complex64>) -> Result<Self> {
        let mut packet = Self::from_raw(window, amplitudes)?;
        let norm = packet.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::WindowOverflow(
                "wave packet has zero or non-finite norm inside the window".into(),
            ));
        }
        packet.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(packet)
    }

    /// Amplitudes taken as given, without normalisation.
    pub fn from_raw(window: LatticeWindow, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != window.len() {
            return Err(Error::InvalidWindow(format!(
                "{} amplitudes for a window of {} sites",
                amplitudes.len(),
                window.len()
            )));
        }
        Ok(WavePacket { window, amplitudes })
    }

    /// `|site>`.
    pub fn delta_peak(window: LatticeWindow, site: i64) -> Result<Self> {
        let idx = window.index(site).ok_or_else(|| {
            Error::WindowOverflow(format!("site {site} outside [{}, {}]", window.n_min, window.n_max))
        })?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); window.len()];
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(WavePacket { window, amplitudes })
    }

    pub fn window(&self) -> &LatticeWindow {
        &self.window
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Amplitude at site `n`, zero outside the window.
    pub fn amplitude(&self, n: i64) -> Complex64 {
        self.window
            .index(n)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`; both packets must live on the same window.
    pub fn overlap(&self, other: &WavePacket) -> Complex64 {
        debug_assert_eq!(self.window, other.window);
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Probability-weighted mean site index.
    pub fn centroid(&self) -> f64 {
        let norm = self.norm_sqr();
        self.window
            .sites()
            .zip(&self.amplitudes)
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum::<f64>()
            / norm
    }

    /// Root-mean-square displacement about the centroid.
    pub fn rms_width(&self) -> f64 {
        let norm = self.norm_sqr();
        let c = self.centroid();
        let var = self
            .window
            .sites()
            .zip(&self.amplitudes)
            .map(|(n, a)| (n as f64 - c).powi(2) * a.norm_sqr())
            .sum::<f64>()
            / norm;
        var.sqrt()
    }

    /// Probability inside the guard bands.
    pub fn guard_weight(&self) -> f64 {
        self.window
            .sites()
            .zip(&self.amplitudes)
            .filter(|(n, _)| self.window.in_guard_band(*n))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Probability on sites `lo..=hi` (clipped to the window).
    pub fn weight_in(&self, lo: i64, hi: i64) -> f64 {
        self.window
            .sites()
            .zip(&self.amplitudes)
            .filter(|(n, _)| *n >= lo && *n <= hi)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub(crate) fn map_sites(&self, f: impl Fn(i64, Complex64) -> Complex64) -> WavePacket {
        let amplitudes = self
            .window
            .sites()
            .zip(&self.amplitudes)
            .map(|(n, a)| f(n, *a))
            .collect();
        WavePacket {
            window: self.window,
            amplitudes,
        }
    }
}

/// Tridiagonal site-basis Hamiltonian on a window.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    window: LatticeWindow,
    diagonal: Vec<f64>,
    hopping: f64,
}

impl Hamiltonian {
    pub fn window(&self) -> &LatticeWindow {
        &self.window
    }

    /// On-site energies `(delta/2)(-1)^n + F d n`.
    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    /// Nearest-neighbour element `-Delta/4`.
    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.diagonal.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.diagonal[i]
            } else if i.abs_diff(j) == 1 {
                self.hopping
            } else {
                0.0
            }
        })
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let n = self.diagonal.len();
        (0..n)
            .map(|i| {
                let mut acc = psi[i] * self.diagonal[i];
                if i > 0 {
                    acc += psi[i - 1] * self.hopping;
                }
                if i + 1 < n {
                    acc += psi[i + 1] * self.hopping;
                }
                acc
            })
            .collect()
    }

    /// `<psi|H|psi> / <psi|psi>`.
    pub fn expectation(&self, psi: &WavePacket) -> f64 {
        let h_psi = self.apply(psi.amplitudes());
        let num: Complex64 = psi
            .amplitudes()
            .iter()
            .zip(&h_psi)
            .map(|(a, b)| a.conj() * b)
            .sum();
        num.re / psi.norm_sqr()
    }

    /// `|| H psi - E psi ||`.
    pub fn residual(&self, psi: &[Complex64], energy: f64) -> f64 {
        self.apply(psi)
            .iter()
            .zip(psi)
            .map(|(hp, p)| (hp - p * energy).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

fn alternating(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn build_hamiltonian(params: &ModelParams, window: &LatticeWindow) -> Result<Hamiltonian> {
    params.validate()?;
    if window.len() < 3 {
        return Err(Error::WindowTooSmall { sites: window.len() });
    }
    let fd = params.fd();
    let diagonal = window
        .sites()
        .map(|n| 0.5 * params.delta * alternating(n) + fd * n as f64)
        .collect();
    Ok(Hamiltonian {
        window: *window,
        diagonal,
        hopping: -0.25 * params.big_delta,
    })
}

/// Result of a translation: the moved packet and the probability that fell
/// off the window.
#[derive(Debug, Clone)]
pub struct Translated {
    pub packet: WavePacket,
    pub lost: f64,
}

/// `T_m`, mapping `|n>` to `|n - m>`. Amplitude pushed outside the window is
/// dropped and reported in [`Translated::lost`].
pub fn apply_translation(m: i64, psi: &WavePacket) -> Translated {
    let window = *psi.window();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); window.len()];
    let mut lost = 0.0;
    for (n, a) in window.sites().zip(psi.amplitudes()) {
        match window.index(n - m) {
            Some(i) => amplitudes[i] = *a,
            None => lost += a.norm_sqr(),
        }
    }
    Translated {
        packet: WavePacket { window, amplitudes },
        lost,
    }
}

/// `G`: the state is untouched, every later term sees `delta -> -delta`.
pub fn apply_gauge_flip(psi: &WavePacket, params: &ModelParams) -> (WavePacket, ModelParams) {
    (psi.clone(), params.gauge_flipped())
}

/// `X`, mapping `psi_n` to `(-1)^n psi_n` at site `-n`.
pub fn apply_parity_x(psi: &WavePacket) -> Result<WavePacket> {
    let window = *psi.window();
    if !window.is_symmetric() {
        return Err(Error::AsymmetricWindow {
            n_min: window.n_min,
            n_max: window.n_max,
        });
    }
    let len = window.len();
    let amplitudes = (0..len)
        .map(|i| {
            let n = window.site(i);
            // source site is -n, sign (-1)^(-n) = (-1)^n
            psi.amplitude(-n) * alternating(n)
        })
        .collect();
    Ok(WavePacket { window, amplitudes })
}

/// Shift algebra on a truncated window. Amplitudes beyond the edges are
/// treated as zero, so identities hold exactly only for states supported
/// away from the edges.
pub mod shift {
    use super::*;

    /// `K = sum |n-1><n|`: `(K psi)_n = psi_{n+1}`.
    pub fn k(psi: &WavePacket) -> WavePacket {
        psi.map_sites(|n, _| psi.amplitude(n + 1))
    }

    /// `K^dagger = sum |n+1><n|`: `(K^dagger psi)_n = psi_{n-1}`.
    pub fn k_dag(psi: &WavePacket) -> WavePacket {
        psi.map_sites(|n, _| psi.amplitude(n - 1))
    }

    /// `N = sum n |n><n|`.
    pub fn number(psi: &WavePacket) -> WavePacket {
        psi.map_sites(|n, a| a * n as f64)
    }

    /// `L = (-1)^N`.
    pub fn parity(psi: &WavePacket) -> WavePacket {
        psi.map_sites(|n, a| a * alternating(n))
    }

    pub fn sub(a: &WavePacket, b: &WavePacket) -> WavePacket {
        a.map_sites(|n, x| x - b.amplitude(n))
    }

    pub fn scale(a: &WavePacket, s: f64) -> WavePacket {
        a.map_sites(|_, x| x * s)
    }

    pub fn distance(a: &WavePacket, b: &WavePacket) -> f64 {
        sub(a, b).norm_sqr().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn diagonal_hamiltonian_without_hopping() {
        let params = ModelParams::new(2.0, 0.0, 1.0);
        let window = LatticeWindow::new(-1, 1, 0).unwrap();
        let h = build_hamiltonian(&params, &window).unwrap().dense();
        assert_eq!(h[(0, 0)], -2.0);
        assert_eq!(h[(1, 1)], 1.0);
        assert_eq!(h[(2, 2)], 0.0);
        assert_eq!(h[(0, 1)], 0.0);
    }

    #[test]
    fn hamiltonian_is_exactly_symmetric() {
        let params = ModelParams::new(6.734, 80.0, 1.0);
        let window = LatticeWindow::symmetric(20, 2).unwrap();
        let h = build_hamiltonian(&params, &window).unwrap().dense();
        assert_eq!(h, h.transpose());
        assert_eq!(h[(3, 4)], -20.0);
        assert_eq!(h[(0, 2)], 0.0);
    }

    #[test]
    fn rejects_small_windows() {
        assert!(matches!(
            LatticeWindow::new(0, 1, 0),
            Err(Error::WindowTooSmall { sites: 2 })
        ));
        assert!(LatticeWindow::new(3, 1, 0).is_err());
        assert!(LatticeWindow::new(-4, 4, 4).is_err());
    }

    #[test]
    fn field_free_single_band_stays_inside_cosine_band() {
        let params = ModelParams::new(0.0, 4.0, 0.0);
        let window = LatticeWindow::symmetric(60, 2).unwrap();
        let h = build_hamiltonian(&params, &window).unwrap().dense();
        let eig = SymmetricEigen::new(h);
        for e in eig.eigenvalues.iter() {
            assert!(e.abs() <= 2.0 + 1e-12, "{e}");
        }
    }

    #[test]
    fn translation_moves_peaks() {
        let window = LatticeWindow::symmetric(5, 1).unwrap();
        let psi = WavePacket::delta_peak(window, 0).unwrap();
        let same = apply_translation(0, &psi);
        assert_eq!(same.packet, psi);
        let moved = apply_translation(2, &psi);
        assert_eq!(moved.packet.amplitude(-2), c(1.0));
        assert_eq!(moved.lost, 0.0);
        let off = apply_translation(9, &psi);
        assert_eq!(off.lost, 1.0);
    }

    #[test]
    fn gauge_flip_is_an_involution() {
        let window = LatticeWindow::symmetric(3, 0).unwrap();
        let psi = WavePacket::delta_peak(window, 1).unwrap();
        let params = ModelParams::new(6.734, 80.0, 1.0);
        let (psi1, p1) = apply_gauge_flip(&psi, &params);
        assert_eq!(p1.delta, -6.734);
        assert_eq!(psi1, psi);
        let (_, p2) = apply_gauge_flip(&psi1, &p1);
        assert_eq!(p2, params);
    }

    #[test]
    fn parity_x_on_peaks() {
        let window = LatticeWindow::symmetric(3, 0).unwrap();
        let at0 = WavePacket::delta_peak(window, 0).unwrap();
        assert_eq!(apply_parity_x(&at0).unwrap(), at0);
        let at1 = WavePacket::delta_peak(window, 1).unwrap();
        let x = apply_parity_x(&at1).unwrap();
        assert_eq!(x.amplitude(-1), c(-1.0));
        assert_eq!(x.norm_sqr(), 1.0);
        let lopsided = LatticeWindow::new(-2, 3, 0).unwrap();
        assert!(apply_parity_x(&WavePacket::delta_peak(lopsided, 0).unwrap()).is_err());
    }

    #[test]
    fn gamma_convention() {
        assert_eq!(ModelParams::new(0.0, 1.0, 1.0).gamma(), 1.0);
        assert_eq!(ModelParams::new(-0.1, 1.0, 1.0).gamma(), -1.0);
    }

    #[test]
    fn packet_constructor_normalises() {
        let window = LatticeWindow::symmetric(2, 0).unwrap();
        let psi = WavePacket::new(window, vec![c(1.0), c(2.0), c(3.0), c(0.0), c(-1.0)]).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(WavePacket::new(window, vec![c(0.0); 5]).is_err());
        assert!(WavePacket::new(window, vec![c(1.0); 4]).is_err());
    }
}

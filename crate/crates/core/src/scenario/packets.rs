use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bands::Band;
use crate::error::{Error, Result};
use crate::lattice::{LatticeWindow, ModelParams, WavePacket};
use crate::propagator::project_band;

/// Quadrature nodes used when projecting a packet onto a miniband.
pub const PROJECTION_NODES: usize = 4096;
/// Largest guard-band probability a freshly built packet may have.
pub const PACKET_GUARD_LIMIT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PacketBand {
    #[default]
    None,
    Lower,
    Upper,
}

impl PacketBand {
    /// Band index of the requested miniband; band 0 lies below band 1 only
    /// for `delta >= 0`.
    pub fn band(self, params: &ModelParams) -> Option<Band> {
        let (lower, upper) = if params.gamma() > 0.0 {
            (Band::Zero, Band::One)
        } else {
            (Band::One, Band::Zero)
        };
        match self {
            PacketBand::None => None,
            PacketBand::Lower => Some(lower),
            PacketBand::Upper => Some(upper),
        }
    }
}

/// Amplitudes `exp(-(n - center)^2 / width^2)`, optionally projected onto a
/// miniband. A width of zero gives the single-site state `|center>`.
pub fn make_gaussian_packet(
    width: f64,
    center: f64,
    band: PacketBand,
    params: &ModelParams,
    window: &LatticeWindow,
) -> Result<WavePacket> {
    if !(width.is_finite() && width >= 0.0 && center.is_finite()) {
        return Err(Error::InvalidParams {
            field: "width",
            reason: format!("need finite width >= 0 and finite center, got {width}, {center}"),
        });
    }
    let packet = if width == 0.0 {
        let site = center.round() as i64;
        if !window.contains(site) {
            return Err(Error::WindowOverflow(format!("site {site} outside the window")));
        }
        WavePacket::delta_peak(*window, site)?
    } else {
        let amps: Vec<Complex64> = window
            .sites()
            .map(|n| Complex64::new((-((n as f64 - center) / width).powi(2)).exp(), 0.0))
            .collect();
        if amps.iter().all(|a| a.re == 0.0) {
            return Err(Error::WindowOverflow(format!("packet centred at {center} misses the window")));
        }
        WavePacket::new(*window, amps)?
    };
    let packet = match band.band(params) {
        Some(b) => project_band(&packet, b, params, PROJECTION_NODES)?,
        None => packet,
    };
    let guard = packet.guard_weight();
    if guard > PACKET_GUARD_LIMIT {
        return Err(Error::WindowOverflow(format!(
            "initial packet has {guard:e} of its weight in the guard band"
        )));
    }
    Ok(packet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::band_occupations;

    #[test]
    fn plain_gaussian() {
        let w = LatticeWindow::default();
        let p = ModelParams::new(6.734, 80.0, 1.0);
        let psi = make_gaussian_packet(10.0, 0.0, PacketBand::None, &p, &w).unwrap();
        let ratio = psi.amplitude(10).re / psi.amplitude(0).re;
        assert!((ratio - (-1.0f64).exp()).abs() < 1e-14);
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn projected_gaussian_is_single_band() {
        let w = LatticeWindow::default();
        let p = ModelParams::new(6.734, 80.0, 1.0);
        let psi = make_gaussian_packet(10.0, 0.0, PacketBand::Lower, &p, &w).unwrap();
        let occ = band_occupations(&psi, &p, 256).unwrap();
        assert!((occ.p0 - 1.0).abs() < 1e-6);
        let psi = make_gaussian_packet(10.0, 0.0, PacketBand::Upper, &p, &w).unwrap();
        let occ = band_occupations(&psi, &p, 256).unwrap();
        assert!((occ.p1 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_width_is_single_site() {
        let w = LatticeWindow::symmetric(20, 2).unwrap();
        let psi = make_gaussian_packet(0.0, 3.0, PacketBand::None, &ModelParams::default(), &w).unwrap();
        assert_eq!(psi.amplitude(3), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn overflow() {
        let w = LatticeWindow::symmetric(40, 8).unwrap();
        let r = make_gaussian_packet(10.0, 30.0, PacketBand::None, &ModelParams::default(), &w);
        assert!(matches!(r, Err(Error::WindowOverflow(_))));
    }
}

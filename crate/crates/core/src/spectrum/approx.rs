//! Closed-form limits of the ladder offset.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::lattice::ModelParams;

/// Offset with the interband coupling dropped,
/// `(gamma/pi) * int_0^{pi/2} sqrt(delta^2 + Delta^2 cos^2 y) dy`.
///
/// Meant for `|delta| >> |Delta|`, but evaluated for any input.
pub fn offset_approx_elliptic(params: &ModelParams) -> f64 {
    let (a, b) = (params.delta.abs(), params.big_delta.abs());
    let scale = a.max(b);
    if scale == 0.0 {
        return 0.0;
    }
    if b == 0.0 {
        return 0.5 * params.gamma() * a;
    }
    let integrand = |y: f64| a.hypot(b * y.cos());
    let out = quadrature::double_exponential::integrate(integrand, 0.0, FRAC_PI_2, 1e-13 * scale);
    params.gamma() * out.integral / PI
}

/// Weak-gap offset `(delta/2) J0(Delta / Fd)`.
pub fn offset_approx_bessel(params: &ModelParams) -> f64 {
    0.5 * params.delta * libm::j0(params.big_delta / params.fd().abs())
}

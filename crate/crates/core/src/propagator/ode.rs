//! Adaptive Dormand-Prince 5(4) stepping for complex-valued systems.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rtol: 1e-12,
            atol: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn tightened(self, factor: f64) -> Self {
        Tolerances {
            rtol: self.rtol / factor,
            atol: self.atol / factor,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_STEPS: usize = 50_000_000;

fn combo(y: &[Complex64], h: f64, terms: &[(f64, &[Complex64])], out: &mut [Complex64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        *o = y[i] + acc * h;
    }
}

/// Integrate `y' = f(t, y)` from `(t0, y0)` and return the state at each of
/// `t_out`, which must be monotone in one direction away from `t0`.
pub fn integrate<F>(mut f: F, t0: f64, y0: &[Complex64], t_out: &[f64], tol: Tolerances) -> Result<Vec<Vec<Complex64>>>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let span = t_out.iter().map(|x| (x - t0).abs()).fold(0.0, f64::max);
    let dir = t_out
        .iter()
        .find(|x| **x != t0)
        .map_or(1.0, |x| (x - t0).signum());
    if t_out.windows(2).any(|w| (w[1] - w[0]) * dir < 0.0) || t_out.iter().any(|x| (x - t0) * dir < 0.0) {
        return Err(Error::StepSize("output times must be monotone away from the start".into()));
    }

    let zeros = vec![Complex64::new(0.0, 0.0); n];
    let (mut k1, mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) = (
        zeros.clone(),
        zeros.clone(),
        zeros.clone(),
        zeros.clone(),
        zeros.clone(),
        zeros.clone(),
        zeros.clone(),
    );
    let mut tmp = zeros.clone();
    let mut y_new = zeros;

    f(t, &y, &mut k1);
    let mut h_next = if span == 0.0 { 0.0 } else { (span * 1e-3).max(1e-12) };
    let mut out = Vec::with_capacity(t_out.len());
    let mut steps = 0usize;

    for &target in t_out {
        while (target - t) * dir > 0.0 {
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::StepSize(format!("step budget exhausted at t = {t}")));
            }
            let remaining = (target - t).abs();
            let last = h_next >= remaining;
            let h = if last { remaining } else { h_next };
            let hs = h * dir;

            combo(&y, hs, &[(A21, &k1)], &mut tmp);
            f(t + C2 * hs, &tmp, &mut k2);
            combo(&y, hs, &[(A31, &k1), (A32, &k2)], &mut tmp);
            f(t + C3 * hs, &tmp, &mut k3);
            combo(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)], &mut tmp);
            f(t + C4 * hs, &tmp, &mut k4);
            combo(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], &mut tmp);
            f(t + C5 * hs, &tmp, &mut k5);
            combo(
                &y,
                hs,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                &mut tmp,
            );
            f(t + hs, &tmp, &mut k6);
            combo(
                &y,
                hs,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
                &mut y_new,
            );
            let t_new = if last { target } else { t + hs };
            f(t_new, &y_new, &mut k7);

            let mut err = 0.0f64;
            for i in 0..n {
                let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
                let scale = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
                err = err.max(e.norm() / scale);
            }
            if !err.is_finite() {
                return Err(Error::StepSize(format!("non-finite state at t = {t}")));
            }
            if err <= 1.0 {
                t = t_new;
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k7);
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // a step shortened to land on an output time keeps the old proposal
                h_next = if last { h_next.max(h * grow) } else { h * grow };
            } else {
                h_next = h * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                if h_next < 1e-14 * span.max(1.0) {
                    return Err(Error::StepSize(format!("step size underflow at t = {t}")));
                }
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotating_phase() {
        // y' = i w y
        let w = 3.7;
        let ts: Vec<f64> = (0..=10).map(|k| k as f64 * 0.5).collect();
        let ys = integrate(
            |_, y, dy| dy[0] = y[0] * Complex64::new(0.0, w),
            0.0,
            &[Complex64::new(1.0, 0.0)],
            &ts,
            Tolerances::default(),
        )
        .unwrap();
        for (t, y) in ts.iter().zip(&ys) {
            let exact = Complex64::from_polar(1.0, w * t);
            assert!((y[0] - exact).norm() < 1e-10, "{t}: {}", (y[0] - exact).norm());
        }
    }

    #[test]
    fn backward_integration() {
        // y' = -t y  => y = exp(-(t^2 - t0^2)/2)
        let ys = integrate(
            |t, y, dy| dy[0] = y[0] * (-t),
            2.0,
            &[Complex64::new(1.0, 0.0)],
            &[1.0, 0.0],
            Tolerances::default(),
        )
        .unwrap();
        assert!((ys[1][0].re - (2.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rejects_non_monotone_outputs() {
        let r = integrate(|_, _, dy| dy[0] = Complex64::new(0.0, 0.0), 0.0, &[Complex64::new(1.0, 0.0)], &[1.0, 0.5], Tolerances::default());
        assert!(r.is_err());
    }

    #[test]
    fn zero_length_output() {
        let ys = integrate(|_, _, dy| dy[0] = Complex64::new(1.0, 0.0), 0.0, &[Complex64::new(1.0, 0.0)], &[0.0, 0.0], Tolerances::default()).unwrap();
        assert_eq!(ys[1][0], Complex64::new(1.0, 0.0));
    }
}

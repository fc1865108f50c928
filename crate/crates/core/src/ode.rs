//! Adaptive Dormand-Prince 5(4) integrator for complex vector ODEs.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::operators::{c, CMatrix, C64};

pub type CVector = DVector<C64>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            max_steps: 10_000_000,
        }
    }
}

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
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(y: &CVector, terms: &[(f64, &CVector)], h: f64) -> CVector {
    let mut out = y.clone();
    for &(a, k) in terms {
        if a != 0.0 {
            out.axpy(c(a * h, 0.0), k, c(1.0, 0.0));
        }
    }
    out
}

/// Integrates `dy/dt = f(t, y)` and returns `y` at every entry of `times`.
/// `times[0]` is the initial time; the step size is clipped so that every
/// grid point is hit exactly.
pub fn integrate<F>(mut f: F, y0: &CVector, times: &[f64], opts: OdeOptions) -> Result<Vec<CVector>>
where
    F: FnMut(f64, &CVector) -> CVector,
{
    if times.is_empty() {
        return Ok(Vec::new());
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("time grid must be strictly increasing".into()));
    }
    let mut out = Vec::with_capacity(times.len());
    out.push(y0.clone());
    if times.len() == 1 {
        return Ok(out);
    }

    let mut t = times[0];
    let mut y = y0.clone();
    let mut k1 = f(t, &y);
    let scale0 = y.iter().map(|z| z.norm()).fold(0.0, f64::max).max(opts.atol);
    let rate0 = k1.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let span = times[times.len() - 1] - times[0];
    let mut h = if rate0 > 0.0 { (0.01 * scale0 / rate0).min(span) } else { span };
    let mut steps = 0usize;

    for &target in &times[1..] {
        while t < target {
            if steps >= opts.max_steps {
                return Err(Error::Integrator(format!("exceeded {} steps at t = {t}", opts.max_steps)));
            }
            steps += 1;
            let remaining = target - t;
            let last = h >= remaining * (1.0 - 1e-12);
            let hs = if last { remaining } else { h };
            if !(hs > 0.0) || hs < 1e-14 * t.abs().max(1.0) {
                return Err(Error::Integrator(format!("step size underflow at t = {t}")));
            }

            let k2 = f(t + hs / 5.0, &axpy(&y, &[(A21, &k1)], hs));
            let k3 = f(t + 3.0 * hs / 10.0, &axpy(&y, &[(A31, &k1), (A32, &k2)], hs));
            let k4 = f(t + 4.0 * hs / 5.0, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], hs));
            let k5 = f(
                t + 8.0 * hs / 9.0,
                &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs),
            );
            let k6 = f(
                t + hs,
                &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], hs),
            );
            let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], hs);
            let k7 = f(t + hs, &y_new);
            let err = axpy(
                &CVector::zeros(y.len()),
                &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
                hs,
            );
            let mut err_norm = 0.0f64;
            for i in 0..y.len() {
                let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
                err_norm = err_norm.max(err[i].norm() / sc);
            }
            if !err_norm.is_finite() {
                return Err(Error::Integrator(format!("non-finite error estimate at t = {t}")));
            }
            if err_norm <= 1.0 {
                t = if last { target } else { t + hs };
                y = y_new;
                k1 = k7;
                let grow = if err_norm == 0.0 { 5.0 } else { (0.9 * err_norm.powf(-0.2)).min(5.0) };
                // a clipped final step says nothing about the natural step size
                if !last || grow < 1.0 {
                    h = hs * grow.max(0.2);
                }
            } else {
                h = hs * (0.9 * err_norm.powf(-0.2)).max(0.2);
            }
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// `dy/dt = M y` for a constant matrix `M`.
pub fn integrate_linear(m: &CMatrix, y0: &CVector, times: &[f64], opts: OdeOptions) -> Result<Vec<CVector>> {
    if m.nrows() != y0.len() || m.ncols() != y0.len() {
        return Err(Error::DimensionMismatch {
            expected: y0.len(),
            found: m.nrows(),
        });
    }
    integrate(|_, y| m * y, y0, times, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_and_rotation() {
        let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.5).collect();
        let y0 = CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(-0.7, 0.0), c(0.0, 2.0)]));
        let ys = integrate_linear(&m, &y0, &times, OdeOptions::default()).unwrap();
        for (t, y) in times.iter().zip(&ys) {
            assert!((y[0] - c((-0.7 * t).exp(), 0.0)).norm() < 1e-8);
            assert!((y[1] - c(0.0, 1.0) * c(0.0, 2.0 * t).exp()).norm() < 1e-7);
        }
    }

    #[test]
    fn hits_grid_points_and_first_point_is_exact() {
        let times = [0.0, 1e-3, 0.37, 2.0];
        let y0 = CVector::from_vec(vec![c(0.3, -0.2)]);
        let ys = integrate(|t, y| y * c(t.cos(), 0.0), &y0, &times, OdeOptions::default()).unwrap();
        assert_eq!(ys[0], y0);
        for (t, y) in times.iter().zip(&ys) {
            assert!((y[0] - y0[0] * t.sin().exp()).norm() < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_grid() {
        let y0 = CVector::from_vec(vec![c(1.0, 0.0)]);
        assert!(integrate(|_, y| y.clone(), &y0, &[0.0, 0.0], OdeOptions::default()).is_err());
    }
}

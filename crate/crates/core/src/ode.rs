//! Scalar adaptive Runge-Kutta (Dormand-Prince 5(4), FSAL).

use crate::error::{Error, Result};

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

// b - b_hat
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerance {
    /// Local error bound per step, absolute.
    pub abs: f64,
    pub max_steps: usize,
}

/// Integrates `y' = f(t, y)` from `t0` to `t1 > t0`, returning `y(t1)`.
pub(crate) fn integrate<F>(f: F, t0: f64, y0: f64, t1: f64, h0: f64, tol: Tolerance) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
{
    if t1 <= t0 {
        return Ok(y0);
    }
    let span = t1 - t0;
    let mut t = t0;
    let mut y = y0;
    let mut h = h0.min(span).max(span * 1e-14);
    let mut k1 = f(t, y);
    let mut steps = 0usize;
    let mut prev_err = 1e-4f64;

    while t < t1 {
        steps += 1;
        if steps > tol.max_steps {
            return Err(Error::StepLimit(tol.max_steps));
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        let k2 = f(t + C2 * h, y + h * A21 * k1);
        let k3 = f(t + C3 * h, y + h * (A31 * k1 + A32 * k2));
        let k4 = f(t + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = f(t + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        let k6 = f(t + h, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        let y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let k7 = f(t + h, y_new);
        let err_abs = (h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)).abs();
        let err = err_abs / tol.abs;

        if err <= 1.0 || h <= span * 1e-14 {
            t = if last { t1 } else { t + h };
            y = y_new;
            k1 = k7;
            // PI controller (Gustafsson).
            let e = err.max(1e-10);
            let factor = (0.9 * e.powf(-0.7 / 5.0) * prev_err.powf(0.4 / 5.0)).clamp(0.2, 5.0);
            prev_err = e;
            h *= factor;
        } else {
            h *= (0.9 * err.powf(-0.2)).max(0.1);
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerance = Tolerance {
        abs: 1e-12,
        max_steps: 1_000_000,
    };

    #[test]
    fn exponential_growth() {
        let y = integrate(|_, y| y, 0.0, 1.0, 2.0, 0.1, TOL).unwrap();
        assert!((y - 2.0f64.exp()).abs() < 1e-9);
    }

    #[test]
    fn oscillatory_rhs() {
        // y' = cos(t)^2 + 3, y(t) = 3.5 t + sin(2t)/4
        let y = integrate(|t, _| t.cos().powi(2) + 3.0, 0.0, 0.0, 20.0, 0.1, TOL).unwrap();
        assert!((y - (70.0 + (40.0f64).sin() / 4.0)).abs() < 1e-9);
    }

    #[test]
    fn step_limit_is_reported() {
        let tol = Tolerance {
            abs: 1e-14,
            max_steps: 10,
        };
        assert!(matches!(
            integrate(|t, _| (50.0 * t).sin(), 0.0, 0.0, 100.0, 0.1, tol),
            Err(Error::StepLimit(10))
        ));
    }
}

//! Scaled Prüfer shooting for `-u'' + V u = lambda u`.
//!
//! With `u = r sin(theta) / sqrt(S)`, `u' = r sqrt(S) cos(theta)` and the
//! scale `S = ((lambda - V)^2 + s0^2)^{1/4}`,
//!
//! `theta' = S cos^2 + ((lambda - V)/S) sin^2 + (S'/S) sin cos`.
//!
//! The scale tracks the local wavenumber, so the angle advances smoothly in
//! both the oscillatory and the forbidden region; `s0` keeps it finite at
//! the turning point (Airy scale `|V'|^{2/3}`). Zeros of `u` are the points
//! where `theta` crosses a multiple of pi for any scale.
//!
//! The left solution is launched with the boundary condition at `alpha` and
//! matched at `t_end`, deep in the forbidden region, against the WKB angle
//! of the decaying solution `u'/u = -kappa - kappa'/(2 kappa)`. The k-th
//! eigenvalue is where the mismatch equals `k pi`.

use std::f64::consts::PI;

use super::{BoundaryCondition, FiberPotential, PruferSettings};
use crate::error::Result;
use crate::ode::{self, Tolerance};

const MAX_STEPS: usize = 50_000_000;

pub(super) struct Shooter<'a> {
    f: &'a FiberPotential,
    bc: BoundaryCondition,
    t_end: f64,
    s0_sq: f64,
    tol: Tolerance,
}

impl<'a> Shooter<'a> {
    /// Truncation point and scale are fixed from `lambda_ref`; the shooter is
    /// valid for every `lambda <= lambda_ref`.
    pub(super) fn new(
        f: &'a FiberPotential,
        lambda_ref: f64,
        bc: BoundaryCondition,
        s: &PruferSettings,
    ) -> Result<Self> {
        let start = f.turning_point(lambda_ref)?.unwrap_or(f.alpha);
        let s0 = f.derivative(start).abs().powf(2.0 / 3.0).max(1.0);
        Ok(Self {
            f,
            bc,
            t_end: truncation_point(f, lambda_ref, start, s.t_margin),
            s0_sq: s0 * s0,
            tol: Tolerance {
                abs: 1e-3 * s.angle_tol,
                max_steps: MAX_STEPS,
            },
        })
    }

    fn scale(&self, q: f64) -> f64 {
        (q * q + self.s0_sq).sqrt().sqrt()
    }

    /// `theta_left(t_end) - theta_decaying(t_end)`; increasing in `lambda`.
    pub(super) fn mismatch(&self, lambda: f64) -> Result<f64> {
        let f = self.f;
        let alpha = f.alpha;
        let s_alpha = self.scale(lambda - f.value(alpha));
        let theta0 = match self.bc {
            BoundaryCondition::Dirichlet => 0.0,
            BoundaryCondition::Robin { beta } => s_alpha.atan2(-beta),
        };
        let s0_sq = self.s0_sq;
        let rhs = |t: f64, theta: f64| {
            let q = lambda - f.value(t);
            let dv = f.derivative(t);
            let w = q * q + s0_sq;
            let s = w.sqrt().sqrt();
            let (sn, cs) = theta.sin_cos();
            s * cs * cs + q / s * sn * sn - q * dv / (2.0 * w) * sn * cs
        };
        let theta_end = ode::integrate(rhs, alpha, theta0, self.t_end, 0.1 / s_alpha, self.tol)?;

        let gap = (f.value(self.t_end) - lambda).max(1e-300);
        let kappa = gap.sqrt();
        let log_slope = kappa + f.derivative(self.t_end) / (4.0 * gap);
        let theta_right = self.scale(-gap).atan2(-log_slope);
        Ok(theta_end - theta_right)
    }

    pub(super) fn count(&self, lambda: f64) -> Result<usize> {
        let m = self.mismatch(lambda)?;
        Ok(if m > 0.0 { (m / PI).ceil() as usize } else { 0 })
    }
}

/// Point past `start` where the WKB action `int sqrt(V - lambda)` reaches `margin`.
fn truncation_point(f: &FiberPotential, lambda: f64, start: f64, margin: f64) -> f64 {
    let kappa = |t: f64| (f.value(t) - lambda).max(0.0).sqrt();
    let mut t = start;
    let mut k = kappa(t);
    let mut action = 0.0;
    for _ in 0..100_000 {
        if action >= margin {
            break;
        }
        let dt = if k > 0.0 { (0.25 / k).min(1.0 + (t - start)) } else { 1.0 + (t - start) };
        let k_next = kappa(t + dt);
        action += 0.5 * (k + k_next) * dt;
        t += dt;
        k = k_next;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mismatch_is_increasing() {
        let f = FiberPotential::new(2, 1.0, 1.0, 0.0).unwrap();
        let s = PruferSettings::default();
        let shooter = Shooter::new(&f, 80.0, BoundaryCondition::Dirichlet, &s).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..40 {
            let m = shooter.mismatch(2.0 + 2.0 * i as f64).unwrap();
            assert!(m > prev);
            prev = m;
        }
    }

    #[test]
    fn truncation_reaches_margin() {
        let f = FiberPotential::new(3, 0.75, 1.0, 4.0).unwrap();
        let tp = f.turning_point(40.0).unwrap().unwrap();
        let t = truncation_point(&f, 40.0, tp, 20.0);
        assert!(t > tp);
        assert!(f.value(t) > 40.0);
    }
}

//! Upper bound on embedded eigenvalues of the field-free Laplacian through
//! a weak magnetic field `lambda^{-rho} A`.
//!
//! Functions orthogonal to the constant mode on every cross-section obey a
//! Poincaré inequality with constant `C_A`, which compares the free
//! quadratic form with the magnetic one at field strength
//! `tau = lambda^{-rho}`. By min-max, the number of eigenvalues below
//! `lambda` carried by such functions is at most
//! `N((1 + C_A lambda^{-rho}) lambda + C_A, -Delta_{tau A}) + 1`.
//!
//! For separable models (no core, `A = 0`) the left side is computed
//! exactly by [`n_ess_exact`] from the non-constant cross-section modes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ManifoldModel;
use crate::weyl::{cusp_count, leading_term, total_count_bracket, Boundary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundReport {
    pub lambda: f64,
    pub rho: f64,
    pub tau: f64,
    pub c_a: f64,
    pub shifted_lambda: f64,
    pub bound: u64,
    /// Exact embedded count of the field-free model, when it is separable.
    pub n_ess: Option<u64>,
    pub leading: f64,
    pub r0: f64,
}

fn check_delta(n: usize, delta: f64) -> Result<f64> {
    let n = n as f64;
    if !(delta > 1.0 / n && delta <= 1.0) {
        return Err(Error::Precondition(format!("delta = {delta} outside (1/{n}, 1]")));
    }
    Ok(n)
}

/// `rho = 1/2` for `delta >= 2/n`, `(n delta - 1)/2` below.
pub fn rho_exponent(n: usize, delta: f64) -> Result<f64> {
    let nf = check_delta(n, delta)?;
    Ok(if delta >= 2.0 / nf { 0.5 } else { (nf * delta - 1.0) / 2.0 })
}

/// Remainder order of the scaled count: `lambda^{(n-1)/2} ln(lambda)` for
/// `delta >= 2/n`, `lambda^{(n - (n delta - 1))/2}` below.
pub fn r0_model(n: usize, delta: f64, lambda: f64) -> Result<f64> {
    let nf = check_delta(n, delta)?;
    Ok(if delta >= 2.0 / nf {
        lambda.powf((nf - 1.0) / 2.0) * lambda.ln()
    } else {
        lambda.powf((nf - (nf * delta - 1.0)) / 2.0)
    })
}

/// `C_A = max_j (1 + 2 |A_j|^2 / mu_1(j, 0))`, where `mu_1(j, 0)` is the
/// first nonzero eigenvalue of the field-free cross-section. A core of
/// positive volume adds the candidate `2 max_j |A_j|^2`.
pub fn poincare_constant(model: &ManifoldModel) -> Result<f64> {
    let mut c = 1.0f64;
    let mut field = 0.0f64;
    for cusp in &model.cusps {
        let gap = cusp.cross_section.first_free_gap();
        if !(gap > 0.0) {
            return Err(Error::Precondition("cross-section without spectral gap".into()));
        }
        let a2 = cusp.cross_section.field_norm_sq();
        field = field.max(a2);
        c = c.max(1.0 + 2.0 * a2 / gap);
    }
    if model.core.volume > 0.0 {
        c = c.max(2.0 * field);
    }
    Ok(c)
}

/// Bound on the number of embedded eigenvalues below `lambda`.
///
/// `model` carries the field `A` used for the comparison; the exact count
/// is attached when the field-free model is separable.
pub fn embedded_upper_bound(model: &ManifoldModel, lambda: f64) -> Result<BoundReport> {
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return Err(Error::Precondition(format!("lambda = {lambda} must be at least 1")));
    }
    if let Some(j) = model.cusps.iter().position(|c| !c.cross_section.flux_nontrivial()) {
        return Err(Error::Precondition(format!("cusp {j} has integer flux")));
    }
    let n = model.n;
    let delta = model.delta();
    let rho = rho_exponent(n, delta)?;
    let tau = lambda.powf(-rho);
    let c_a = poincare_constant(model)?;
    let shifted_lambda = lambda + c_a * lambda.powf(1.0 - rho) + c_a;
    let scaled = model.scaled_field(tau);
    let bound = total_count_bracket(&scaled, shifted_lambda)?.high + 1;
    let n_ess = if model.core.volume == 0.0 {
        Some(n_ess_exact(&model.without_field(), lambda)?)
    } else {
        None
    };
    Ok(BoundReport {
        lambda,
        rho,
        tau,
        c_a,
        shifted_lambda,
        bound,
        n_ess,
        leading: leading_term(model.total_volume()?, n, lambda),
        r0: r0_model(n, delta, lambda)?,
    })
}

/// Embedded eigenvalues below `lambda` of the separable field-free model:
/// Dirichlet counts of every fiber with `mu > 0`. The constant mode's
/// channel has purely continuous spectrum above its floor.
pub fn n_ess_exact(model: &ManifoldModel, lambda: f64) -> Result<u64> {
    if model.is_magnetic() {
        return Err(Error::Precondition("exact embedded count needs A = 0".into()));
    }
    if model.core.volume != 0.0 {
        return Err(Error::Precondition("exact embedded count needs core volume 0".into()));
    }
    (0..model.cusps.len()).try_fold(0u64, |acc, j| {
        Ok(acc + cusp_count(model, j, lambda, Boundary::Dirichlet)?.low)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CompactCoreSurrogate;
    use std::f64::consts::PI;

    #[test]
    fn rho_branches() {
        assert_eq!(rho_exponent(2, 1.0).unwrap(), 0.5);
        assert!((rho_exponent(3, 0.4).unwrap() - 0.1).abs() < 1e-15);
        assert_eq!(rho_exponent(4, 0.5).unwrap(), 0.5);
        assert!(rho_exponent(3, 0.3).is_err());
        assert!(rho_exponent(2, 1.2).is_err());
    }

    #[test]
    fn r0_switches_with_rho() {
        let l = 1e3f64;
        assert!((r0_model(4, 0.5, l).unwrap() - l.powf(1.5) * l.ln()).abs() < 1e-6);
        assert!((r0_model(3, 0.4, l).unwrap() - l.powf(1.4)).abs() < 1e-6);
    }

    #[test]
    fn poincare_reference() {
        let m = ManifoldModel::single_circle_cusp(2.0 * PI, 0.5, 1.0, 1.0);
        assert!((poincare_constant(&m).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(poincare_constant(&m.without_field()).unwrap(), 1.0);
        let strong = ManifoldModel::single_circle_cusp(2.0 * PI, 1.0 + 1e-3, 1.0, 1.0);
        let field = |m: &ManifoldModel| poincare_constant(m).unwrap() - 1.0;
        let doubled = ManifoldModel::single_circle_cusp(2.0 * PI, 2.0 * (1.0 + 1e-3), 1.0, 1.0);
        assert!((field(&doubled) - 4.0 * field(&strong)).abs() < 1e-12);
        let mut cored = m.clone();
        cored.core = CompactCoreSurrogate {
            volume: 1.0,
            remainder_coeff: 0.0,
        };
        assert!((poincare_constant(&cored).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn reference_pipeline_parameters() {
        let m = ManifoldModel::single_circle_cusp(2.0 * PI, 0.5, 1.0, 1.0);
        let r = embedded_upper_bound(&m, 100.0).unwrap();
        assert!((r.tau - 0.1).abs() < 1e-15);
        assert!((r.shifted_lambda - 116.5).abs() < 1e-12);
        let n_ess = r.n_ess.unwrap();
        assert!(n_ess <= r.bound);
    }

    #[test]
    fn refusals() {
        let integer = ManifoldModel::single_circle_cusp(2.0 * PI, 1.0, 1.0, 1.0);
        assert!(embedded_upper_bound(&integer, 100.0).is_err());
        let m = ManifoldModel::single_circle_cusp(2.0 * PI, 0.5, 1.0, 1.0);
        assert!(embedded_upper_bound(&m, 0.5).is_err());
        assert!(n_ess_exact(&m, 100.0).is_err());
        assert_eq!(n_ess_exact(&m.without_field(), 0.2).unwrap(), 0);
    }
}

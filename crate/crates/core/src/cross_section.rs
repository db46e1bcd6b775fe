//! Spectra of the magnetic Laplacian `-Delta^X_{tau A}` on a flat torus.
//!
//! With `A = sum_k omega_k dx_k` constant, the eigenfunctions are the
//! characters `exp(2 pi i <m, x / L>)` and the eigenvalues form the shifted
//! lattice `sum_k (2 pi m_k / L_k + tau omega_k)^2 = sum_k (2 pi / L_k)^2
//! (m_k + f_k)^2` with `f_k = tau omega_k L_k / (2 pi)`. Only the fractional
//! part of each `f_k` matters, which is the flux periodicity of the spectrum.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::TorusCrossSection;
use crate::weyl::unit_ball_volume;

/// Default bound on the number of lattice points a single enumeration may visit.
pub const DEFAULT_ELEMENT_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CrossSpectrum {
    pub tau: f64,
    /// Eigenvalues below `cutoff`, sorted, repeated with multiplicity.
    pub values: Vec<f64>,
    pub cutoff: f64,
}

impl CrossSpectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of eigenvalues strictly below `mu` (`mu <= cutoff`).
    pub fn count_below(&self, mu: f64) -> usize {
        self.values.partition_point(|&v| v < mu)
    }
}

/// Reduced flux offsets below this (relative to `max(1, |f|)`) are
/// rounding noise of an integer flux and are flushed to zero.
const OFFSET_FLOOR: f64 = 1e-13;

/// Reduced flux offset in `[-1/2, 1/2]`.
pub(crate) fn canonical_offset(f: f64) -> f64 {
    let r = f - f.round();
    if r.abs() < OFFSET_FLOOR * f.abs().max(1.0) {
        0.0
    } else {
        r
    }
}

/// Per-direction `(2 pi / L_k, reduced offset)`.
fn lattice_axes(x: &TorusCrossSection, tau: f64) -> Vec<(f64, f64)> {
    x.lengths
        .iter()
        .zip(&x.magnetic)
        .map(|(&l, &w)| (2.0 * PI / l, canonical_offset(tau * w * l / (2.0 * PI))))
        .collect()
}

/// Index window per direction that contains every `m` with
/// `(k (m + f))^2 < cutoff`, padded by one on each side.
fn window(k: f64, f: f64, cutoff: f64) -> (i64, i64) {
    let r = cutoff.max(0.0).sqrt() / k;
    ((-f - r).ceil() as i64 - 1, (-f + r).floor() as i64 + 1)
}

/// Visits every lattice level strictly below `cutoff`, lexicographically in `m`.
fn visit_levels(axes: &[(f64, f64)], cutoff: f64, visit: &mut impl FnMut(f64)) {
    fn rec(axes: &[(f64, f64)], partial: f64, cutoff: f64, visit: &mut impl FnMut(f64)) {
        let Some((&(k, f), rest)) = axes.split_first() else {
            visit(partial);
            return;
        };
        let (lo, hi) = window(k, f, cutoff - partial);
        for m in lo..=hi {
            let s = k * (m as f64 + f);
            let v = partial + s * s;
            if v < cutoff {
                rec(rest, v, cutoff, visit);
            }
        }
    }
    if cutoff > 0.0 {
        rec(axes, 0.0, cutoff, visit);
    }
}

pub fn mu_spectrum(x: &TorusCrossSection, tau: f64, cutoff: f64) -> Result<CrossSpectrum> {
    mu_spectrum_with_budget(x, tau, cutoff, DEFAULT_ELEMENT_BUDGET)
}

pub fn mu_spectrum_with_budget(
    x: &TorusCrossSection,
    tau: f64,
    cutoff: f64,
    budget: u128,
) -> Result<CrossSpectrum> {
    if !(cutoff > 0.0) {
        return Err(Error::Precondition(format!("cutoff {cutoff} must be positive")));
    }
    let axes = lattice_axes(x, tau);
    let needed = axes.iter().fold(1u128, |acc, &(k, f)| {
        let (lo, hi) = window(k, f, cutoff);
        acc.saturating_mul((hi - lo + 1) as u128)
    });
    if needed > budget {
        return Err(Error::Resource { needed, budget });
    }
    let mut values = Vec::new();
    visit_levels(&axes, cutoff, &mut |v| values.push(v));
    // Stable: equal levels keep the lexicographic order of their lattice labels.
    values.sort_by(f64::total_cmp);
    Ok(CrossSpectrum {
        tau,
        values,
        cutoff,
    })
}

/// `N(mu, -Delta^X_{tau A})`, eigenvalues strictly below `mu`.
pub fn cross_count(x: &TorusCrossSection, tau: f64, mu: f64) -> u64 {
    let axes = lattice_axes(x, tau);
    let mut count = 0u64;
    visit_levels(&axes, mu, &mut |_| count += 1);
    count
}

/// Lowest eigenvalue `mu_0(tau)`; the lattice minimum is attained at `m = 0`
/// because every offset is reduced into `[-1/2, 1/2]`.
pub fn ground_level(x: &TorusCrossSection, tau: f64) -> f64 {
    lattice_axes(x, tau)
        .iter()
        .fold(0.0, |acc, &(k, f)| {
            let s = k * f;
            acc + s * s
        })
}

/// Leading Weyl term `omega_d / (2 pi)^d |X| mu^{d/2}` on the torus, `d = n - 1`.
pub fn cross_weyl_term(x: &TorusCrossSection, mu: f64) -> f64 {
    let d = x.dim() as i32;
    unit_ball_volume(x.dim()) / (2.0 * PI).powi(d) * x.volume() * mu.max(0.0).powf(d as f64 / 2.0)
}

/// Largest normalized deviation from the Weyl term over a geometric grid on
/// `[1, mu_max]`, `|N(mu) - weyl(mu)| / max(1, mu^{(d-1)/2})`.
pub fn hormander_residual(x: &TorusCrossSection, tau: f64, mu_max: f64, grid: usize) -> Result<f64> {
    if !(mu_max > 1.0) {
        return Err(Error::Precondition(format!("mu_max = {mu_max} must exceed 1")));
    }
    if grid < 2 {
        return Err(Error::DegenerateGrid(format!("{grid} grid points")));
    }
    let spectrum = mu_spectrum(x, tau, mu_max)?;
    let d = x.dim() as f64;
    let ratio = mu_max.ln() / (grid - 1) as f64;
    let worst = (0..grid)
        .map(|i| {
            let mu = if i + 1 == grid { mu_max } else { (ratio * i as f64).exp() };
            let n = spectrum.count_below(mu) as f64;
            (n - cross_weyl_term(x, mu)).abs() / mu.powf((d - 1.0) / 2.0).max(1.0)
        })
        .fold(0.0, f64::max);
    Ok(worst)
}

/// Second-order coefficient `c_2` of `mu_0(tau) = c_1 tau + c_2 tau^2 + O(tau^3)`.
///
/// For constant forms on a flat torus `d^* A = 0`, so `c_1 = 0` and the
/// resolvent correction to `c_2` vanishes, leaving `c_2 = |X|^{-1} int |A|^2`.
pub fn perturb_c2(x: &TorusCrossSection) -> f64 {
    x.field_norm_sq()
}

/// Field scale below which no level crossing reaches the ground state:
/// `tau_0 = pi / (2 L_max |omega|_max)`, so every reduced offset stays at
/// most 1/4 in modulus and `mu_0(tau) = c_2 tau^2` exactly.
pub fn quadratic_regime_tau(x: &TorusCrossSection) -> f64 {
    let l = x.lengths.iter().cloned().fold(0.0, f64::max);
    let w = x.magnetic.iter().map(|w| w.abs()).fold(0.0, f64::max);
    if w == 0.0 {
        f64::INFINITY
    } else {
        PI / (2.0 * l * w)
    }
}

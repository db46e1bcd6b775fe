//! Counting functions assembled from fibers, phase integrals, the cusp
//! Dirichlet/Robin bracket and fits of the Weyl remainder.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::cross_section::{cross_count, mu_spectrum};
use crate::error::{Error, Result};
use crate::fiber::{default_robin_beta, fiber_count, BoundaryCondition, FiberPotential, PruferSettings};
use crate::model::{cusp_volume, ManifoldModel, TorusCrossSection};
use crate::quad;

/// Absolute tolerance of [`phase_integral`].
pub const PHASE_TOL: f64 = 1e-10;

/// Volume of the unit ball in `R^d`, `pi^{d/2} / Gamma(1 + d/2)`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// `|M| omega_n / (2 pi)^n lambda^{n/2}`.
pub fn leading_term(volume: f64, n: usize, lambda: f64) -> f64 {
    volume * unit_ball_volume(n) / (2.0 * PI).powi(n as i32) * lambda.max(0.0).powf(n as f64 / 2.0)
}

/// Which boundary condition to impose at the cusp's inner boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Dirichlet,
    /// Robin condition transported from the Neumann condition of the cusp.
    Robin,
}

/// A count (or a bracket of counts) at one `lambda` together with its Weyl term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountResult {
    pub lambda: f64,
    pub low: u64,
    pub high: u64,
    pub leading: f64,
}

impl CountResult {
    pub fn residual_low(&self) -> f64 {
        self.low as f64 - self.leading
    }

    pub fn residual_high(&self) -> f64 {
        self.high as f64 - self.leading
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    /// Fitted exponent of `|residual|`; NaN when `defined` is false.
    pub slope: f64,
    /// Whether `C lambda^s ln(lambda)` beat `C lambda^s` by residual sum of squares.
    pub log_correction: bool,
    pub constant: f64,
    pub rss: f64,
    /// False when too few nonzero residuals remain to fit.
    pub defined: bool,
    pub points: usize,
}

fn cusp_index(model: &ManifoldModel, j: usize) -> Result<()> {
    if j >= model.cusps.len() {
        return Err(Error::Precondition(format!(
            "cusp index {j} out of range ({} cusps)",
            model.cusps.len()
        )));
    }
    Ok(())
}

/// Fibers `(l, mu_l)` of cusp `j` with `mu_l < lambda / min_i a_i^{4 delta_i}`.
/// Every other fiber has `V >= lambda` and contributes nothing below `lambda`.
pub fn admissible_fibers(model: &ManifoldModel, j: usize, lambda: f64) -> Result<Vec<(usize, f64)>> {
    cusp_index(model, j)?;
    let cutoff = lambda / model.min_boundary_weight();
    if !(cutoff > 0.0) {
        return Ok(Vec::new());
    }
    let spectrum = mu_spectrum(&model.cusps[j].cross_section, 1.0, cutoff)?;
    Ok(spectrum.values.into_iter().enumerate().collect())
}

/// `w(lambda) = int [lambda - V]_+^{1/2} dt`.
///
/// The allowed interval `[s, T]` is mapped from `[0, 1]` by the smoothstep
/// `t = s + (T - s)(3x^2 - 2x^3)`, whose vanishing derivative at both ends
/// cancels the square-root behaviour at turning points.
pub fn phase_integral(f: &FiberPotential, lambda: f64) -> Result<f64> {
    let Some((s, t)) = f.allowed_interval(lambda)? else {
        return Ok(0.0);
    };
    let len = t - s;
    let integrand = |x: f64| {
        let tt = s + len * x * x * (3.0 - 2.0 * x);
        (lambda - f.value(tt)).max(0.0).sqrt() * 6.0 * x * (1.0 - x) * len
    };
    Ok(quad::integrate(integrand, 0.0, 1.0, PHASE_TOL))
}

/// Confining fibers of cusp `j`, in fiber order.
fn confining_fibers(model: &ManifoldModel, j: usize, lambda: f64) -> Result<Vec<FiberPotential>> {
    let cusp = &model.cusps[j];
    admissible_fibers(model, j, lambda)?
        .into_iter()
        .filter(|&(_, mu)| mu > 0.0)
        .map(|(_, mu)| FiberPotential::for_cusp(cusp, model.n, mu))
        .collect()
}

/// `Theta_j(lambda) = sum_l w_{j,l}(lambda) / pi` over confining fibers.
pub fn theta_sum(model: &ManifoldModel, j: usize, lambda: f64) -> Result<f64> {
    let fibers = confining_fibers(model, j, lambda)?;
    let parts: Vec<f64> = fibers
        .par_iter()
        .map(|f| phase_integral(f, lambda))
        .collect::<Result<_>>()?;
    Ok(parts.iter().sum::<f64>() / PI)
}

/// `R(mu) = sum_l [mu - mu_l]_+^{1/2}` over the cross-section spectrum.
pub fn rj_sum(x: &TorusCrossSection, tau: f64, mu: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Ok(0.0);
    }
    let spectrum = mu_spectrum(x, tau, mu)?;
    Ok(spectrum.values.iter().map(|&v| (mu - v).sqrt()).sum())
}

/// `|R(mu) - (1/2) int_0^mu (mu - s)^{-1/2} N(s) ds|`.
///
/// `N` is a step function, so the integral is exact on each interval
/// between consecutive levels; `N` is evaluated at interval midpoints by an
/// independent lattice count. Levels closer than `quad_tol * max(1, mu)`
/// are merged.
pub fn identity_residual(x: &TorusCrossSection, tau: f64, mu: f64, quad_tol: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Ok(0.0);
    }
    let sum = rj_sum(x, tau, mu)?;
    let merge = quad_tol * mu.max(1.0);
    let mut breaks: Vec<f64> = Vec::new();
    for &v in &mu_spectrum(x, tau, mu)?.values {
        if breaks.last().is_none_or(|&b| v - b > merge) {
            breaks.push(v);
        }
    }
    breaks.push(mu);
    let mut half_integral = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let n = cross_count(x, tau, 0.5 * (lo + hi)) as f64;
        // (1/2) int_lo^hi (mu - s)^{-1/2} ds, written without cancellation.
        let piece = (hi - lo) / ((mu - lo).sqrt() + (mu - hi).sqrt());
        half_integral += n * piece;
    }
    Ok((sum - half_integral).abs())
}

/// Exact count of cusp `j` below `lambda`: the sum of fiber counts over
/// confining admissible fibers. `mu = 0` channels carry no discrete spectrum
/// and are skipped.
pub fn cusp_count(model: &ManifoldModel, j: usize, lambda: f64, bc: Boundary) -> Result<CountResult> {
    cusp_count_with(model, j, lambda, bc, &PruferSettings::default())
}

pub fn cusp_count_with(
    model: &ManifoldModel,
    j: usize,
    lambda: f64,
    bc: Boundary,
    settings: &PruferSettings,
) -> Result<CountResult> {
    let fibers = confining_fibers(model, j, lambda)?;
    let cusp = &model.cusps[j];
    let condition = match bc {
        Boundary::Dirichlet => BoundaryCondition::Dirichlet,
        Boundary::Robin => BoundaryCondition::Robin {
            beta: default_robin_beta(cusp, model.n),
        },
    };
    let counts: Vec<usize> = fibers
        .par_iter()
        .map(|f| fiber_count(f, lambda, condition, settings))
        .collect::<Result<_>>()?;
    let count = counts.iter().sum::<usize>() as u64;
    Ok(CountResult {
        lambda,
        low: count,
        high: count,
        leading: leading_term(cusp_volume(cusp, model.n)?, model.n, lambda),
    })
}

/// Dirichlet/Robin bracket of the whole model, with the core surrogate's
/// Weyl band rounded outward.
pub fn total_count_bracket(model: &ManifoldModel, lambda: f64) -> Result<CountResult> {
    let n = model.n;
    let core = leading_term(model.core.volume, n, lambda);
    let band = model.core.remainder_coeff * lambda.max(0.0).powf((n as f64 - 1.0) / 2.0);
    let mut low = (core - band).floor().max(0.0) as u64;
    let mut high = (core + band).ceil().max(0.0) as u64;
    for j in 0..model.cusps.len() {
        low += cusp_count(model, j, lambda, Boundary::Dirichlet)?.low;
        high += cusp_count(model, j, lambda, Boundary::Robin)?.high;
    }
    Ok(CountResult {
        lambda,
        low,
        high,
        leading: leading_term(model.total_volume()?, n, lambda),
    })
}

/// Expected order of the remainder: `lambda^{(n-1)/2} ln(lambda)` when
/// `delta >= 1/(n-1)`, otherwise `lambda^{1/(2 delta)}`.
pub fn remainder_model(n: usize, delta: f64, lambda: f64) -> f64 {
    let n = n as f64;
    if delta >= 1.0 / (n - 1.0) {
        lambda.powf((n - 1.0) / 2.0) * lambda.ln()
    } else {
        lambda.powf(1.0 / (2.0 * delta))
    }
}

/// Fits the Dirichlet count residual of a pure cusp model over `lambdas`.
pub fn remainder_fit(model: &ManifoldModel, lambdas: &[f64]) -> Result<FitReport> {
    if model.core.volume > 0.0 {
        return Err(Error::Precondition(
            "remainder fit needs exact counts (core volume 0)".into(),
        ));
    }
    check_grid(lambdas)?;
    let residuals: Vec<f64> = lambdas
        .par_iter()
        .map(|&l| total_count_bracket(model, l).map(|c| c.residual_low()))
        .collect::<Result<_>>()?;
    fit_remainder(lambdas, &residuals)
}

fn check_grid(lambdas: &[f64]) -> Result<()> {
    if lambdas.len() < 8 {
        return Err(Error::DegenerateGrid(format!("{} points, need at least 8", lambdas.len())));
    }
    if lambdas.iter().any(|&l| !(l > 1.0 && l.is_finite())) {
        return Err(Error::DegenerateGrid("every lambda must be finite and exceed 1".into()));
    }
    let lo = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = lambdas.iter().cloned().fold(0.0, f64::max);
    if hi < 10.0 * lo {
        return Err(Error::DegenerateGrid(format!("[{lo}, {hi}] spans less than a decade")));
    }
    Ok(())
}

/// Least-squares line `y = c + s x`; returns `(c, s, rss)`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let s = sxy / sxx;
    let c = my - s * mx;
    let rss = x.iter().zip(y).map(|(a, b)| (b - c - s * a).powi(2)).sum();
    (c, s, rss)
}

/// Regresses `ln|r|` on `ln lambda` for `|r| ~ C lambda^s` and
/// `|r| ~ C lambda^s ln(lambda)`, keeping the model with the smaller RSS.
pub fn fit_remainder(lambdas: &[f64], residuals: &[f64]) -> Result<FitReport> {
    if lambdas.len() != residuals.len() {
        return Err(Error::Precondition("grid and residual lengths differ".into()));
    }
    check_grid(lambdas)?;
    let (x, y): (Vec<f64>, Vec<f64>) = lambdas
        .iter()
        .zip(residuals)
        .filter(|(_, r)| r.abs() > 1e-9)
        .map(|(l, r)| (l.ln(), r.abs().ln()))
        .unzip();
    let points = x.len();
    if points < 3 {
        return Ok(FitReport {
            slope: f64::NAN,
            log_correction: false,
            constant: f64::NAN,
            rss: 0.0,
            defined: false,
            points,
        });
    }
    let (c_pow, s_pow, rss_pow) = line_fit(&x, &y);
    let y_log: Vec<f64> = x.iter().zip(&y).map(|(a, b)| b - a.ln()).collect();
    let (c_log, s_log, rss_log) = line_fit(&x, &y_log);
    let log_correction = rss_log < rss_pow;
    let (c, slope, rss) = if log_correction {
        (c_log, s_log, rss_log)
    } else {
        (c_pow, s_pow, rss_pow)
    };
    Ok(FitReport {
        slope,
        log_correction,
        constant: c.exp(),
        rss,
        defined: true,
        points,
    })
}

/// `lambda_min * r^i`, `points` values ending exactly at `lambda_max`.
pub fn geometric_grid(lambda_min: f64, lambda_max: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![lambda_min];
    }
    let step = (lambda_max / lambda_min).ln() / (points - 1) as f64;
    (0..points)
        .map(|i| {
            if i + 1 == points {
                lambda_max
            } else {
                lambda_min * (step * i as f64).exp()
            }
        })
        .collect()
}

pub fn linear_grid(lambda_min: f64, lambda_max: f64, points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![lambda_min];
    }
    let step = (lambda_max - lambda_min) / (points - 1) as f64;
    (0..points)
        .map(|i| if i + 1 == points { lambda_max } else { lambda_min + step * i as f64 })
        .collect()
}

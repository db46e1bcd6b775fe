//! Half-line Schrödinger operators `L = -d^2/dt^2 + V(t)` on `(alpha, inf)`,
//! one per cross-section eigenvalue `mu` of a cusp.
//!
//! Separation of variables turns the cusp Laplacian into a direct sum of
//! these operators. For `delta = 1` (after `y = e^t`) the potential is
//! `mu e^{2t} + (n-1)^2/4` on `(2 ln a, inf)`; for `1/n < delta < 1`
//! (after `y = ((1-delta) t)^{1/(1-delta)}`) it is
//! `mu ((1-delta) t)^{2 delta/(1-delta)} + c_{n,delta} t^{-2}` on
//! `(a^{2(1-delta)}/(1-delta), inf)`.
//!
//! Eigenvalues are counted by the Prüfer oscillation method
//! ([`fiber_count`]) and extracted by bracketing plus root polishing
//! ([`fiber_eigenvalues`]). [`fd_oracle`] is an independent
//! finite-difference check used by the test suites.

mod oracle;
mod prufer;

pub use oracle::fd_oracle;

use crate::error::{Error, Result};
use crate::model::CuspEnd;
use prufer::Shooter;

/// Potential of one fiber operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberPotential {
    pub n: usize,
    pub delta: f64,
    /// Cross-section eigenvalue feeding this fiber.
    pub mu: f64,
    /// Left endpoint of the half-line.
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Dirichlet,
    /// `u'(alpha) + beta u(alpha) = 0`.
    Robin { beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruferSettings {
    /// Relative tolerance for eigenvalues, also the width of the exclusion
    /// band that keeps counts strictly below `lambda`.
    pub rel_tol: f64,
    /// Target accuracy of the Prüfer angle; the integrator's per-step local
    /// error bound is `1e-3 * angle_tol`.
    pub angle_tol: f64,
    /// WKB action `int sqrt(V - lambda) dt` integrated past the turning
    /// point before the decaying boundary condition is imposed.
    pub t_margin: f64,
}

impl Default for PruferSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            angle_tol: 1e-9,
            t_margin: 20.0,
        }
    }
}

impl FiberPotential {
    pub fn new(n: usize, delta: f64, mu: f64, alpha: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition(format!("dimension {n} < 2")));
        }
        if !(delta > 1.0 / n as f64 && delta <= 1.0) {
            return Err(Error::Precondition(format!("delta = {delta} outside (1/n, 1]")));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::Precondition(format!("mu = {mu} must be a nonnegative real")));
        }
        if !alpha.is_finite() || (delta < 1.0 && alpha <= 0.0) {
            return Err(Error::Precondition(format!("invalid left endpoint alpha = {alpha}")));
        }
        Ok(Self { n, delta, mu, alpha })
    }

    /// The fiber of `cusp` over cross-section eigenvalue `mu`.
    pub fn for_cusp(cusp: &CuspEnd, n: usize, mu: f64) -> Result<Self> {
        Self::new(n, cusp.delta, mu, left_endpoint(cusp))
    }

    pub fn with_mu(&self, mu: f64) -> Self {
        Self { mu, ..*self }
    }

    fn is_exponential(&self) -> bool {
        self.delta == 1.0
    }

    /// `(n-1)^2/4` for `delta = 1`, `c_{n,delta}` (coefficient of `t^{-2}`) otherwise.
    pub fn field_free_coefficient(&self) -> f64 {
        let n = self.n as f64;
        let d = self.delta;
        if self.is_exponential() {
            (n - 1.0) * (n - 1.0) / 4.0
        } else {
            (n - 1.0) * d * ((n - 3.0) * d + 2.0) / (4.0 * (1.0 - d) * (1.0 - d))
        }
    }

    fn power(&self) -> f64 {
        2.0 * self.delta / (1.0 - self.delta)
    }

    /// `V(t)` without the domain check.
    pub fn value(&self, t: f64) -> f64 {
        let c = self.field_free_coefficient();
        if self.is_exponential() {
            self.mu * (2.0 * t).exp() + c
        } else {
            let base = (1.0 - self.delta) * t;
            self.mu * base.powf(self.power()) + c / (t * t)
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if self.is_exponential() {
            2.0 * self.mu * (2.0 * t).exp()
        } else {
            let p = self.power();
            let b = 1.0 - self.delta;
            let c = self.field_free_coefficient();
            self.mu * p * b * (b * t).powf(p - 1.0) - 2.0 * c / (t * t * t)
        }
    }

    /// `V(t)`, rejecting points left of the domain.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if t < self.alpha || (!self.is_exponential() && t <= 0.0) {
            return Err(Error::Domain {
                t,
                start: self.alpha,
            });
        }
        Ok(self.value(t))
    }

    /// Bottom of the essential spectrum of a `mu = 0` channel.
    pub fn essential_infimum(&self) -> f64 {
        if self.is_exponential() {
            self.field_free_coefficient()
        } else {
            0.0
        }
    }

    /// Where `V` attains its minimum on `[alpha, inf)` (requires `mu > 0`).
    pub fn minimum_point(&self) -> f64 {
        if self.is_exponential() || self.mu == 0.0 {
            return self.alpha;
        }
        // V'(t) t^3 = mu p b^p t^{p+2} - 2c is increasing: one critical point.
        let p = self.power();
        let b = 1.0 - self.delta;
        let c = self.field_free_coefficient();
        let t_star = (2.0 * c / (self.mu * p * b.powf(p))).powf(1.0 / (p + 2.0));
        t_star.max(self.alpha)
    }

    /// `inf V` over the half-line.
    pub fn infimum(&self) -> f64 {
        if self.mu == 0.0 {
            self.essential_infimum()
        } else {
            self.value(self.minimum_point())
        }
    }

    /// Outer turning point: the least `t >= alpha` beyond which `V >= lambda`.
    ///
    /// `Ok(None)` when `V > lambda` on the whole half-line; for `mu = 0` and
    /// `lambda` above the essential infimum the potential never reaches
    /// `lambda`, reported as [`Error::ContinuousChannel`].
    pub fn turning_point(&self, lambda: f64) -> Result<Option<f64>> {
        if self.mu == 0.0 {
            let ess = self.essential_infimum();
            if lambda > ess {
                return Err(Error::ContinuousChannel {
                    lambda,
                    ess_inf: ess,
                });
            }
            let at_alpha = self.is_exponential() && lambda == ess;
            return Ok(at_alpha.then_some(self.alpha));
        }
        let m = self.minimum_point();
        if self.value(m) > lambda {
            return Ok(None);
        }
        if self.is_exponential() {
            let t = 0.5 * ((lambda - self.field_free_coefficient()) / self.mu).ln();
            return Ok(Some(t.max(self.alpha)));
        }
        let mut hi = m + 1.0;
        while self.value(hi) < lambda {
            hi = m + 2.0 * (hi - m);
        }
        Ok(Some(bisect_root(|t| self.value(t) - lambda, m, hi)))
    }

    /// Classically allowed interval `{t >= alpha : V(t) < lambda}`, if nonempty.
    pub fn allowed_interval(&self, lambda: f64) -> Result<Option<(f64, f64)>> {
        let Some(end) = self.turning_point(lambda)? else {
            return Ok(None);
        };
        let m = self.minimum_point();
        if self.value(m) >= lambda {
            return Ok(None);
        }
        let start = if self.value(self.alpha) < lambda {
            self.alpha
        } else {
            bisect_root(|t| lambda - self.value(t), self.alpha, m)
        };
        Ok(Some((start, end)))
    }

    /// Lower bound for the spectrum under `bc`: Robin with `beta > 0` can
    /// dip below `inf V` by at most `beta^2`.
    pub fn spectral_lower_bound(&self, bc: BoundaryCondition) -> f64 {
        let drop = match bc {
            BoundaryCondition::Robin { beta } if beta > 0.0 => beta * beta,
            _ => 0.0,
        };
        self.infimum() - drop
    }
}

/// Left endpoint of the fiber half-line for `cusp`.
pub fn left_endpoint(cusp: &CuspEnd) -> f64 {
    if cusp.delta == 1.0 {
        2.0 * cusp.a.ln()
    } else {
        cusp.a.powf(2.0 * (1.0 - cusp.delta)) / (1.0 - cusp.delta)
    }
}

/// Robin coefficient of the Neumann-like condition: the natural boundary
/// condition `d/dy u = 0` of the cusp, transported through the unitary
/// change of functions.
pub fn default_robin_beta(cusp: &CuspEnd, n: usize) -> f64 {
    let n = n as f64;
    let d = cusp.delta;
    if d == 1.0 {
        (n * d - 1.0) / 2.0
    } else {
        (n - 1.0) * d * cusp.a.powf(2.0 * (d - 1.0)) / 2.0
    }
}

/// Root of an increasing function on `[lo, hi]` with `f(lo) <= 0 <= f(hi)`.
fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn exclusion_band(lambda: f64, s: &PruferSettings) -> f64 {
    s.rel_tol * lambda.abs().max(1.0)
}

/// Number of eigenvalues below `lambda`, without the exclusion band.
fn raw_count(f: &FiberPotential, lambda: f64, bc: BoundaryCondition, s: &PruferSettings) -> Result<usize> {
    if f.mu == 0.0 && lambda > f.essential_infimum() {
        return Err(Error::ContinuousChannel {
            lambda,
            ess_inf: f.essential_infimum(),
        });
    }
    if lambda <= f.spectral_lower_bound(bc) {
        return Ok(0);
    }
    Shooter::new(f, lambda, bc, s)?.count(lambda)
}

/// `N(lambda, L)`: eigenvalues strictly below `lambda`, with multiplicity.
///
/// Eigenvalues within `rel_tol * max(1, |lambda|)` of `lambda` are excluded.
pub fn fiber_count(
    f: &FiberPotential,
    lambda: f64,
    bc: BoundaryCondition,
    s: &PruferSettings,
) -> Result<usize> {
    raw_count(f, lambda - exclusion_band(lambda, s), bc, s)
}

/// All eigenvalues below `lambda_max`, ascending.
pub fn fiber_eigenvalues(
    f: &FiberPotential,
    lambda_max: f64,
    bc: BoundaryCondition,
    s: &PruferSettings,
) -> Result<Vec<f64>> {
    if f.mu <= 0.0 {
        return Err(Error::Precondition(
            "eigenvalue extraction needs a confining fiber (mu > 0)".into(),
        ));
    }
    let hi = lambda_max - exclusion_band(lambda_max, s);
    let lo = f.spectral_lower_bound(bc) - 1.0;
    if hi <= lo + 1.0 {
        return Ok(Vec::new());
    }
    let n_hi = raw_count(f, hi, bc, s)?;
    let mut out = Vec::with_capacity(n_hi);
    isolate(f, bc, s, (lo, 0), (hi, n_hi), &mut out)?;
    Ok(out)
}

fn isolate(
    f: &FiberPotential,
    bc: BoundaryCondition,
    s: &PruferSettings,
    (lo, n_lo): (f64, usize),
    (hi, n_hi): (f64, usize),
    out: &mut Vec<f64>,
) -> Result<()> {
    if n_hi == n_lo {
        return Ok(());
    }
    let width = hi - lo;
    if n_hi - n_lo == 1 {
        out.push(polish(f, bc, s, lo, hi, n_lo)?);
        return Ok(());
    }
    let mid = 0.5 * (lo + hi);
    if width <= s.rel_tol * mid.abs().max(1.0) {
        // Unresolvable cluster; Sturm-Liouville spectra are simple, so this
        // only happens when rel_tol is coarser than the level spacing.
        out.extend(std::iter::repeat_n(mid, n_hi - n_lo));
        return Ok(());
    }
    let n_mid = raw_count(f, mid, bc, s)?;
    isolate(f, bc, s, (lo, n_lo), (mid, n_mid), out)?;
    isolate(f, bc, s, (mid, n_mid), (hi, n_hi), out)
}

/// Locates the single eigenvalue in `(lo, hi]` with index `k`.
fn polish(f: &FiberPotential, bc: BoundaryCondition, s: &PruferSettings, mut lo: f64, mut hi: f64, k: usize) -> Result<f64> {
    let tol = |x: f64| s.rel_tol * x.abs().max(1.0);
    // The mismatch angle is continuous and increasing in lambda for a fixed
    // truncation point; its k-th crossing of a multiple of pi is the eigenvalue.
    let shooter = Shooter::new(f, hi, bc, s)?;
    let target = k as f64 * std::f64::consts::PI;
    let g = |x: f64| shooter.mismatch(x).map(|m| m - target);
    let (mut g_lo, mut g_hi) = (g(lo)?, g(hi)?);
    if g_lo <= 0.0 && g_hi >= 0.0 {
        // Illinois regula falsi.
        let mut side = 0i8;
        for _ in 0..200 {
            if hi - lo <= tol(hi) {
                break;
            }
            let mut x = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
            if !(x > lo && x < hi) {
                x = 0.5 * (lo + hi);
            }
            let gx = g(x)?;
            if gx == 0.0 {
                return Ok(x);
            }
            if gx < 0.0 {
                lo = x;
                g_lo = gx;
                if side == -1 {
                    g_hi *= 0.5;
                }
                side = -1;
            } else {
                hi = x;
                g_hi = gx;
                if side == 1 {
                    g_lo *= 0.5;
                }
                side = 1;
            }
        }
        return Ok(0.5 * (lo + hi));
    }
    // Fall back on counting bisection.
    while hi - lo > tol(hi) {
        let mid = 0.5 * (lo + hi);
        if raw_count(f, mid, bc, s)? > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

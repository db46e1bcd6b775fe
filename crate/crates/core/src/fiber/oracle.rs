//! Three-point finite-difference discretization of a fiber operator,
//! diagonalized by Sturm-sequence bisection. Shares no code with the
//! Prüfer path; the test suites use it as an independent oracle.

use super::{BoundaryCondition, FiberPotential};
use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix: diagonal and squared off-diagonal.
struct Tridiagonal {
    diag: Vec<f64>,
    off_sq: Vec<f64>,
}

impl Tridiagonal {
    /// Eigenvalues strictly below `x` (negative pivots of `T - x`).
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            let coupling = if i == 0 { 0.0 } else { self.off_sq[i - 1] / q };
            q = d - x - coupling;
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + x.abs()).max(1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin_lower(&self) -> f64 {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let l = if i > 0 { self.off_sq[i - 1].sqrt() } else { 0.0 };
                let r = if i + 1 < n { self.off_sq[i].sqrt() } else { 0.0 };
                self.diag[i] - l - r
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Eigenvalues below `lambda_max` of the finite-difference matrix on
/// `[alpha, T(lambda_max) + 8]` with `grid` nodes, Dirichlet at the far end.
pub fn fd_oracle(
    f: &FiberPotential,
    lambda_max: f64,
    bc: BoundaryCondition,
    grid: usize,
) -> Result<Vec<f64>> {
    if grid < 1000 {
        return Err(Error::Precondition(format!("oracle grid {grid} < 1000")));
    }
    let far = f
        .turning_point(lambda_max)?
        .unwrap_or_else(|| f.minimum_point())
        + 8.0;
    let a = f.alpha;
    let matrix = match bc {
        BoundaryCondition::Dirichlet => {
            let h = (far - a) / (grid + 1) as f64;
            let inv = 1.0 / (h * h);
            Tridiagonal {
                diag: (1..=grid).map(|i| 2.0 * inv + f.value(a + i as f64 * h)).collect(),
                off_sq: vec![inv * inv; grid - 1],
            }
        }
        BoundaryCondition::Robin { beta } => {
            // Ghost node u_{-1} = u_1 + 2 h beta u_0; the first row is halved
            // to symmetrize, leaving the squared coupling 2/h^4.
            let h = (far - a) / grid as f64;
            let inv = 1.0 / (h * h);
            let mut diag: Vec<f64> = (0..grid).map(|i| 2.0 * inv + f.value(a + i as f64 * h)).collect();
            diag[0] -= 2.0 * beta / h;
            let mut off_sq = vec![inv * inv; grid - 1];
            off_sq[0] = 2.0 * inv * inv;
            Tridiagonal { diag, off_sq }
        }
    };

    let n = matrix.count_below(lambda_max);
    let floor = matrix.gershgorin_lower() - 1.0;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let (mut lo, mut hi) = (out.last().copied().unwrap_or(floor), lambda_max);
        while hi - lo > 1e-14 * hi.abs().max(1.0) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if matrix.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

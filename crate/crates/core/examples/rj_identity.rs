//! The sum `R(mu) = sum [mu - mu_l]_+^{1/2}` against its integral form
//! over the cross-section counting function.

use std::f64::consts::PI;

use cusp_spectra::weyl::{identity_residual, rj_sum};
use cusp_spectra::TorusCrossSection;

fn main() -> cusp_spectra::Result<()> {
    let x = TorusCrossSection::circle(2.0 * PI, 0.5);
    for mu in [10.0, 100.0, 1000.0, 1e4] {
        println!(
            "mu {mu:>7}: R = {:>14.6}, residual {:.1e}",
            rj_sum(&x, 1.0, mu)?,
            identity_residual(&x, 1.0, mu, 1e-12)?
        );
    }
    Ok(())
}

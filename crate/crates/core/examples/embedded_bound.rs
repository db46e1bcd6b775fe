//! Bound on embedded eigenvalues of the field-free cusp through a weak
//! field, compared with the exact separable count.

use std::f64::consts::PI;

use cusp_spectra::embedded::embedded_upper_bound;
use cusp_spectra::weyl::geometric_grid;
use cusp_spectra::ManifoldModel;

fn main() -> cusp_spectra::Result<()> {
    let model = ManifoldModel::single_circle_cusp(2.0 * PI, 0.5, 1.0, 1.0);
    println!("lambda      tau      lambda'     n_ess  bound  leading");
    for lambda in geometric_grid(100.0, 1e4, 9) {
        let r = embedded_upper_bound(&model, lambda)?;
        println!(
            "{:<10.1} {:<8.4} {:<11.2} {:<6} {:<6} {:.1}",
            r.lambda,
            r.tau,
            r.shifted_lambda,
            r.n_ess.unwrap_or_default(),
            r.bound,
            r.leading
        );
    }
    Ok(())
}

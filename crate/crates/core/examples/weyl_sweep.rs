//! Counting sweep over the cusp and a fit of the Weyl remainder, for a
//! thick (`delta = 1`) and a thin (`delta = 0.75`) cusp.

use std::f64::consts::PI;

use cusp_spectra::weyl::{geometric_grid, remainder_fit, remainder_model, theta_sum, total_count_bracket};
use cusp_spectra::ManifoldModel;

fn main() -> cusp_spectra::Result<()> {
    let grid = geometric_grid(100.0, 1e4, 16);
    for delta in [1.0, 0.75] {
        let model = ManifoldModel::single_circle_cusp(2.0 * PI, 0.5, 1.0, delta);
        println!("delta = {delta}");
        for &lambda in grid.iter().step_by(3) {
            let c = total_count_bracket(&model, lambda)?;
            println!(
                "  lambda {lambda:>9.1}  [{}, {}]  leading {:>9.2}  theta {:>9.2}  r(lambda) {:>8.1}",
                c.low,
                c.high,
                c.leading,
                theta_sum(&model, 0, lambda)?,
                remainder_model(2, delta, lambda)
            );
        }
        let fit = remainder_fit(&model, &grid)?;
        println!(
            "  fit: slope {:.3}, log correction {}, constant {:.3}",
            fit.slope, fit.log_correction, fit.constant
        );
    }
    Ok(())
}

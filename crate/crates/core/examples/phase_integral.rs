//! Fiber counts against the phase integral `w(lambda) / pi`.

use std::f64::consts::PI;

use cusp_spectra::fiber::{fiber_count, BoundaryCondition, FiberPotential, PruferSettings};
use cusp_spectra::weyl::{geometric_grid, phase_integral};

fn main() -> cusp_spectra::Result<()> {
    let s = PruferSettings::default();
    for f in [FiberPotential::new(2, 1.0, 1.0, 0.0)?, FiberPotential::new(2, 0.75, 1.0, 4.0)?] {
        println!("delta = {}, mu = {}", f.delta, f.mu);
        for lambda in geometric_grid(10.0, 1e5, 9) {
            let w = phase_integral(&f, lambda)?;
            let n = fiber_count(&f, lambda, BoundaryCondition::Dirichlet, &s)?;
            println!(
                "  lambda {lambda:>10.1}  N {n:>5}  w/pi {:>10.3}  |N - w/pi|/(1 + ln lambda) {:.4}",
                w / PI,
                (n as f64 - w / PI).abs() / (1.0 + lambda.ln())
            );
        }
    }
    Ok(())
}

//! Magnetic spectrum of a flat torus: the lowest level under a weak field,
//! flux periodicity, and the Weyl count on the cross-section.

use std::f64::consts::PI;

use cusp_spectra::cross_section::{cross_count, cross_weyl_term, ground_level, mu_spectrum, perturb_c2};
use cusp_spectra::TorusCrossSection;

fn main() -> cusp_spectra::Result<()> {
    let circle = TorusCrossSection::circle(2.0 * PI, 0.5);
    println!("c2 = {}", perturb_c2(&circle));
    for tau in [1e-4, 1e-3, 1e-2, 1e-1] {
        let mu0 = ground_level(&circle, tau);
        println!("tau = {tau:e}: mu0 = {mu0:e}, mu0/tau^2 = {}", mu0 / (tau * tau));
    }

    let shifted = circle.with_field(vec![0.5 + 1.0]);
    let a = mu_spectrum(&circle, 1.0, 30.0)?;
    let b = mu_spectrum(&shifted, 1.0, 30.0)?;
    println!("levels below 30: {} and {} after a gauge shift", a.len(), b.len());

    let torus = TorusCrossSection::new(vec![2.0 * PI, 3.0], vec![0.3, 0.7]);
    for mu in [10.0, 100.0, 1000.0] {
        println!(
            "torus N({mu}) = {}, Weyl term {:.2}",
            cross_count(&torus, 1.0, mu),
            cross_weyl_term(&torus, mu)
        );
    }
    Ok(())
}

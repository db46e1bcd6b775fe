//! Eigenvalues of one fiber operator by Prüfer shooting, side by side with
//! the finite-difference oracle.

use cusp_spectra::fiber::{fd_oracle, fiber_eigenvalues, BoundaryCondition, FiberPotential, PruferSettings};

fn main() -> cusp_spectra::Result<()> {
    let f = FiberPotential::new(2, 1.0, 0.25, 0.0)?;
    let s = PruferSettings::default();
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Robin { beta: 0.5 }] {
        let prufer = fiber_eigenvalues(&f, 100.0, bc, &s)?;
        let fd = fd_oracle(&f, 100.0, bc, 1 << 15)?;
        println!("{bc:?}");
        for (k, (p, o)) in prufer.iter().zip(&fd).enumerate() {
            println!("  {k:>2}  {p:>18.10}  {o:>18.10}  {:.1e}", (p - o).abs() / p);
        }
    }
    Ok(())
}

//! Prüfer results checked against the finite-difference oracle. The frozen
//! numbers were produced by the oracle (Richardson-extrapolated over grids
//! 2^15 and 2^16) and are recomputed live where affordable.

use std::f64::consts::PI;

use cusp_spectra::fiber::{fd_oracle, fiber_eigenvalues, BoundaryCondition, FiberPotential, PruferSettings};
use cusp_spectra::weyl::{admissible_fibers, cusp_count, Boundary};
use cusp_spectra::ManifoldModel;

fn reference() -> ManifoldModel {
    ManifoldModel::single_circle_cusp(2.0 * PI, 0.5, 1.0, 1.0)
}

#[test]
fn ground_fiber_eigenvalues() {
    let f = FiberPotential::new(2, 1.0, 0.25, 0.0).unwrap();
    let ev = fiber_eigenvalues(&f, 35.0, BoundaryCondition::Dirichlet, &PruferSettings::default()).unwrap();
    let frozen = [4.665_231_043, 11.891_266_540, 20.931_002_203, 31.517_506_492];
    assert_eq!(ev.len(), frozen.len());
    for (p, o) in ev.iter().zip(frozen) {
        assert!((p - o).abs() < 1e-7 * o, "{p} vs {o}");
    }
}

#[test]
fn reference_cusp_count_at_100() {
    let m = reference();
    let fibers = admissible_fibers(&m, 0, 100.0).unwrap();
    assert_eq!(fibers.len(), 20);
    let (mut dir, mut rob) = (0, 0);
    for &(_, mu) in &fibers {
        let f = FiberPotential::for_cusp(&m.cusps[0], 2, mu).unwrap();
        dir += fd_oracle(&f, 100.0, BoundaryCondition::Dirichlet, 1 << 14).unwrap().len();
        rob += fd_oracle(&f, 100.0, BoundaryCondition::Robin { beta: 0.5 }, 1 << 14).unwrap().len();
    }
    assert_eq!((dir, rob), (40, 52));
    assert_eq!(cusp_count(&m, 0, 100.0, Boundary::Dirichlet).unwrap().low, 40);
    assert_eq!(cusp_count(&m, 0, 100.0, Boundary::Robin).unwrap().low, 52);
}

#[test]
fn thin_fiber_against_oracle() {
    let f = FiberPotential::new(3, 0.75, 1.0, 4.0).unwrap();
    let s = PruferSettings::default();
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Robin { beta: 0.75 }] {
        let p = fiber_eigenvalues(&f, 120.0, bc, &s).unwrap();
        let o = fd_oracle(&f, 120.0, bc, 1 << 15).unwrap();
        assert_eq!(p.len(), o.len());
        for (a, b) in p.iter().zip(&o) {
            assert!((a - b).abs() < 1e-5 * a, "{a} vs {b}");
        }
    }
}

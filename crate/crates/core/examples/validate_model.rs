//! Loads the bundled models and lists their validation violations.

use cusp_spectra::ManifoldModel;

fn main() -> cusp_spectra::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/models");
    for name in ["reference", "thin", "free", "integer_flux", "torus_cored"] {
        let model = ManifoldModel::from_path(format!("{dir}/{name}.json"))?;
        let violations = model.validate();
        if violations.is_empty() {
            println!(
                "{name}: valid, n = {}, |M| = {:.6}, spectral floor {:.4}",
                model.n,
                model.total_volume()?,
                model.spectral_floor()
            );
        } else {
            for v in violations {
                println!("{name}: {v}");
            }
        }
    }
    Ok(())
}

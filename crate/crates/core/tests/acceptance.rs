//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cusp_spectra::cross_section::{ground_level, mu_spectrum};
use cusp_spectra::embedded::{embedded_upper_bound, n_ess_exact};
use cusp_spectra::fiber::{
    default_robin_beta, fd_oracle, fiber_count, fiber_eigenvalues, BoundaryCondition, FiberPotential, PruferSettings,
};
use cusp_spectra::weyl::{cusp_count, geometric_grid, identity_residual, phase_integral, remainder_fit, Boundary};
use cusp_spectra::{CuspEnd, ManifoldModel, TorusCrossSection};

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn reference(delta: f64) -> ManifoldModel {
    ManifoldModel::single_circle_cusp(2.0 * PI, 0.5, 1.0, delta)
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let s = PruferSettings::default();
    let fibers = [
        (2, 1.0, 0.25, 0.0),
        (3, 1.0, 1.0, 0.0),
        (2, 1.0, 4.0, 0.0),
        (2, 0.75, 4.0, 4.0),
        (3, 0.75, 1.0, 4.0),
    ];
    let mut worst = 0.0f64;
    let mut count_mismatch = 0;
    for (n, delta, mu, alpha) in fibers {
        let f = FiberPotential::new(n, delta, mu, alpha).unwrap();
        let bc = BoundaryCondition::Dirichlet;
        let lambda_max = 400.0;
        let prufer = fiber_eigenvalues(&f, lambda_max, bc, &s).unwrap();
        if prufer.len() < 10 {
            return outcome(false, format!("only {} eigenvalues below {lambda_max}", prufer.len()));
        }
        for grid in [1 << 15, 1 << 16] {
            let fd = fd_oracle(&f, lambda_max, bc, grid).unwrap();
            for k in 0..10 {
                worst = worst.max((prufer[k] - fd[k]).abs() / prufer[k].abs());
            }
            for lambda in [10.0, 50.0, 100.0] {
                let a = fiber_count(&f, lambda, bc, &s).unwrap();
                let b = fd.iter().filter(|&&e| e < lambda).count();
                if a != b {
                    count_mismatch += 1;
                }
            }
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-4 && count_mismatch == 0 && within(t, Duration::from_secs(60)),
        format!("max rel dev {worst:.2e} (<= 1e-4), count mismatches {count_mismatch}, {t:.1?} (< 60s)"),
    )
}

fn titchmarsh() -> Outcome {
    let start = Instant::now();
    let s = PruferSettings::default();
    let f = FiberPotential::new(2, 1.0, 1.0, 0.0).unwrap();
    let worst = geometric_grid(10.0, 1e5, 30)
        .into_iter()
        .map(|l| {
            let n = fiber_count(&f, l, BoundaryCondition::Dirichlet, &s).unwrap() as f64;
            (n - phase_integral(&f, l).unwrap() / PI).abs() / (1.0 + l.ln())
        })
        .fold(0.0, f64::max);
    let t = start.elapsed();
    outcome(
        worst <= 2.0 && within(t, Duration::from_secs(60)),
        format!("max |N - w/pi|/(1 + ln lambda) = {worst:.4} (<= 2), {t:.1?} (< 60s)"),
    )
}

fn interlacing() -> Outcome {
    let s = PruferSettings::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let shapes = [(2usize, 1.0), (3, 1.0), (2, 0.75), (3, 0.75), (3, 0.5)];
    let mut violations = 0;
    for _ in 0..200 {
        let (n, delta) = shapes[rng.random_range(0..shapes.len())];
        let a = rng.random_range(0.5..2.0);
        let mu = rng.random_range(0.05..20.0);
        let lambda = rng.random_range(0.5..500.0);
        let cusp = CuspEnd::new(TorusCrossSection::circle(2.0 * PI, 0.5), a, delta);
        let f = FiberPotential::for_cusp(&cusp, n, mu).unwrap();
        let robin = BoundaryCondition::Robin {
            beta: default_robin_beta(&cusp, n),
        };
        let d = fiber_count(&f, lambda, BoundaryCondition::Dirichlet, &s).unwrap();
        let r = fiber_count(&f, lambda, robin, &s).unwrap();
        if !(d <= r && r <= d + 1) {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{violations} violations of N_D <= N_R <= N_D + 1 over 200 pairs"))
}

fn weyl_leading_order() -> Outcome {
    let start = Instant::now();
    let m = reference(1.0);
    let count = cusp_count(&m, 0, 1e4, Boundary::Dirichlet).unwrap().low;
    let ratio = count as f64 / (1e4 / 2.0);
    let fit = remainder_fit(&m, &geometric_grid(100.0, 1e4, 16)).unwrap();
    let t = start.elapsed();
    outcome(
        (0.9..=1.1).contains(&ratio) && fit.defined && fit.slope <= 0.6 && within(t, Duration::from_secs(600)),
        format!(
            "N(1e4)/(lambda/2) = {ratio:.4} in [0.9, 1.1], fitted slope {:.3} (<= 0.6, log_correction {}), {t:.1?}",
            fit.slope, fit.log_correction
        ),
    )
}

fn regime_switch() -> Outcome {
    let grid = geometric_grid(100.0, 1e4, 16);
    let thin = remainder_fit(&reference(0.75), &grid).unwrap();
    let thick = remainder_fit(&reference(1.0), &grid).unwrap();
    // Context only: the field-free cusp has a channel at mu = 0.
    let control = remainder_fit(&reference(1.0).without_field(), &grid).unwrap();
    let thin_ok = thin.defined && (0.57..=0.76).contains(&thin.slope) && !thin.log_correction;
    let thick_ok = thick.defined && thick.log_correction;
    outcome(
        thin_ok && thick_ok,
        format!(
            "delta=0.75: slope {:.3} in [0.57, 0.76], log_correction {} (want false); delta=1: log_correction {} (want true), slope {:.3}; field-free control: log_correction {}, slope {:.3}",
            thin.slope, thin.log_correction, thick.log_correction, thick.slope, control.log_correction, control.slope
        ),
    )
}

fn rj_identity() -> Outcome {
    let x = TorusCrossSection::circle(2.0 * PI, 0.5);
    let worst = [10.0, 100.0, 1000.0]
        .iter()
        .map(|&mu| identity_residual(&x, 1.0, mu, 1e-12).unwrap())
        .fold(0.0, f64::max);
    outcome(worst <= 1e-10, format!("max identity residual {worst:.2e} (<= 1e-10)"))
}

fn perturbation_law() -> Outcome {
    let x = TorusCrossSection::circle(2.0 * PI, 0.5);
    let worst = geometric_grid(1e-4, 1e-1, 25)
        .into_iter()
        .map(|tau| (ground_level(&x, tau) / (tau * tau) - 0.25).abs())
        .fold(0.0, f64::max);
    let torus = TorusCrossSection::new(vec![2.0 * PI, 2.0 * PI], vec![1.0, 2.0]);
    let h = 1e-4;
    let first = |tau: f64| mu_spectrum(&torus, tau, 1.0).unwrap().values[0];
    let c2 = (first(h) - 2.0 * first(0.0) + first(-h)) / (2.0 * h * h);
    outcome(
        worst <= 1e-12 && (c2 - 5.0).abs() <= 1e-6,
        format!("max |mu0/tau^2 - 0.25| = {worst:.2e} (<= 1e-12); torus c2 = {c2:.9} (5 within 1e-6)"),
    )
}

fn gauge_invariance() -> Outcome {
    let m = reference(1.0);
    let shifted = ManifoldModel::single_circle_cusp(2.0 * PI, 0.5 + 1.0, 1.0, 1.0);
    let differing = geometric_grid(1.0, 2000.0, 20)
        .into_iter()
        .filter(|&l| {
            cusp_count(&m, 0, l, Boundary::Dirichlet).unwrap().low
                != cusp_count(&shifted, 0, l, Boundary::Dirichlet).unwrap().low
        })
        .count();
    let mut below_floor = 0;
    for a in [1.0, 0.5, 2.0] {
        let m = ManifoldModel::single_circle_cusp(2.0 * PI, 0.5, a, 1.0);
        let floor = ground_level(&m.cusps[0].cross_section, 1.0) * m.cusps[0].boundary_weight().min(1.0);
        for frac in [0.1, 0.5, 0.9, 1.0] {
            below_floor += cusp_count(&m, 0, frac * floor, Boundary::Dirichlet).unwrap().low;
        }
    }
    let free = FiberPotential::new(2, 1.0, 0.0, 0.0).unwrap();
    let floor_count = fiber_count(&free, 0.2, BoundaryCondition::Dirichlet, &PruferSettings::default()).unwrap();
    outcome(
        differing == 0 && below_floor == 0 && floor_count == 0,
        format!(
            "{differing} of 20 lambdas differ under the gauge shift; {below_floor} eigenvalues below the magnetic floor; free channel at 0.2 counts {floor_count}"
        ),
    )
}

fn embedded_bound() -> Outcome {
    let start = Instant::now();
    let m = reference(1.0);
    let free = m.without_field();
    let mut violations = 0;
    let mut k = f64::NEG_INFINITY;
    for l in geometric_grid(100.0, 1e4, 16) {
        let report = embedded_upper_bound(&m, l).unwrap();
        let exact = n_ess_exact(&free, l).unwrap();
        if exact > report.bound || report.n_ess != Some(exact) {
            violations += 1;
        }
        let ratio = exact as f64 / (l / 2.0);
        k = k.max((ratio - 1.0) / (l.powf(-0.5) * l.ln()));
    }
    let t = start.elapsed();
    outcome(
        violations == 0 && within(t, Duration::from_secs(900)),
        format!("{violations} violations of n_ess <= bound over 16 points; fitted K = {k:.4}; {t:.1?} (< 15 min)"),
    )
}

fn determinism() -> Outcome {
    let model = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models/reference.json");
    let sweep = || {
        Command::new(env!("CARGO_BIN_EXE_cusp-spectra"))
            .args(["sweep", model.to_str().unwrap(), "--lambda-min", "100", "--lambda-max", "10000", "--points", "16"])
            .output()
            .unwrap()
    };
    let (a, b) = (sweep(), sweep());
    let ok = a.status.success() && b.status.success() && a.stdout == b.stdout && !a.stdout.is_empty();
    outcome(ok, format!("two sweeps: {} and {} bytes, identical: {}", a.stdout.len(), b.stdout.len(), a.stdout == b.stdout))
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("titchmarsh bound", titchmarsh),
        ("dirichlet/robin interlacing", interlacing),
        ("weyl leading order", weyl_leading_order),
        ("remainder regime switch", regime_switch),
        ("rj identity", rj_identity),
        ("perturbation law", perturbation_law),
        ("flux/gauge invariance", gauge_invariance),
        ("embedded bound", embedded_bound),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {:<28} {}  {}", i + 1, name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

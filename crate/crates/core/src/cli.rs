//! Batch command-line front end: one model file and one verb per run,
//! emitting a CSV or JSON table.
//!
//! Exit status is 0 on success, 1 when the model cannot be loaded or fails
//! validation, 2 on any other error. Errors are written to stderr as a
//! single JSON object.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::cross_section::{ground_level, mu_spectrum};
use crate::embedded::embedded_upper_bound;
use crate::error::{Error, Result};
use crate::fiber::{default_robin_beta, fiber_count, fiber_eigenvalues, BoundaryCondition, FiberPotential, PruferSettings};
use crate::model::{ManifoldModel, DEFAULT_FLUX_TOL};
use crate::weyl::{
    fit_remainder, geometric_grid, identity_residual, linear_grid, phase_integral, remainder_model, theta_sum,
    total_count_bracket, FitReport, PHASE_TOL,
};

const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Verb {
    Validate,
    Count,
    Sweep,
    Fiber,
    Phase,
    Perturb,
    Embedded,
    RjIdentity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum BoundaryArg {
    #[default]
    Dirichlet,
    Robin,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "cusp-spectra", version, about = "Spectra of magnetic Laplacians on manifolds with cusps")]
pub struct Command {
    pub verb: Verb,
    /// Model file (JSON).
    pub model: PathBuf,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub lambda_min: Option<f64>,
    #[arg(long)]
    pub lambda_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub cusp: usize,
    #[arg(long)]
    pub ell: Option<usize>,
    #[arg(long)]
    pub tau_max: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = BoundaryArg::Dirichlet)]
    pub boundary: BoundaryArg,
    /// Use a linear instead of a geometric grid.
    #[arg(long)]
    pub linear: bool,
}

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Int(u64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

/// Shortest round-trip representation, in scientific notation for very
/// small or very large magnitudes.
fn format_float(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

#[derive(Debug, Default)]
struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    fit: Option<std::result::Result<FitReport, String>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            ..Self::default()
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(csv_error)?;
        }
        let mut out = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        match &self.fit {
            Some(Ok(f)) => writeln!(
                out,
                "# fit slope={} log_correction={} constant={} rss={} defined={} points={}",
                f.slope, f.log_correction, f.constant, f.rss, f.defined, f.points
            )?,
            Some(Err(reason)) => writeln!(out, "# fit unavailable: {reason}")?,
            None => {}
        }
        Ok(out)
    }

    fn to_json(&self, meta: Map<String, Value>) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut meta = meta;
        match &self.fit {
            Some(Ok(f)) => {
                meta.insert("fit".into(), serde_json::to_value(f).unwrap_or(Value::Null));
            }
            Some(Err(reason)) => {
                meta.insert("fit".into(), json!({ "unavailable": reason }));
            }
            None => {}
        }
        json!({ "rows": rows, "meta": meta })
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let command = match Command::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let (model, hash) = match load(&command.model) {
        Ok(m) => m,
        Err(e) => return report(stderr, &e, 1),
    };
    match execute(&command, &model, &hash) {
        Ok(bytes) => {
            let written = match &command.out {
                Some(path) => std::fs::write(path, &bytes),
                None => stdout.write_all(&bytes),
            };
            match written {
                Ok(()) => 0,
                Err(e) => report(stderr, &Error::Io(e), 2),
            }
        }
        Err(e @ Error::InvalidModel(_)) => report(stderr, &e, 1),
        Err(e) => report(stderr, &e, 2),
    }
}

fn report(stderr: &mut dyn Write, e: &Error, status: i32) -> i32 {
    let kind = match e {
        Error::InvalidModel(_) => "invalid-model",
        Error::Json(_) => "json",
        Error::Io(_) => "io",
        Error::Domain { .. } => "domain",
        Error::ContinuousChannel { .. } => "continuous-channel",
        Error::Resource { .. } => "resource",
        Error::Precondition(_) => "precondition",
        Error::DegenerateGrid(_) => "degenerate-grid",
        Error::StepLimit(_) => "step-limit",
    };
    let mut obj = json!({ "error": kind, "message": e.to_string() });
    if let Error::InvalidModel(v) = e {
        obj["violations"] = serde_json::to_value(v).unwrap_or(Value::Null);
    }
    let _ = writeln!(stderr, "{obj}");
    status
}

fn load(path: &Path) -> Result<(ManifoldModel, String)> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    let hash = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8_lossy(&bytes);
    Ok((ManifoldModel::from_json_str(&text)?, hash))
}

fn execute(c: &Command, model: &ManifoldModel, hash: &str) -> Result<Vec<u8>> {
    let violations = model.validate();
    let table = if c.verb == Verb::Validate {
        let mut t = Table::new(&["kind", "cusp", "message"]);
        for v in &violations {
            let kind = serde_json::to_value(v.kind)?.as_str().unwrap_or_default().to_string();
            t.push(vec![
                Cell::Text(kind),
                v.cusp.map_or(Cell::Empty, Cell::from),
                Cell::Text(v.message.clone()),
            ]);
        }
        if !violations.is_empty() {
            return Err(Error::InvalidModel(violations));
        }
        t
    } else {
        if !violations.is_empty() {
            return Err(Error::InvalidModel(violations));
        }
        dispatch(c, model)?
    };
    match c.format {
        Format::Csv => table.to_csv(),
        Format::Json => {
            let s = PruferSettings::default();
            let meta = json!({
                "model_hash": hash,
                "tool_version": env!("CARGO_PKG_VERSION"),
                "tolerances": {
                    "rel_tol": s.rel_tol,
                    "angle_tol": s.angle_tol,
                    "t_margin": s.t_margin,
                    "phase_tol": PHASE_TOL,
                    "flux_tol": DEFAULT_FLUX_TOL,
                },
            });
            let Value::Object(meta) = meta else { unreachable!() };
            let mut out = serde_json::to_vec_pretty(&table.to_json(meta))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::Precondition(format!("--{flag} is required for this verb")))
}

fn grid(c: &Command) -> Result<Vec<f64>> {
    if let (None, None, Some(l)) = (c.lambda_min, c.lambda_max, c.lambda) {
        return Ok(vec![l]);
    }
    let lo = require(c.lambda_min, "lambda-min")?;
    let hi = require(c.lambda_max, "lambda-max")?;
    let points = c.points.unwrap_or(16);
    if !(lo < hi) || points < 2 {
        return Err(Error::DegenerateGrid(format!(
            "need lambda-min < lambda-max and at least 2 points (got [{lo}, {hi}], {points})"
        )));
    }
    if c.linear {
        Ok(linear_grid(lo, hi, points))
    } else if lo > 0.0 {
        Ok(geometric_grid(lo, hi, points))
    } else {
        Err(Error::DegenerateGrid("geometric grids need lambda-min > 0".into()))
    }
}

fn boundary_condition(c: &Command, model: &ManifoldModel) -> BoundaryCondition {
    match c.boundary {
        BoundaryArg::Dirichlet => BoundaryCondition::Dirichlet,
        BoundaryArg::Robin => BoundaryCondition::Robin {
            beta: default_robin_beta(&model.cusps[c.cusp], model.n),
        },
    }
}

fn check_cusp(c: &Command, model: &ManifoldModel) -> Result<()> {
    if c.cusp >= model.cusps.len() {
        return Err(Error::Precondition(format!(
            "--cusp {} out of range ({} cusps)",
            c.cusp,
            model.cusps.len()
        )));
    }
    Ok(())
}

/// The fiber over the `ell`-th cross-section eigenvalue of cusp `c.cusp`.
fn selected_fiber(c: &Command, model: &ManifoldModel) -> Result<FiberPotential> {
    check_cusp(c, model)?;
    let ell = require(c.ell, "ell")?;
    let cusp = &model.cusps[c.cusp];
    let mut cutoff = cusp.cross_section.first_free_gap().max(1.0) * (ell as f64 + 2.0);
    loop {
        let spectrum = mu_spectrum(&cusp.cross_section, 1.0, cutoff)?;
        if let Some(&mu) = spectrum.values.get(ell) {
            return FiberPotential::for_cusp(cusp, model.n, mu);
        }
        cutoff *= 2.0;
    }
}

const COUNT_COLUMNS: [&str; 8] = [
    "lambda",
    "count_low",
    "count_high",
    "leading",
    "residual_low",
    "residual_high",
    "theta_sum",
    "r_model",
];

fn count_row(model: &ManifoldModel, lambda: f64) -> Result<Vec<Cell>> {
    let r = total_count_bracket(model, lambda)?;
    let theta = (0..model.cusps.len()).try_fold(0.0, |acc, j| Ok::<_, Error>(acc + theta_sum(model, j, lambda)?))?;
    Ok(vec![
        lambda.into(),
        r.low.into(),
        r.high.into(),
        r.leading.into(),
        r.residual_low().into(),
        r.residual_high().into(),
        theta.into(),
        remainder_model(model.n, model.delta(), lambda).into(),
    ])
}

fn dispatch(c: &Command, model: &ManifoldModel) -> Result<Table> {
    match c.verb {
        Verb::Validate => unreachable!("handled before dispatch"),
        Verb::Count => {
            let mut t = Table::new(&COUNT_COLUMNS);
            t.push(count_row(model, require(c.lambda, "lambda")?)?);
            Ok(t)
        }
        Verb::Sweep => {
            let lambdas = grid(c)?;
            let mut t = Table::new(&COUNT_COLUMNS);
            let mut residuals = Vec::with_capacity(lambdas.len());
            for &l in &lambdas {
                let row = count_row(model, l)?;
                if let Cell::Float(r) = row[4] {
                    residuals.push(r);
                }
                t.push(row);
            }
            t.fit = Some(if model.core.volume > 0.0 {
                Err("core surrogate counts are not exact".into())
            } else {
                fit_remainder(&lambdas, &residuals).map_err(|e| e.to_string())
            });
            Ok(t)
        }
        Verb::Fiber => {
            let f = selected_fiber(c, model)?;
            let bc = boundary_condition(c, model);
            let ev = fiber_eigenvalues(&f, require(c.lambda, "lambda")?, bc, &PruferSettings::default())?;
            let mut t = Table::new(&["index", "mu", "eigenvalue"]);
            for (k, e) in ev.into_iter().enumerate() {
                t.push(vec![k.into(), f.mu.into(), e.into()]);
            }
            Ok(t)
        }
        Verb::Phase => {
            let f = selected_fiber(c, model)?;
            let bc = boundary_condition(c, model);
            let s = PruferSettings::default();
            let mut t = Table::new(&["lambda", "w", "count", "deviation"]);
            for l in grid(c)? {
                let w = phase_integral(&f, l)?;
                let n = fiber_count(&f, l, bc, &s)?;
                t.push(vec![
                    l.into(),
                    w.into(),
                    n.into(),
                    (n as f64 - w / std::f64::consts::PI).abs().into(),
                ]);
            }
            Ok(t)
        }
        Verb::Perturb => {
            check_cusp(c, model)?;
            let tau_max = require(c.tau_max, "tau-max")?;
            if !(tau_max > 0.0) {
                return Err(Error::Precondition("--tau-max must be positive".into()));
            }
            let x = &model.cusps[c.cusp].cross_section;
            let mut t = Table::new(&["tau", "mu0", "mu0_over_tau2"]);
            for tau in geometric_grid(tau_max * 1e-3, tau_max, c.points.unwrap_or(10).max(2)) {
                let mu0 = ground_level(x, tau);
                t.push(vec![tau.into(), mu0.into(), (mu0 / (tau * tau)).into()]);
            }
            Ok(t)
        }
        Verb::Embedded => {
            let mut t = Table::new(&[
                "lambda",
                "rho",
                "tau",
                "c_a",
                "shifted_lambda",
                "n_ess",
                "bound",
                "leading",
                "r0",
            ]);
            for l in grid(c)? {
                let r = embedded_upper_bound(model, l)?;
                t.push(vec![
                    r.lambda.into(),
                    r.rho.into(),
                    r.tau.into(),
                    r.c_a.into(),
                    r.shifted_lambda.into(),
                    r.n_ess.map_or(Cell::Empty, Cell::from),
                    r.bound.into(),
                    r.leading.into(),
                    r.r0.into(),
                ]);
            }
            Ok(t)
        }
        Verb::RjIdentity => {
            check_cusp(c, model)?;
            let x = &model.cusps[c.cusp].cross_section;
            let mut t = Table::new(&["mu", "rj_sum", "residual"]);
            for mu in grid(c)? {
                t.push(vec![
                    mu.into(),
                    crate::weyl::rj_sum(x, 1.0, mu)?.into(),
                    identity_residual(x, 1.0, mu, IDENTITY_TOL)?.into(),
                ]);
            }
            Ok(t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_model(json: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(json.as_bytes()).unwrap();
        f
    }

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["cusp-spectra"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    const REFERENCE: &str = r#"{"dimension": 2, "cusps": [{"a": 1.0, "delta": 1.0, "lengths": [6.283185307179586], "magnetic": [0.5]}]}"#;
    const INTEGER: &str = r#"{"dimension": 2, "cusps": [{"a": 1.0, "delta": 1.0, "lengths": [6.283185307179586], "magnetic": [1.0]}]}"#;

    #[test]
    fn validate_statuses() {
        let good = write_model(REFERENCE);
        let (code, out, _) = call(&["validate", good.path().to_str().unwrap()]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "kind,cusp,message");
        let bad = write_model(INTEGER);
        let (code, _, err) = call(&["validate", bad.path().to_str().unwrap()]);
        assert_eq!(code, 1);
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["violations"][0]["kind"], "integer-flux");
        assert!(err.contains("integer flux"));
    }

    #[test]
    fn computation_errors_exit_two() {
        let good = write_model(REFERENCE);
        let (code, _, err) = call(&["count", good.path().to_str().unwrap()]);
        assert_eq!(code, 2);
        assert!(err.contains("precondition"));
        let (code, _, _) = call(&["count", "/nonexistent/model.json", "--lambda", "10"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn perturb_ratio_is_quarter() {
        let good = write_model(REFERENCE);
        let (code, out, _) = call(&["perturb", good.path().to_str().unwrap(), "--tau-max", "0.01", "--points", "10"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "tau,mu0,mu0_over_tau2");
        assert_eq!(lines.len(), 11);
        for l in &lines[1..] {
            let ratio: f64 = l.split(',').nth(2).unwrap().parse().unwrap();
            assert!((ratio - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn json_has_rows_and_meta() {
        let good = write_model(REFERENCE);
        let (code, out, _) = call(&["count", good.path().to_str().unwrap(), "--lambda", "50", "--format", "json"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["rows"].as_array().unwrap().len(), 1);
        assert_eq!(v["meta"]["model_hash"].as_str().unwrap().len(), 64);
        assert!(v["meta"]["tolerances"]["rel_tol"].is_number());
    }
}

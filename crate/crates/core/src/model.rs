//! Geometric data of a manifold with cuspidal ends.
//!
//! A model is a compact core (represented only through its volume, which
//! feeds a Weyl surrogate) glued to `J >= 1` cusps. Cusp `j` is
//! `X_j x (a_j^2, inf)` with metric `y^{-2 delta_j} (h_j + dy^2)`, where
//! `X_j` is a flat torus carrying the constant one-form
//! `A_j = sum_k omega_k dx_k`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for deciding whether a holonomy `omega_k L_k` lies in `2 pi Z`.
pub const DEFAULT_FLUX_TOL: f64 = 1e-12;

/// Flat torus `R^{n-1} / (L_1 Z x ... x L_{n-1} Z)` with a constant magnetic one-form.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusCrossSection {
    pub lengths: Vec<f64>,
    pub magnetic: Vec<f64>,
}

impl TorusCrossSection {
    pub fn new(lengths: Vec<f64>, magnetic: Vec<f64>) -> Self {
        Self { lengths, magnetic }
    }

    /// Circle of length `length` with field coefficient `omega`.
    pub fn circle(length: f64, omega: f64) -> Self {
        Self::new(vec![length], vec![omega])
    }

    /// Dimension of the torus, `n - 1`.
    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }

    /// Holonomy of `A` around the k-th generating circle, `omega_k L_k`.
    pub fn holonomy(&self, k: usize) -> f64 {
        self.magnetic[k] * self.lengths[k]
    }

    pub fn flux_nontrivial(&self) -> bool {
        self.flux_nontrivial_with_tol(DEFAULT_FLUX_TOL)
    }

    /// True iff some holonomy `omega_k L_k` is farther than `tol` from `2 pi Z`.
    pub fn flux_nontrivial_with_tol(&self, tol: f64) -> bool {
        (0..self.dim()).any(|k| {
            let h = self.holonomy(k);
            (h - 2.0 * PI * (h / (2.0 * PI)).round()).abs() > tol
        })
    }

    /// `sup_X |A|^2 = sum_k omega_k^2` for the flat metric.
    pub fn field_norm_sq(&self) -> f64 {
        self.magnetic.iter().map(|w| w * w).sum()
    }

    /// First nonzero eigenvalue of the field-free Laplacian, `min_k (2 pi / L_k)^2`.
    pub fn first_free_gap(&self) -> f64 {
        self.lengths
            .iter()
            .map(|l| (2.0 * PI / l).powi(2))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn with_field(&self, magnetic: Vec<f64>) -> Self {
        Self::new(self.lengths.clone(), magnetic)
    }

    pub fn scaled_field(&self, tau: f64) -> Self {
        self.with_field(self.magnetic.iter().map(|w| tau * w).collect())
    }
}

/// One cuspidal end.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspEnd {
    pub cross_section: TorusCrossSection,
    /// The cusp starts at `y = a^2`.
    pub a: f64,
    pub delta: f64,
}

impl CuspEnd {
    pub fn new(cross_section: TorusCrossSection, a: f64, delta: f64) -> Self {
        Self {
            cross_section,
            a,
            delta,
        }
    }

    /// `a^{4 delta}`: the factor by which the fiber potential at the cusp
    /// boundary exceeds the cross-section eigenvalue.
    pub fn boundary_weight(&self) -> f64 {
        self.a.powf(4.0 * self.delta)
    }
}

/// Weyl surrogate for the compact core `M_0`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompactCoreSurrogate {
    pub volume: f64,
    /// Coefficient of the `lambda^{(n-1)/2}` error band around the core Weyl term.
    pub remainder_coeff: f64,
}

impl CompactCoreSurrogate {
    /// `volume = 0`: pure cusp ensemble, all counts exact.
    pub fn empty() -> Self {
        Self::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldModel {
    pub n: usize,
    pub core: CompactCoreSurrogate,
    pub cusps: Vec<CuspEnd>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    DimensionTooSmall,
    NoCusps,
    LengthCount,
    MagneticCount,
    NonFinite,
    NonPositiveLength,
    NonPositiveA,
    DeltaTooSmall,
    DeltaTooLarge,
    IntegerFlux,
    NegativeCoreVolume,
    NegativeRemainderCoeff,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Offending cusp index, when the violation is local to one cusp.
    pub cusp: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.cusp {
            Some(j) => write!(f, "cusp {j}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl ManifoldModel {
    pub fn new(n: usize, core: CompactCoreSurrogate, cusps: Vec<CuspEnd>) -> Self {
        Self { n, core, cusps }
    }

    /// Surface (n = 2) with an empty core and one circle cusp.
    pub fn single_circle_cusp(length: f64, omega: f64, a: f64, delta: f64) -> Self {
        Self::new(
            2,
            CompactCoreSurrogate::empty(),
            vec![CuspEnd::new(
                TorusCrossSection::circle(length, omega),
                a,
                delta,
            )],
        )
    }

    /// Magnetic mode is requested as soon as any field coefficient is nonzero.
    pub fn is_magnetic(&self) -> bool {
        self.cusps
            .iter()
            .any(|c| c.cross_section.magnetic.iter().any(|&w| w != 0.0))
    }

    pub fn validate(&self) -> Vec<Violation> {
        validate_model(self)
    }

    pub fn validated(self) -> Result<Self> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidModel(v))
        }
    }

    /// `delta = min_j delta_j`.
    pub fn delta(&self) -> f64 {
        self.cusps
            .iter()
            .map(|c| c.delta)
            .fold(f64::INFINITY, f64::min)
    }

    /// `min_j a_j^{4 delta_j}`.
    pub fn min_boundary_weight(&self) -> f64 {
        self.cusps
            .iter()
            .map(CuspEnd::boundary_weight)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn total_volume(&self) -> Result<f64> {
        total_volume(self)
    }

    pub fn spectral_floor(&self) -> f64 {
        spectral_floor(self)
    }

    /// Same geometry with every field coefficient multiplied by `tau`.
    pub fn scaled_field(&self, tau: f64) -> Self {
        let cusps = self
            .cusps
            .iter()
            .map(|c| CuspEnd::new(c.cross_section.scaled_field(tau), c.a, c.delta))
            .collect();
        Self::new(self.n, self.core, cusps)
    }

    pub fn without_field(&self) -> Self {
        self.scaled_field(0.0)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(s)?;
        Ok(file.into())
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelFile::from(self)).expect("model serializes")
    }
}

/// All violated invariants of `model`; empty when the model is valid.
pub fn validate_model(model: &ManifoldModel) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |kind, cusp, message: String| out.push(Violation { kind, cusp, message });
    let n = model.n;

    if n < 2 {
        push(
            ViolationKind::DimensionTooSmall,
            None,
            format!("dimension {n} < 2"),
        );
    }
    if model.cusps.is_empty() {
        push(ViolationKind::NoCusps, None, "no cusp ends (J = 0)".into());
    }
    if !(model.core.volume.is_finite() && model.core.volume >= 0.0) {
        push(
            ViolationKind::NegativeCoreVolume,
            None,
            format!("core volume {} is not a nonnegative real", model.core.volume),
        );
    }
    if !(model.core.remainder_coeff.is_finite() && model.core.remainder_coeff >= 0.0) {
        push(
            ViolationKind::NegativeRemainderCoeff,
            None,
            format!(
                "core remainder coefficient {} is not a nonnegative real",
                model.core.remainder_coeff
            ),
        );
    }

    let magnetic = model.is_magnetic();
    for (j, cusp) in model.cusps.iter().enumerate() {
        let x = &cusp.cross_section;
        let want = n.saturating_sub(1);
        if x.lengths.len() != want {
            push(
                ViolationKind::LengthCount,
                Some(j),
                format!("{} torus lengths given, dimension needs {want}", x.lengths.len()),
            );
        }
        if x.magnetic.len() != x.lengths.len() {
            push(
                ViolationKind::MagneticCount,
                Some(j),
                format!(
                    "{} field coefficients for {} torus directions",
                    x.magnetic.len(),
                    x.lengths.len()
                ),
            );
        }
        let all = x
            .lengths
            .iter()
            .chain(&x.magnetic)
            .chain([&cusp.a, &cusp.delta]);
        if all.into_iter().any(|v| !v.is_finite()) {
            push(ViolationKind::NonFinite, Some(j), "non-finite parameter".into());
            continue;
        }
        if x.lengths.iter().any(|&l| l <= 0.0) {
            push(
                ViolationKind::NonPositiveLength,
                Some(j),
                "torus lengths must be strictly positive".into(),
            );
        }
        if cusp.a <= 0.0 {
            push(
                ViolationKind::NonPositiveA,
                Some(j),
                format!("a = {} must be positive", cusp.a),
            );
        }
        if n >= 1 && cusp.delta <= 1.0 / n as f64 {
            push(
                ViolationKind::DeltaTooSmall,
                Some(j),
                format!("delta = {} <= 1/n = {}", cusp.delta, 1.0 / n as f64),
            );
        }
        if cusp.delta > 1.0 {
            push(
                ViolationKind::DeltaTooLarge,
                Some(j),
                format!("delta = {} > 1", cusp.delta),
            );
        }
        if magnetic && x.magnetic.len() == x.lengths.len() && !x.flux_nontrivial() {
            push(
                ViolationKind::IntegerFlux,
                Some(j),
                "integer flux: every holonomy omega_k L_k lies in 2 pi Z".into(),
            );
        }
    }
    out
}

/// Volume of a cusp, `|X| / ((delta n - 1) a^{2 (delta n - 1)})`.
pub fn cusp_volume(cusp: &CuspEnd, n: usize) -> Result<f64> {
    let e = cusp.delta * n as f64 - 1.0;
    if e <= 0.0 {
        return Err(Error::Precondition(format!(
            "cusp volume diverges: delta n - 1 = {e} <= 0"
        )));
    }
    Ok(cusp.cross_section.volume() / (e * cusp.a.powf(2.0 * e)))
}

pub fn total_volume(model: &ManifoldModel) -> Result<f64> {
    model
        .cusps
        .iter()
        .try_fold(model.core.volume, |acc, c| Ok(acc + cusp_volume(c, model.n)?))
}

/// Bottom of the essential spectrum of the field-free Laplacian.
pub fn spectral_floor(model: &ManifoldModel) -> f64 {
    if model.delta() < 1.0 {
        0.0
    } else {
        let m = model.n as f64 - 1.0;
        m * m / 4.0
    }
}

// On-disk model format.

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    dimension: usize,
    #[serde(default = "CompactCoreSurrogate::empty")]
    core: CompactCoreSurrogate,
    cusps: Vec<CuspFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CuspFile {
    a: f64,
    delta: f64,
    lengths: Vec<f64>,
    magnetic: Vec<f64>,
}

impl From<ModelFile> for ManifoldModel {
    fn from(f: ModelFile) -> Self {
        let cusps = f
            .cusps
            .into_iter()
            .map(|c| CuspEnd::new(TorusCrossSection::new(c.lengths, c.magnetic), c.a, c.delta))
            .collect();
        ManifoldModel::new(f.dimension, f.core, cusps)
    }
}

impl From<&ManifoldModel> for ModelFile {
    fn from(m: &ManifoldModel) -> Self {
        ModelFile {
            dimension: m.n,
            core: m.core,
            cusps: m
                .cusps
                .iter()
                .map(|c| CuspFile {
                    a: c.a,
                    delta: c.delta,
                    lengths: c.cross_section.lengths.clone(),
                    magnetic: c.cross_section.magnetic.clone(),
                })
                .collect(),
        }
    }
}

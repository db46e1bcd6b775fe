//! Spectral computations for magnetic Laplacians on finite-volume manifolds
//! with cusps whose cross-sections are flat tori.
//!
//! A cusp `X x (a^2, inf)` with metric `y^{-2 delta}(h + dy^2)` separates
//! into half-line Schrödinger operators, one per eigenvalue of the
//! cross-section's magnetic Laplacian. The crate counts their eigenvalues,
//! brackets the global counting function, fits its Weyl remainder and
//! bounds embedded eigenvalues of the field-free Laplacian.
//!
//! - [`model`]: geometry, validation, volumes.
//! - [`cross_section`]: torus spectra under a scaled constant field.
//! - [`fiber`]: fiber potentials and Prüfer eigenvalue counting.
//! - [`weyl`]: cusp counts, phase integrals, brackets, remainder fits.
//! - [`embedded`]: the weak-field bound on embedded eigenvalues.
//! - [`cli`]: the batch command-line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod cross_section;
pub mod embedded;
pub mod error;
pub mod fiber;
pub mod model;
pub mod weyl;

mod ode;
mod quad;

pub use error::{Error, Result};
pub use model::{CompactCoreSurrogate, CuspEnd, ManifoldModel, TorusCrossSection};

//! Structure-preserving integrators for soundproof flow models.
//!
//! The crate discretizes Boussinesq, anelastic and pseudo-incompressible
//! dynamics on triangular meshes of a channel that is periodic in `x` and
//! bounded by free-slip walls in `z`. Transport of the thermodynamic scalar
//! uses a Cayley map; momentum uses a Crank–Nicolson update solved by a
//! projected fixed-point iteration.
//!
//! Module map:
//! - [`mesh`]: primal mesh, circumcentric dual, perturbation, validation.
//! - [`operators`]: fluxes, flat, vorticity, divergence, gradient,
//!   advection, forcing, and a dense bracket oracle for testing.
//! - [`models`]: weights, reference profiles, energy and mass.
//! - [`stepper`]: Cayley transport, Poisson projection, momentum update.
//! - [`diagnostics`]: probes, spectra, conservation series, symmetry.
//! - [`harness`]: run configuration, test-case initializers, orchestration.

// `!(x > 0.0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod mesh;
pub mod models;
pub mod operators;
pub mod stepper;

pub use error::{Error, Result};
pub use mesh::{DualGeometry, Mesh, MeshQualityReport, Point};
pub use models::{ModelKind, ModelSpec, Profile};
pub use operators::{CellField, EdgeField, VertexField, WeightSet};
pub use stepper::{State, StepReport, StepperConfig};

//! Discrete weighted calculus on the primal/dual mesh pair.
//!
//! Edge quantities are stored in each edge's orientation (`cells[0]` to
//! `cells[1]`). The flux matrix `A` is never assembled; [`Flux`] holds its
//! two nonzero entries per edge.

mod calculus;
mod dump;
mod dynamics;
mod fields;
pub mod oracle;
mod weights;

pub use calculus::{
    divergence, flat, flux_from_velocity, gradient, kinetic_density, theta_tilde, velocity_from_stream, vorticity, Flux,
};
pub use dump::{dump_cell_field, dump_edge_field, dump_vertex_field};
pub use dynamics::{advection, forcing, Forcing};
pub use fields::{CellField, EdgeField, VertexField};
pub use weights::WeightSet;

use crate::error::{Error, Result};

pub(crate) fn require_positive(theta: &CellField) -> Result<()> {
    match theta.iter().position(|&t| !(t > 0.0)) {
        Some(i) => Err(Error::Domain(format!("potential temperature {} in cell {i} is not positive", theta[i]))),
        None => Ok(()),
    }
}

use super::{CellField, EdgeField, VertexField, WeightSet};
use crate::mesh::{DualGeometry, FanStep, Mesh};

/// The two nonzero flux-matrix entries of every edge.
#[derive(Clone, Debug, PartialEq)]
pub struct Flux {
    /// `A(i, j)` for the stored orientation `i -> j`.
    pub forward: Vec<f64>,
    /// `A(j, i)`.
    pub backward: Vec<f64>,
}

impl Flux {
    /// Entry `A(c, other)` where the step leaves cell `c` through `edge`.
    pub fn get(&self, step: FanStep) -> f64 {
        if step.sign > 0.0 {
            self.forward[step.edge]
        } else {
            self.backward[step.edge]
        }
    }

    /// `sum_j A(i, j)` for every cell.
    pub fn row_sums(&self, mesh: &Mesh) -> Vec<f64> {
        let mut s = vec![0.0; mesh.n_cells()];
        for (e, edge) in mesh.edges.iter().enumerate() {
            s[edge.cells[0]] += self.forward[e];
            s[edge.cells[1]] += self.backward[e];
        }
        s
    }
}

/// `A(i, j) = -f_ij rho_ij V_{i->j} / (2 Omega^sigma_i)`.
pub fn flux_from_velocity(v: &EdgeField, w: &WeightSet, mesh: &Mesh) -> Flux {
    let (forward, backward) = mesh
        .edges
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let q = edge.length * w.rho[e] * v[e];
            (-q / (2.0 * w.volumes[edge.cells[0]]), q / (2.0 * w.volumes[edge.cells[1]]))
        })
        .unzip();
    Flux { forward, backward }
}

/// Flat of the flux: `A_flat(i -> j) = -h_ij sigma_ij V_{i->j}`.
pub fn flat(v: &EdgeField, w: &WeightSet, dual: &DualGeometry) -> EdgeField {
    EdgeField::from_fn(v.len(), |e| -dual.h[e] * w.sigma[e] * v[e])
}

/// Counterclockwise circulation of a one-form around every vertex.
/// Wall vertices sum their open fan only.
pub fn vorticity(x: &EdgeField, dual: &DualGeometry) -> VertexField {
    VertexField::from_fn(dual.fans.len(), |n| dual.fans[n].steps.iter().map(|s| x.along(s.edge, s.sign)).sum())
}

/// `div_i = (1/Omega_i) sum_j rho_ij f_ij V_{i->j}`.
pub fn divergence(v: &EdgeField, w: &WeightSet, mesh: &Mesh) -> CellField {
    let mut d = vec![0.0; mesh.n_cells()];
    for (e, edge) in mesh.edges.iter().enumerate() {
        let q = w.rho[e] * edge.length * v[e];
        d[edge.cells[0]] += q;
        d[edge.cells[1]] -= q;
    }
    for (x, a) in d.iter_mut().zip(&mesh.areas) {
        *x /= a;
    }
    CellField::from_vec(d)
}

/// `(grad P)_{i->j} = (P_j - P_i) / (sigma_ij h_ij)`.
pub fn gradient(p: &CellField, w: &WeightSet, mesh: &Mesh, dual: &DualGeometry) -> EdgeField {
    EdgeField::from_fn(mesh.n_edges(), |e| {
        let [i, j] = mesh.edges[e].cells;
        (p[j] - p[i]) / (w.sigma[e] * dual.h[e])
    })
}

/// `k_i = (1/2) sum_j A_flat(i, j) A(i, j)`.
pub fn kinetic_density(v: &EdgeField, w: &WeightSet, mesh: &Mesh, dual: &DualGeometry) -> CellField {
    let mut k = vec![0.0; mesh.n_cells()];
    for (e, edge) in mesh.edges.iter().enumerate() {
        let q = 0.25 * dual.h[e] * w.sigma[e] * edge.length * w.rho[e] * v[e] * v[e];
        k[edge.cells[0]] += q / w.volumes[edge.cells[0]];
        k[edge.cells[1]] += q / w.volumes[edge.cells[1]];
    }
    CellField::from_vec(k)
}

/// Discretely divergence-free velocity from a vertex stream function:
/// `V_{i->j} = (psi(e+) - psi(e-)) / (f_ij rho_ij)`. Divergence-free
/// provided `psi` is constant along each wall.
pub fn velocity_from_stream(psi: &VertexField, w: &WeightSet, mesh: &Mesh) -> EdgeField {
    EdgeField::from_fn(mesh.n_edges(), |e| {
        let edge = &mesh.edges[e];
        (psi[edge.ends[1]] - psi[edge.ends[0]]) / (edge.length * w.rho[e])
    })
}

/// `Theta-tilde_ij = (1/2)(1/Theta_i + 1/Theta_j)`.
pub fn theta_tilde(theta: &CellField, mesh: &Mesh) -> EdgeField {
    EdgeField::from_fn(mesh.n_edges(), |e| {
        let [i, j] = mesh.edges[e].cells;
        0.5 * (1.0 / theta[i] + 1.0 / theta[j])
    })
}

//! Dense evaluation of the discrete Euler–Poincaré residual.
//!
//! Test-scale only. The flux matrix, the variational derivative with respect
//! to the flux, and the commutator are all formed as dense `N x N` arrays.
//! Entries of the one-form between cells that are not neighbors are filled
//! from the fan rule
//! `X(a, b) + X(b, c) + X(c, a) = K^e_b * circulation_e(X)`
//! for consecutive counterclockwise cells `a, b, c` around vertex `e`.

use super::{CellField, EdgeField, Forcing, WeightSet};
use crate::error::{Error, Result};
use crate::mesh::{DualGeometry, Mesh};
use crate::models::ModelKind;

/// Largest mesh the oracle accepts.
pub const MAX_CELLS: usize = 200;

#[derive(Clone, Debug)]
pub struct BracketOracle {
    pub n: usize,
    /// Dense flux matrix, row-major, with `A_ii = -sum_j A_ij`.
    pub flux: Vec<f64>,
    /// Dense `dl/dA` after fan completion, row-major.
    pub derivative: Vec<f64>,
    /// `([X Omega, A] Omega^-1)_ij`, row-major.
    pub commutator: Vec<f64>,
    /// Advection implied on each edge: `-(R_ij + S_j - S_i) / (sigma h)`.
    pub advection: EdgeField,
    /// Forcing implied on each edge by the scalar term.
    pub forcing: EdgeField,
}

pub fn dense_bracket_oracle(
    v: &EdgeField,
    theta: &CellField,
    model: Forcing<'_>,
    w: &WeightSet,
    mesh: &Mesh,
    dual: &DualGeometry,
) -> Result<BracketOracle> {
    let n = mesh.n_cells();
    if n > MAX_CELLS {
        return Err(Error::invalid(format!("dense oracle limited to {MAX_CELLS} cells, mesh has {n}")));
    }
    let at = |i: usize, j: usize| i * n + j;
    let om = &w.volumes;

    // Flux matrix straight from the defining formula.
    let mut a = vec![0.0; n * n];
    let mut adjacent = vec![false; n * n];
    for (e, edge) in mesh.edges.iter().enumerate() {
        let [i, j] = edge.cells;
        let q = edge.length * w.rho[e] * v[e];
        a[at(i, j)] = -q / (2.0 * om[i]);
        a[at(j, i)] = q / (2.0 * om[j]);
        adjacent[at(i, j)] = true;
        adjacent[at(j, i)] = true;
    }
    for i in 0..n {
        let s: f64 = (0..n).map(|j| a[at(i, j)]).sum();
        a[at(i, i)] = -s;
    }

    // Flat: skew part of 2 Omega_i (h / f) A_ij, with Omega_i the plain area.
    let mut flat = vec![0.0; n * n];
    for (e, edge) in mesh.edges.iter().enumerate() {
        let [i, j] = edge.cells;
        let r = dual.h[e] / edge.length;
        let mij = 2.0 * mesh.areas[i] * r * a[at(i, j)];
        let mji = 2.0 * mesh.areas[j] * r * a[at(j, i)];
        flat[at(i, j)] = 0.5 * (mij - mji);
        flat[at(j, i)] = 0.5 * (mji - mij);
    }
    let mut kin = vec![0.0; n];
    for i in 0..n {
        kin[i] = 0.5 * (0..n).map(|j| flat[at(i, j)] * a[at(i, j)]).sum::<f64>();
    }

    let kind = model.kind();
    let mut x = flat.clone();
    if kind == ModelKind::PseudoIncompressible {
        super::require_positive(theta)?;
        for i in 0..n {
            for j in 0..n {
                x[at(i, j)] *= 0.5 * (1.0 / theta[i] + 1.0 / theta[j]);
            }
        }
    }

    // Fan completion of non-neighbor entries.
    let mut filled = vec![false; n * n];
    for (vtx, fan) in dual.fans.iter().enumerate() {
        let cells = &fan.cells;
        let m = cells.len();
        let circ: f64 = fan.steps.iter().enumerate().map(|(k, _)| x[at(cells[k], cells[(k + 1) % m])]).sum();
        let triples = if fan.closed { m } else { m.saturating_sub(2) };
        for k in 0..triples {
            let (p, b, c) = (cells[k], cells[(k + 1) % m], cells[(k + 2) % m]);
            if p == c || adjacent[at(p, c)] {
                continue;
            }
            let kb = dual.coefficient(mesh, b, vtx);
            let xcp = kb * circ - x[at(p, b)] - x[at(b, c)];
            if filled[at(c, p)] {
                if (x[at(c, p)] - xcp).abs() > 1e-12 * xcp.abs().max(1e-300) {
                    return Err(Error::invalid(format!("cells {p} and {c} meet at two vertices; mesh too small")));
                }
                continue;
            }
            x[at(c, p)] = xcp;
            x[at(p, c)] = -xcp;
            filled[at(c, p)] = true;
            filled[at(p, c)] = true;
        }
    }

    // R = [X Omega, A] Omega^-1.
    let mut r = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += x[at(i, k)] * om[k] * a[at(k, j)] - a[at(i, k)] * x[at(k, j)] * om[j];
            }
            r[at(i, j)] = s / om[j];
        }
    }
    let s: Vec<f64> = (0..n).map(|i| (0..n).map(|k| x[at(i, k)] * a[at(i, k)]).sum()).collect();

    let dtheta: Vec<f64> = match model {
        Forcing::Buoyancy { z } => z.iter().map(|z| -z).collect(),
        Forcing::Exner { exner, cp } => exner.iter().map(|p| -cp * p).collect(),
        Forcing::PseudoIncompressible { z, g } => {
            (0..n).map(|i| (g * z[i] - kin[i]) / (theta[i] * theta[i])).collect()
        }
    };

    let scale = |e: usize| w.sigma[e] * dual.h[e];
    let advection = EdgeField::from_fn(mesh.n_edges(), |e| {
        let [i, j] = mesh.edges[e].cells;
        -(r[at(i, j)] + s[j] - s[i]) / scale(e)
    });
    let forcing = EdgeField::from_fn(mesh.n_edges(), |e| {
        let [i, j] = mesh.edges[e].cells;
        -0.5 * (dtheta[i] + dtheta[j]) * (theta[j] - theta[i]) / scale(e)
    });
    Ok(BracketOracle { n, flux: a, derivative: x, commutator: r, advection, forcing })
}

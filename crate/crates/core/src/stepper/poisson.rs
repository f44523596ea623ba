use super::linalg::{cg, CgOptions, SolveStats};
use crate::error::{Error, Result};
use crate::mesh::{DualGeometry, Mesh};
use crate::operators::{CellField, EdgeField, WeightSet};

/// The pressure operator `div(rho-hat s grad P)` in symmetric form.
///
/// With `c_e = rho_e f_e s_e / (sigma_e h_e)` and
/// `(K P)_i = sum_j c_ij (P_i - P_j)`, the projection equation
/// `div(rho-hat s grad P) = rhs` reads `K P = -Omega rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonOperator {
    pub coeff: Vec<f64>,
    pub diagonal: Vec<f64>,
    cells: Vec<[usize; 2]>,
    areas: Vec<f64>,
}

impl PoissonOperator {
    /// `scale` multiplies the gradient per edge (`1 / Theta-tilde` in
    /// pseudo-incompressible mode).
    pub fn assemble(mesh: &Mesh, dual: &DualGeometry, w: &WeightSet, scale: Option<&EdgeField>) -> Self {
        let coeff: Vec<f64> = mesh
            .edges
            .iter()
            .enumerate()
            .map(|(e, edge)| {
                let s = scale.map_or(1.0, |s| s[e]);
                w.rho[e] * edge.length * s / (w.sigma[e] * dual.h[e])
            })
            .collect();
        let mut diagonal = vec![0.0; mesh.n_cells()];
        for (edge, c) in mesh.edges.iter().zip(&coeff) {
            diagonal[edge.cells[0]] += c;
            diagonal[edge.cells[1]] += c;
        }
        PoissonOperator { coeff, diagonal, cells: mesh.edges.iter().map(|e| e.cells).collect(), areas: mesh.areas.clone() }
    }

    pub fn apply(&self, p: &[f64], out: &mut [f64]) {
        for (o, (d, x)) in out.iter_mut().zip(self.diagonal.iter().zip(p)) {
            *o = d * x;
        }
        for (&[i, j], c) in self.cells.iter().zip(&self.coeff) {
            out[i] -= c * p[j];
            out[j] -= c * p[i];
        }
    }

    /// Nonzero entries `(row, col, value)` of `K`.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut t: Vec<_> = self.diagonal.iter().enumerate().map(|(i, &d)| (i, i, d)).collect();
        for (&[i, j], &c) in self.cells.iter().zip(&self.coeff) {
            t.push((i, j, -c));
            t.push((j, i, -c));
        }
        t
    }

    /// Solves `div(rho-hat s grad P) = rhs` with `sum_i Omega_i P_i = 0`.
    /// The rhs is made compatible by removing its area-weighted mean.
    /// `warm` is an optional initial guess.
    pub fn solve(&self, rhs: &CellField, warm: Option<&CellField>, tol: f64, max_iter: usize) -> Result<(CellField, SolveStats)> {
        let n = rhs.len();
        if n != self.areas.len() {
            return Err(Error::invalid(format!("rhs has {n} cells, operator {}", self.areas.len())));
        }
        let total: f64 = self.areas.iter().sum();
        let mean: f64 = rhs.iter().zip(&self.areas).map(|(r, a)| r * a).sum::<f64>() / total;
        let b: Vec<f64> = rhs.iter().zip(&self.areas).map(|(r, a)| -a * (r - mean)).collect();
        let mut x = warm.map_or_else(|| vec![0.0; n], |p| p.values().to_vec());
        let opt = CgOptions { weights: None, diagonal: Some(&self.diagonal), tol, max_iter, what: "pressure solve" };
        let stats = cg(|p, out| self.apply(p, out), &b, &mut x, &opt)?;
        let shift: f64 = x.iter().zip(&self.areas).map(|(p, a)| p * a).sum::<f64>() / total;
        x.iter_mut().for_each(|p| *p -= shift);
        Ok((CellField::from_vec(x), stats))
    }
}

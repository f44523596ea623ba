use super::{flat, flux_from_velocity, kinetic_density, require_positive, theta_tilde, vorticity};
use super::{CellField, EdgeField, WeightSet};
use crate::error::{Error, Result};
use crate::mesh::{DualGeometry, Mesh, StencilSide};
use crate::models::ModelKind;

/// Model-specific data entering the thermodynamic forcing.
#[derive(Clone, Copy, Debug)]
pub enum Forcing<'a> {
    /// Boussinesq: `F = (Z_i + Z_j)/(2h) (B_j - B_i)`. With this sign the
    /// profile `B = -N^2 z` is a stable equilibrium and `B` matches an
    /// anelastic `Theta = -B` under `Pi = -z`.
    Buoyancy { z: &'a CellField },
    /// Anelastic: `F = c_p (Pi_i + Pi_j)/(2 sigma h) (Theta_j - Theta_i)`.
    Exner { exner: &'a CellField, cp: f64 },
    /// Pseudo-incompressible, with `q = (g Z - k) / Theta^2`:
    /// `F = -(q_i + q_j)/(2 sigma h) (Theta_j - Theta_i)`.
    PseudoIncompressible { z: &'a CellField, g: f64 },
}

impl Forcing<'_> {
    pub fn kind(&self) -> ModelKind {
        match self {
            Forcing::Buoyancy { .. } => ModelKind::Boussinesq,
            Forcing::Exner { .. } => ModelKind::Anelastic,
            Forcing::PseudoIncompressible { .. } => ModelKind::PseudoIncompressible,
        }
    }
}

/// Edge advection term `Adv(V)` for the three models.
///
/// For edge `(i, j)` with ends `e-`, `e+`:
/// `Adv = -(w(e-) T(e-) - w(e+) T(e+)) / (sigma h)` where `w` is the vertex
/// circulation of `A_flat` (scaled by `Theta-tilde` in pseudo-incompressible
/// mode) and `T(e) = K^e_i A(i, i_e) + K^e_j A(j, j_e)` collects the fluxes
/// through the other edges of `i` and `j` meeting `e`. Wall sides add zero.
pub fn advection(
    v: &EdgeField,
    theta: Option<&CellField>,
    w: &WeightSet,
    mesh: &Mesh,
    dual: &DualGeometry,
    kind: ModelKind,
) -> Result<EdgeField> {
    let mut x = flat(v, w, dual);
    if kind == ModelKind::PseudoIncompressible {
        let theta = theta.ok_or_else(|| Error::Domain("pseudo-incompressible advection needs theta".into()))?;
        require_positive(theta)?;
        let tt = theta_tilde(theta, mesh);
        for (xe, t) in x.values_mut().iter_mut().zip(tt.iter()) {
            *xe *= t;
        }
    }
    let omega = vorticity(&x, dual);
    let a = flux_from_velocity(v, w, mesh);
    let transfer = |s: &StencilSide| {
        let ai = s.from_i.map_or(0.0, |st| a.get(st));
        let aj = s.from_j.map_or(0.0, |st| a.get(st));
        omega[s.vertex] * (s.k_i * ai + s.k_j * aj)
    };
    Ok(EdgeField::from_fn(mesh.n_edges(), |e| {
        let st = &dual.stencils[e];
        -(transfer(&st.minus) - transfer(&st.plus)) / (w.sigma[e] * dual.h[e])
    }))
}

/// Thermodynamic forcing on every edge. `v` is needed only in
/// pseudo-incompressible mode.
pub fn forcing(
    model: Forcing<'_>,
    theta: &CellField,
    v: Option<&EdgeField>,
    w: &WeightSet,
    mesh: &Mesh,
    dual: &DualGeometry,
) -> Result<EdgeField> {
    let coeff: Box<dyn Fn(usize, usize) -> f64> = match model {
        Forcing::Buoyancy { z } => Box::new(move |i, j| 0.5 * (z[i] + z[j])),
        Forcing::Exner { exner, cp } => Box::new(move |i, j| cp * (0.5 * (exner[i] + exner[j]))),
        Forcing::PseudoIncompressible { z, g } => {
            require_positive(theta)?;
            let v = v.ok_or_else(|| Error::Domain("pseudo-incompressible forcing needs velocity".into()))?;
            let k = kinetic_density(v, w, mesh, dual);
            let q: Vec<f64> = (0..mesh.n_cells()).map(|i| (g * z[i] - k[i]) / (theta[i] * theta[i])).collect();
            Box::new(move |i, j| -0.5 * (q[i] + q[j]))
        }
    };
    Ok(EdgeField::from_fn(mesh.n_edges(), |e| {
        let [i, j] = mesh.edges[e].cells;
        coeff(i, j) * (theta[j] - theta[i]) / (w.sigma[e] * dual.h[e])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_dual, build_regular, perturb_interior};

    #[test]
    fn zero_velocity_gives_zero_advection() {
        let m = build_regular(6, 4, 3.0, 2.0).unwrap();
        let d = build_dual(&m).unwrap();
        let w = WeightSet::uniform(&m);
        let adv = advection(&EdgeField::zeros(m.n_edges()), None, &w, &m, &d, ModelKind::Boussinesq).unwrap();
        assert_eq!(adv.max_abs(), 0.0);
    }

    #[test]
    fn forcing_trivial_cases() {
        let m = perturb_interior(&build_regular(8, 6, 3.0, 2.0).unwrap(), 0.2, 2).unwrap();
        let d = build_dual(&m).unwrap();
        let w = WeightSet::uniform(&m);
        let z = CellField::from_fn(m.n_cells(), |i| m.centroids[i].z);
        let b = CellField::from_vec(vec![0.7; m.n_cells()]);
        let fb = forcing(Forcing::Buoyancy { z: &z }, &b, None, &w, &m, &d).unwrap();
        assert_eq!(fb.max_abs(), 0.0);

        let theta = CellField::from_fn(m.n_cells(), |i| 1.0 + 0.1 * (i as f64).sin());
        let zero = CellField::zeros(m.n_cells());
        let v = EdgeField::zeros(m.n_edges());
        let fp = forcing(Forcing::PseudoIncompressible { z: &zero, g: 9.81 }, &theta, Some(&v), &w, &m, &d).unwrap();
        assert_eq!(fp.max_abs(), 0.0);

        let exner = CellField::from_vec(vec![2.5; m.n_cells()]);
        let fa = forcing(Forcing::Exner { exner: &exner, cp: 3.0 }, &theta, None, &w, &m, &d).unwrap();
        for (e, edge) in m.edges.iter().enumerate() {
            let [i, j] = edge.cells;
            let want = 3.0 * 2.5 / (w.sigma[e] * d.h[e]) * (theta[j] - theta[i]);
            assert!((fa[e] - want).abs() < 1e-13 * want.abs().max(1.0));
        }
    }

    #[test]
    fn pseudo_incompressible_requires_positive_theta() {
        let m = build_regular(4, 4, 1.0, 1.0).unwrap();
        let d = build_dual(&m).unwrap();
        let w = WeightSet::uniform(&m);
        let mut theta = CellField::from_vec(vec![1.0; m.n_cells()]);
        theta[3] = 0.0;
        let v = EdgeField::zeros(m.n_edges());
        let r = advection(&v, Some(&theta), &w, &m, &d, ModelKind::PseudoIncompressible);
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}

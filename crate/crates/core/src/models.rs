//! Model specifications, reference profiles, energy and mass.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{DualGeometry, Mesh};
use crate::operators::{kinetic_density, require_positive, CellField, EdgeField, Forcing, WeightSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Boussinesq,
    Anelastic,
    PseudoIncompressible,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Boussinesq => "boussinesq",
            ModelKind::Anelastic => "anelastic",
            ModelKind::PseudoIncompressible => "pseudo-incompressible",
        })
    }
}

/// A vertical reference profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Profile {
    /// `v`.
    Const(f64),
    /// `a * exp(k z)`.
    Exp { a: f64, k: f64 },
    /// `(1 - b z / Lz)^p`.
    Pow { b: f64, p: f64 },
}

impl Profile {
    pub fn eval(&self, z: f64, lz: f64) -> f64 {
        match *self {
            Profile::Const(v) => v,
            Profile::Exp { a, k } => a * (k * z).exp(),
            Profile::Pow { b, p } => (1.0 - b * z / lz).powf(p),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Const(v) => write!(f, "const({v:?})"),
            Profile::Exp { a, k } => write!(f, "exp({a:?}, {k:?})"),
            Profile::Pow { b, p } => write!(f, "pow({b:?}, {p:?})"),
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad profile {s:?}; expected const(v), exp(a, k) or pow(b, p)"));
        let s = s.trim();
        let open = s.find('(').ok_or_else(bad)?;
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let args: Vec<f64> = inner
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        match (s[..open].trim(), args.as_slice()) {
            ("const", &[v]) => Ok(Profile::Const(v)),
            ("exp", &[a, k]) => Ok(Profile::Exp { a, k }),
            ("pow", &[b, p]) => Ok(Profile::Pow { b, p }),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for Profile {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Profile> for String {
    fn from(p: Profile) -> String {
        p.to_string()
    }
}

/// How cell integrals of reference profiles are evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrature {
    /// Profile at the centroid times the area.
    #[default]
    Midpoint,
    /// 16-point Gauss–Legendre in `z` against the triangle's width
    /// function; exact to rounding for the smooth profiles used here.
    Exact,
}

/// Integrates `f(z)` over every triangle.
pub fn weighted_volumes(mesh: &Mesh, f: impl Fn(f64) -> f64, quad: Quadrature) -> Vec<f64> {
    match quad {
        Quadrature::Midpoint => mesh.areas.iter().zip(&mesh.centroids).map(|(a, c)| a * f(c.z)).collect(),
        Quadrature::Exact => {
            let (nodes, weights) = gauss_legendre(16);
            let seg = |lo: f64, hi: f64, g: &dyn Fn(f64) -> f64| {
                if hi <= lo {
                    return 0.0;
                }
                let (m, r) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                nodes.iter().zip(&weights).map(|(x, w)| w * r * g(m + r * x)).sum::<f64>()
            };
            (0..mesh.n_cells())
                .map(|t| {
                    let mut z: Vec<f64> = mesh.corners(t).iter().map(|p| p.z).collect();
                    z.sort_by(f64::total_cmp);
                    let (z0, z1, z2) = (z[0], z[1], z[2]);
                    if z2 <= z0 {
                        return 0.0;
                    }
                    let peak = 2.0 * mesh.areas[t] / (z2 - z0);
                    let up = |s: f64| f(s) * peak * (s - z0) / (z1 - z0);
                    let down = |s: f64| f(s) * peak * (z2 - s) / (z2 - z1);
                    seg(z0, z1, &up) + seg(z1, z2, &down)
                })
                .collect()
        }
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
            let step = p1 / dp;
            t -= step;
            if step.abs() < 1e-16 {
                let dp = {
                    let (mut q0, mut q1) = (1.0, t);
                    for k in 2..=n {
                        let q2 = ((2 * k - 1) as f64 * t * q1 - (k - 1) as f64 * q0) / k as f64;
                        q0 = q1;
                        q1 = q2;
                    }
                    n as f64 * (t * q1 - q0) / (t * t - 1.0)
                };
                w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
                break;
            }
        }
        x[i] = t;
    }
    (x, w)
}

/// Everything a model contributes beyond the prognostic state.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub weights: WeightSet,
    /// Cell-center heights `Z_i`.
    pub z: CellField,
    /// Exner reference `Pi_i` (anelastic only).
    pub exner: Option<CellField>,
    /// Reference density and potential temperature sampled at cell centers.
    pub rho: CellField,
    pub theta_ref: CellField,
    pub g: f64,
    pub cp: f64,
}

impl ModelSpec {
    /// The forcing description consumed by the operators.
    pub fn forcing_model(&self) -> Forcing<'_> {
        match self.kind {
            ModelKind::Boussinesq => Forcing::Buoyancy { z: &self.z },
            ModelKind::Anelastic => Forcing::Exner { exner: self.exner.as_ref().expect("anelastic exner"), cp: self.cp },
            ModelKind::PseudoIncompressible => Forcing::PseudoIncompressible { z: &self.z, g: self.g },
        }
    }
}

fn heights(mesh: &Mesh) -> CellField {
    CellField::from_fn(mesh.n_cells(), |i| mesh.centroids[i].z)
}

fn check_positive(name: &str, p: &Profile, mesh: &Mesh) -> Result<()> {
    let zs = mesh.centroids.iter().map(|c| c.z).chain([0.0, mesh.lz]);
    for z in zs {
        let v = p.eval(z, mesh.lz);
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::invalid(format!("{name} profile {p} is {v} at z = {z}")));
        }
    }
    Ok(())
}

fn sample(mesh: &Mesh, p: &Profile) -> CellField {
    CellField::from_fn(mesh.n_cells(), |i| p.eval(mesh.centroids[i].z, mesh.lz))
}

/// Boussinesq: plain areas; the scalar is buoyancy.
pub fn make_boussinesq(mesh: &Mesh) -> ModelSpec {
    let ones = CellField::from_vec(vec![1.0; mesh.n_cells()]);
    ModelSpec {
        kind: ModelKind::Boussinesq,
        weights: WeightSet::uniform(mesh),
        z: heights(mesh),
        exner: None,
        rho: ones.clone(),
        theta_ref: ones,
        g: 1.0,
        cp: 1.0,
    }
}

/// Anelastic: volumes weighted by `rho`; `exner` gives the Exner reference.
pub fn make_anelastic(
    mesh: &Mesh,
    rho: Profile,
    theta: Profile,
    exner: impl Fn(f64) -> f64,
    cp: f64,
    g: f64,
    quad: Quadrature,
) -> Result<ModelSpec> {
    check_positive("density", &rho, mesh)?;
    check_positive("potential temperature", &theta, mesh)?;
    let lz = mesh.lz;
    let vol = weighted_volumes(mesh, |z| rho.eval(z, lz), quad);
    Ok(ModelSpec {
        kind: ModelKind::Anelastic,
        weights: WeightSet::from_volumes(mesh, vol),
        z: heights(mesh),
        exner: Some(CellField::from_fn(mesh.n_cells(), |i| exner(mesh.centroids[i].z))),
        rho: sample(mesh, &rho),
        theta_ref: sample(mesh, &theta),
        g,
        cp,
    })
}

/// Pseudo-incompressible: volumes weighted by `rho * theta`.
pub fn make_pseudo_incompressible(
    mesh: &Mesh,
    rho: Profile,
    theta: Profile,
    g: f64,
    quad: Quadrature,
) -> Result<ModelSpec> {
    check_positive("density", &rho, mesh)?;
    check_positive("potential temperature", &theta, mesh)?;
    let lz = mesh.lz;
    let vol = weighted_volumes(mesh, |z| rho.eval(z, lz) * theta.eval(z, lz), quad);
    Ok(ModelSpec {
        kind: ModelKind::PseudoIncompressible,
        weights: WeightSet::from_volumes(mesh, vol),
        z: heights(mesh),
        exner: None,
        rho: sample(mesh, &rho),
        theta_ref: sample(mesh, &theta),
        g,
        cp: 1.0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Energies {
    pub kinetic: f64,
    pub potential: f64,
    pub total: f64,
}

/// Kinetic, potential and total energy of `(v, theta)`.
///
/// Potential parts: `sum Omega B Z` (Boussinesq), `c_p sum Omega^rho Pi Theta`
/// (anelastic), `g sum Omega^{rho theta} Z / Theta` (pseudo-incompressible).
pub fn energies(
    v: &EdgeField,
    theta: &CellField,
    model: &ModelSpec,
    mesh: &Mesh,
    dual: &DualGeometry,
) -> Result<Energies> {
    let w = &model.weights;
    let k = kinetic_density(v, w, mesh, dual);
    let n = mesh.n_cells();
    let (kinetic, potential) = match model.kind {
        ModelKind::Boussinesq => (
            (0..n).map(|i| w.volumes[i] * k[i]).sum(),
            (0..n).map(|i| mesh.areas[i] * theta[i] * model.z[i]).sum::<f64>(),
        ),
        ModelKind::Anelastic => {
            let exner = model.exner.as_ref().expect("anelastic exner");
            (
                (0..n).map(|i| w.volumes[i] * k[i]).sum(),
                model.cp * (0..n).map(|i| w.volumes[i] * exner[i] * theta[i]).sum::<f64>(),
            )
        }
        ModelKind::PseudoIncompressible => {
            require_positive(theta)?;
            (
                (0..n).map(|i| w.volumes[i] * k[i] / theta[i]).sum(),
                model.g * (0..n).map(|i| w.volumes[i] * model.z[i] / theta[i]).sum::<f64>(),
            )
        }
    };
    Ok(Energies { kinetic, potential, total: kinetic + potential })
}

/// `sum_i Omega^sigma_i Theta_i`.
pub fn mass(theta: &CellField, model: &ModelSpec) -> f64 {
    model.weights.volumes.iter().zip(theta.iter()).map(|(w, t)| w * t).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_dual, build_regular, perturb_interior};

    #[test]
    fn profile_text_round_trip() {
        for p in [Profile::Const(1.5), Profile::Exp { a: 1.0, k: -8.0 }, Profile::Pow { b: 0.3, p: 2.5 }] {
            assert_eq!(p.to_string().parse::<Profile>().unwrap(), p);
        }
        assert!("exp(1)".parse::<Profile>().is_err());
        assert!("cosh(1, 2)".parse::<Profile>().is_err());
    }

    #[test]
    fn bubble_density_profile() {
        let p = Profile::Pow { b: 0.3, p: 2.5 };
        assert_eq!(p.eval(0.0, 1e4), 1.0);
        assert!((p.eval(1e4, 1e4) - 0.7f64.powf(2.5)).abs() < 1e-15);
    }

    #[test]
    fn unit_profiles_reproduce_boussinesq_weights() {
        let m = build_regular(6, 4, 3.0, 2.0).unwrap();
        let a = make_anelastic(&m, Profile::Const(1.0), Profile::Const(1.0), |z| z, 1.0, 1.0, Quadrature::Midpoint)
            .unwrap();
        assert_eq!(a.weights, make_boussinesq(&m).weights);
    }

    #[test]
    fn decaying_density_weights() {
        let m = build_regular(6, 8, 3.0, 1.0).unwrap();
        let a = make_anelastic(
            &m,
            Profile::Exp { a: 1.0, k: -1.0 },
            Profile::Const(1.0),
            |_| 1.0,
            1.0,
            1.0,
            Quadrature::Midpoint,
        )
        .unwrap();
        let w = &a.weights;
        assert!(w.sigma.iter().all(|&s| s >= 1.0));
        for i in 0..m.n_cells() {
            for j in 0..m.n_cells() {
                if m.centroids[j].z > m.centroids[i].z + 1e-12 {
                    assert!(w.mean[j] < w.mean[i]);
                }
            }
        }
    }

    #[test]
    fn exact_quadrature_matches_closed_form() {
        let m = perturb_interior(&build_regular(5, 6, 2.0, 1.0).unwrap(), 0.2, 1).unwrap();
        let v = weighted_volumes(&m, |z| (-2.0 * z).exp(), Quadrature::Exact);
        let total: f64 = v.iter().sum();
        let want = 2.0 * (1.0 - (-2.0f64).exp()) / 2.0;
        assert!((total - want).abs() < 1e-13);
        let lin = weighted_volumes(&m, |z| 3.0 * z + 1.0, Quadrature::Exact);
        let mid = weighted_volumes(&m, |z| 3.0 * z + 1.0, Quadrature::Midpoint);
        for (a, b) in lin.iter().zip(&mid) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_nonpositive_profile() {
        let m = build_regular(4, 4, 1.0, 1.0).unwrap();
        let r = make_pseudo_incompressible(&m, Profile::Pow { b: 1.5, p: 1.0 }, Profile::Const(1.0), 1.0, Quadrature::Midpoint);
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn hydrostatic_exner_relation() {
        // Pi = (g/cp) exp(-(z + c)) with theta = exp(z + c).
        let m = build_regular(4, 40, 1.0, 1.0).unwrap();
        let c: f64 = -1.0;
        let model = make_anelastic(
            &m,
            Profile::Exp { a: 1.0, k: -1.0 },
            Profile::Exp { a: c.exp(), k: 1.0 },
            |z| (-(z + c)).exp(),
            1.0,
            1.0,
            Quadrature::Midpoint,
        )
        .unwrap();
        let exner = model.exner.as_ref().unwrap();
        for e in &m.edges {
            let [i, j] = e.cells;
            let dz = model.z[j] - model.z[i];
            if dz.abs() < 1e-9 {
                continue;
            }
            let mid = 0.5 * (model.z[i] + model.z[j]);
            let th = (mid + c).exp();
            let r = model.cp * th * (exner[j] - exner[i]) / dz;
            assert!((r + model.g).abs() < 1e-3);
        }
    }

    #[test]
    fn energy_conventions() {
        let m = build_regular(6, 4, 3.0, 2.0).unwrap();
        let d = build_dual(&m).unwrap();
        let v = EdgeField::zeros(m.n_edges());
        let b = make_boussinesq(&m);
        let e0 = energies(&v, &CellField::zeros(m.n_cells()), &b, &m, &d).unwrap();
        assert_eq!(e0.total, 0.0);

        let theta = CellField::from_fn(m.n_cells(), |i| 0.3 + (i as f64 * 0.37).sin());
        let minus = CellField::from_fn(m.n_cells(), |i| -theta[i]);
        let a = make_anelastic(&m, Profile::Const(1.0), Profile::Const(1.0), |z| -z, 1.0, 1.0, Quadrature::Midpoint)
            .unwrap();
        let eb = energies(&v, &minus, &b, &m, &d).unwrap();
        let ea = energies(&v, &theta, &a, &m, &d).unwrap();
        assert_eq!(eb.kinetic, 0.0);
        assert!((eb.total - ea.total).abs() < 1e-15);
    }

    #[test]
    fn mass_of_unit_field_is_weighted_volume() {
        let m = build_regular(5, 3, 2.0, 1.0).unwrap();
        let b = make_boussinesq(&m);
        let one = CellField::from_vec(vec![1.0; m.n_cells()]);
        assert!((mass(&one, &b) - 2.0).abs() < 1e-14);
        assert_eq!(mass(&CellField::zeros(m.n_cells()), &b), 0.0);
    }
}

//! Initial states for the adjustment and bubble experiments.

use std::f64::consts::PI;

use super::config::{CaseKind, CaseParams, RunConfig};
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};
use crate::models::{
    make_anelastic, make_boussinesq, make_pseudo_incompressible, ModelKind, ModelSpec, Profile, Quadrature,
};
use crate::operators::CellField;
use crate::stepper::State;

/// A model, its initial state and the undisturbed reference samples.
#[derive(Clone, Debug)]
pub struct CaseSetup {
    pub model: ModelSpec,
    pub state: State,
    pub reference: CellField,
}

/// Resolved adjustment parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdjustmentParams {
    pub n_b: f64,
    pub r0: f64,
    pub beta: f64,
    pub offset: f64,
    pub k: f64,
    pub g: f64,
    pub cp: f64,
}

impl AdjustmentParams {
    pub fn resolve(p: &CaseParams, model: ModelKind, lz: f64) -> Self {
        let beta = if model == ModelKind::Boussinesq { 0.3 } else { 0.2 };
        AdjustmentParams {
            n_b: p.n_b.unwrap_or(1.0),
            r0: p.r0.unwrap_or(0.2 * lz),
            beta: p.beta.unwrap_or(beta * lz),
            offset: p.offset.unwrap_or(-1.0),
            k: p.k.unwrap_or(-1.0),
            g: p.g.unwrap_or(1.0),
            cp: p.cp.unwrap_or(1.0),
        }
    }
}

/// Resolved bubble parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BubbleParams {
    pub theta_bar: f64,
    pub delta_theta: f64,
    pub length: f64,
    pub z_off: f64,
    pub g: f64,
    pub cp: f64,
}

impl BubbleParams {
    pub fn resolve(p: &CaseParams, case: CaseKind) -> Self {
        let (dtheta, length, z_off) = match case {
            CaseKind::ColdBubble => (30.0, 10.0, -0.02),
            _ => (2.0, 10_000.0, 0.03),
        };
        BubbleParams {
            theta_bar: p.theta_bar.unwrap_or(300.0),
            delta_theta: p.delta_theta.unwrap_or(dtheta),
            length: p.length.unwrap_or(length),
            z_off: p.z_off.unwrap_or(z_off),
            g: p.g.unwrap_or(10.0),
            cp: p.cp.unwrap_or(1000.0),
        }
    }

    /// Normalized distance from the bubble center.
    pub fn radius(&self, p: Point, lx: f64, lz: f64) -> f64 {
        let dx = (p.x - 0.5 * lx) / self.length;
        let dz = (p.z - 0.5 * lz) / self.length + self.z_off;
        5.0 * (dx * dx + dz * dz).sqrt()
    }
}

/// `exp(-r0^2 / (r0^2 - r^2))` inside `r < r0`, zero outside.
pub fn bump(r: f64, r0: f64) -> f64 {
    if r < r0 {
        (-r0 * r0 / (r0 * r0 - r * r)).exp()
    } else {
        0.0
    }
}

fn center_distance(p: Point, mesh: &Mesh) -> f64 {
    let dx = p.x - 0.5 * mesh.lx;
    let dz = p.z - 0.5 * mesh.lz;
    (dx * dx + dz * dz).sqrt()
}

fn field(mesh: &Mesh, f: impl Fn(Point) -> f64) -> CellField {
    CellField::from_fn(mesh.n_cells(), |i| f(mesh.centroids[i]))
}

fn finish(model: ModelSpec, theta: CellField, reference: CellField, mesh: &Mesh) -> Result<CaseSetup> {
    if model.kind != ModelKind::Boussinesq {
        if let Some((i, v)) = theta.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
            return Err(Error::invalid(format!("initial potential temperature {v} at cell {i} is not positive")));
        }
    }
    Ok(CaseSetup { model, state: State::at_rest(theta, mesh.n_edges()), reference })
}

pub fn init_hydro_boussinesq(mesh: &Mesh, p: &AdjustmentParams) -> Result<CaseSetup> {
    if !(p.n_b > 0.0) || !(p.r0 > 0.0) {
        return Err(Error::invalid("adjustment needs n_b > 0 and r0 > 0"));
    }
    let n2 = p.n_b * p.n_b;
    let reference = field(mesh, |c| -n2 * c.z);
    let theta = field(mesh, |c| n2 * (-c.z + p.beta * bump(center_distance(c, mesh), p.r0)));
    finish(make_boussinesq(mesh), theta, reference, mesh)
}

/// `exp(z + c)` minus the bump; the density is `exp(K z)`.
fn hydro_theta(mesh: &Mesh, p: &AdjustmentParams) -> Result<(Profile, CellField, CellField)> {
    if !(p.r0 > 0.0) {
        return Err(Error::invalid("adjustment needs r0 > 0"));
    }
    let profile = Profile::Exp { a: p.offset.exp(), k: 1.0 };
    let reference = field(mesh, |c| profile.eval(c.z, mesh.lz));
    let theta = field(mesh, |c| profile.eval(c.z, mesh.lz) - p.beta * bump(center_distance(c, mesh), p.r0));
    Ok((profile, theta, reference))
}

pub fn init_hydro_anelastic(mesh: &Mesh, p: &AdjustmentParams, rho: Option<Profile>, quad: Quadrature) -> Result<CaseSetup> {
    let (theta_bar, theta, reference) = hydro_theta(mesh, p)?;
    let rho = rho.unwrap_or(Profile::Exp { a: 1.0, k: p.k });
    let (g, cp, c) = (p.g, p.cp, p.offset);
    let model = make_anelastic(mesh, rho, theta_bar, |z| (g / cp) * (-(z + c)).exp(), cp, g, quad)?;
    finish(model, theta, reference, mesh)
}

pub fn init_hydro_pi(mesh: &Mesh, p: &AdjustmentParams, rho: Option<Profile>, quad: Quadrature) -> Result<CaseSetup> {
    let (theta_bar, theta, reference) = hydro_theta(mesh, p)?;
    let rho = rho.unwrap_or(Profile::Exp { a: 1.0, k: p.k });
    let model = make_pseudo_incompressible(mesh, rho, theta_bar, p.g, quad)?;
    finish(model, theta, reference, mesh)
}

fn bubble_model(
    mesh: &Mesh,
    kind: ModelKind,
    p: &BubbleParams,
    rho: Option<Profile>,
    quad: Quadrature,
) -> Result<ModelSpec> {
    let rho = rho.unwrap_or(Profile::Pow { b: 0.3, p: 2.5 });
    let theta_bar = Profile::Const(p.theta_bar);
    let (g, cp, tb) = (p.g, p.cp, p.theta_bar);
    match kind {
        ModelKind::Anelastic => make_anelastic(mesh, rho, theta_bar, |z| -g * z / (cp * tb), cp, g, quad),
        ModelKind::PseudoIncompressible => make_pseudo_incompressible(mesh, rho, theta_bar, g, quad),
        ModelKind::Boussinesq => Err(Error::invalid("bubble cases need the anelastic or pseudo-incompressible model")),
    }
}

pub fn init_warm_bubble(
    mesh: &Mesh,
    kind: ModelKind,
    p: &BubbleParams,
    rho: Option<Profile>,
    quad: Quadrature,
) -> Result<CaseSetup> {
    let model = bubble_model(mesh, kind, p, rho, quad)?;
    let reference = field(mesh, |_| p.theta_bar);
    let theta = field(mesh, |c| {
        let r = p.radius(c, mesh.lx, mesh.lz);
        let bump = if r <= 1.0 { (0.5 * PI * r).cos().powi(2) } else { 0.0 };
        p.theta_bar + p.delta_theta * bump
    });
    finish(model, theta, reference, mesh)
}

pub fn init_cold_bubble(
    mesh: &Mesh,
    kind: ModelKind,
    p: &BubbleParams,
    rho: Option<Profile>,
    quad: Quadrature,
) -> Result<CaseSetup> {
    if p.delta_theta >= p.theta_bar {
        return Err(Error::invalid(format!(
            "delta_theta = {} would make the potential temperature non-positive",
            p.delta_theta
        )));
    }
    let model = bubble_model(mesh, kind, p, rho, quad)?;
    let reference = field(mesh, |_| p.theta_bar);
    let theta = field(mesh, |c| {
        let r = p.radius(c, mesh.lx, mesh.lz);
        let dip = if r <= 1.0 { 0.5 * p.delta_theta * (1.0 + (PI * r * r).cos()) } else { 0.0 };
        p.theta_bar - dip
    });
    finish(model, theta, reference, mesh)
}

/// Dispatches on the configured case and model.
pub fn initialize(cfg: &RunConfig, mesh: &Mesh) -> Result<CaseSetup> {
    let quad = cfg.params.quadrature.unwrap_or_default();
    let rho = cfg.params.rho;
    match cfg.case {
        CaseKind::HydrostaticAdjustment => {
            let p = AdjustmentParams::resolve(&cfg.params, cfg.model, mesh.lz);
            match cfg.model {
                ModelKind::Boussinesq => init_hydro_boussinesq(mesh, &p),
                ModelKind::Anelastic => init_hydro_anelastic(mesh, &p, rho, quad),
                ModelKind::PseudoIncompressible => init_hydro_pi(mesh, &p, rho, quad),
            }
        }
        CaseKind::WarmBubble => init_warm_bubble(mesh, cfg.model, &BubbleParams::resolve(&cfg.params, cfg.case), rho, quad),
        CaseKind::ColdBubble => init_cold_bubble(mesh, cfg.model, &BubbleParams::resolve(&cfg.params, cfg.case), rho, quad),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_regular;
    use Quadrature;

    fn adj(model: ModelKind) -> AdjustmentParams {
        AdjustmentParams::resolve(&CaseParams::default(), model, 1.0)
    }

    #[test]
    fn bump_values() {
        assert!((bump(0.0, 0.2) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(bump(0.2, 0.2), 0.0);
        assert_eq!(bump(0.5, 0.2), 0.0);
    }

    #[test]
    fn boussinesq_adjustment() {
        let mesh = build_regular(24, 5, 24.0, 1.0).unwrap();
        let p = adj(ModelKind::Boussinesq);
        let s = init_hydro_boussinesq(&mesh, &p).unwrap();
        assert_eq!(s.state.v.max_abs(), 0.0);
        for i in 0..mesh.n_cells() {
            let c = mesh.centroids[i];
            let b = s.state.theta[i];
            if center_distance(c, &mesh) >= p.r0 {
                assert_eq!(b, -c.z);
            } else {
                assert!(b > -c.z);
            }
        }
        let flat = init_hydro_boussinesq(&mesh, &AdjustmentParams { beta: 0.0, ..p }).unwrap();
        assert_eq!(flat.state.theta, flat.reference);
    }

    #[test]
    fn anelastic_profile_endpoints() {
        let p = adj(ModelKind::Anelastic);
        let theta = Profile::Exp { a: p.offset.exp(), k: 1.0 };
        assert!((theta.eval(1.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((theta.eval(0.0, 1.0) - (-1.0f64).exp()).abs() < 1e-15);
        let mesh = build_regular(24, 5, 24.0, 1.0).unwrap();
        for kind in [ModelKind::Anelastic, ModelKind::PseudoIncompressible] {
            let flat = AdjustmentParams { beta: 0.0, ..adj(kind) };
            let s = if kind == ModelKind::Anelastic {
                init_hydro_anelastic(&mesh, &flat, None, Quadrature::Midpoint)
            } else {
                init_hydro_pi(&mesh, &flat, None, Quadrature::Midpoint)
            }
            .unwrap();
            assert_eq!(s.state.theta, s.reference);
            assert_eq!(s.model.theta_ref, s.reference);
        }
        // A disturbance deeper than the profile is rejected.
        let deep = AdjustmentParams { beta: 10.0, ..adj(ModelKind::Anelastic) };
        assert!(matches!(init_hydro_pi(&mesh, &deep, None, Quadrature::Midpoint), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn exner_is_hydrostatic() {
        let mesh = build_regular(8, 4, 8.0, 1.0).unwrap();
        let s = init_hydro_anelastic(&mesh, &adj(ModelKind::Anelastic), None, Quadrature::Midpoint).unwrap();
        let pi = s.model.exner.unwrap();
        // c_p theta dPi/dz = -g, here with c_p = g = 1.
        for i in 0..mesh.n_cells() {
            let z = mesh.centroids[i].z;
            let dpi = -pi[i];
            assert!(((z - 1.0).exp() * dpi + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn warm_bubble_peak() {
        let p = BubbleParams::resolve(&CaseParams::default(), CaseKind::WarmBubble);
        let center = Point::new(10_000.0, 5_000.0 - 0.03 * 10_000.0);
        assert!(p.radius(center, 20_000.0, 10_000.0).abs() < 1e-12);
        let rho = Profile::Pow { b: 0.3, p: 2.5 };
        assert!((rho.eval(10_000.0, 10_000.0) - 0.7f64.powf(2.5)).abs() < 1e-15);
        assert_eq!(rho.eval(0.0, 10_000.0), 1.0);
        let mesh = build_regular(40, 23, 20_000.0, 10_000.0).unwrap();
        let s = init_warm_bubble(&mesh, ModelKind::Anelastic, &p, None, Quadrature::Midpoint).unwrap();
        let max = s.state.theta.iter().copied().fold(f64::MIN, f64::max);
        assert!(max <= 302.0 && max > 301.5);
        let outside = (0..mesh.n_cells()).filter(|&i| p.radius(mesh.centroids[i], mesh.lx, mesh.lz) > 1.0);
        for i in outside {
            assert_eq!(s.state.theta[i], 300.0);
        }
        assert_eq!(s.model.exner.as_ref().unwrap()[0], -10.0 * mesh.centroids[0].z / 300_000.0);
    }

    #[test]
    fn cold_bubble_minimum() {
        let mesh = build_regular(40, 23, 20.0, 10.0).unwrap();
        for (dt, lo) in [(30.0, 270.0), (210.0, 90.0)] {
            let p = BubbleParams { delta_theta: dt, ..BubbleParams::resolve(&CaseParams::default(), CaseKind::ColdBubble) };
            let s = init_cold_bubble(&mesh, ModelKind::PseudoIncompressible, &p, None, Quadrature::Midpoint).unwrap();
            let min = s.state.theta.iter().copied().fold(f64::MAX, f64::min);
            assert!(min >= lo && min < lo + 0.1 * dt, "{min}");
            assert!((BubbleParams { delta_theta: dt, ..p }.radius(Point::new(10.0, 5.2), 20.0, 10.0)).abs() < 1e-12);
        }
        let zero = BubbleParams { delta_theta: 0.0, ..BubbleParams::resolve(&CaseParams::default(), CaseKind::ColdBubble) };
        let s = init_cold_bubble(&mesh, ModelKind::Anelastic, &zero, None, Quadrature::Midpoint).unwrap();
        assert_eq!(s.state.theta, s.reference);
        let hot = BubbleParams { delta_theta: 300.0, ..zero };
        assert!(init_cold_bubble(&mesh, ModelKind::Anelastic, &hot, None, Quadrature::Midpoint).is_err());
    }
}

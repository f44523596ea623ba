//! Pass/fail suites over configured runs.

use std::fmt;
use std::str::FromStr;

use super::cases::{init_hydro_boussinesq, AdjustmentParams};
use super::config::{CaseKind, RunConfig};
use super::run::{build_mesh, run, RunSummary};
use crate::diagnostics::{dft_windowed, dispersion_bound_check, linear_fit, symmetry_error, DispersionParams, Window};
use crate::error::{Error, Result};
use crate::models::{make_anelastic, ModelKind, Profile, Quadrature};
use crate::operators::CellField;
use crate::stepper::{State, Stepper};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Conservation,
    Dispersion,
    Equivalence,
    Symmetry,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Conservation, Suite::Dispersion, Suite::Equivalence, Suite::Symmetry];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Conservation => "conservation",
            Suite::Dispersion => "dispersion",
            Suite::Equivalence => "equivalence",
            Suite::Symmetry => "symmetry",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

/// One measured quantity against its limit.
#[derive(Clone, Debug, PartialEq)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    pub limit: String,
    pub pass: bool,
}

impl fmt::Display for Measurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "ok  " } else { "FAIL" };
        write!(f, "{tag} {} = {:.6e} (limit {})", self.name, self.value, self.limit)
    }
}

fn at_most(name: &str, value: f64, limit: f64) -> Measurement {
    Measurement { name: name.into(), value, limit: format!("<= {limit:e}"), pass: value <= limit }
}

fn within(name: &str, value: f64, lo: f64, hi: f64) -> Measurement {
    Measurement { name: name.into(), value, limit: format!("in [{lo}, {hi}]"), pass: (lo..=hi).contains(&value) }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub suite: Suite,
    pub measurements: Vec<Measurement>,
}

impl CheckOutcome {
    pub fn pass(&self) -> bool {
        self.measurements.iter().all(|m| m.pass)
    }
}

/// Energy drift, energy oscillation amplitude and mass error of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyStats {
    /// Least-squares slope of the relative energy error, per second.
    pub drift: f64,
    /// Largest deviation of the relative energy error from that line.
    pub amplitude: f64,
    pub max_abs_energy: f64,
    pub max_abs_mass: f64,
}

pub fn energy_stats(summary: &RunSummary) -> EnergyStats {
    let t: Vec<f64> = summary.rows.iter().map(|r| r.t).collect();
    let e: Vec<f64> = summary.rows.iter().map(|r| r.rel_energy).collect();
    let (slope, icpt) = linear_fit(&t, &e);
    let amplitude = t.iter().zip(&e).map(|(t, e)| (e - slope * t - icpt).abs()).fold(0.0, f64::max);
    EnergyStats {
        drift: slope,
        amplitude,
        max_abs_energy: e.iter().map(|x| x.abs()).fold(0.0, f64::max),
        max_abs_mass: summary.rows.iter().map(|r| r.rel_mass.abs()).fold(0.0, f64::max),
    }
}

/// Stability frequency and dispersion parameters of an adjustment config.
pub fn dispersion_params(cfg: &RunConfig, lz: f64) -> Result<DispersionParams> {
    if cfg.case != CaseKind::HydrostaticAdjustment {
        return Err(Error::Unsupported(format!("no dispersion relation for {}", cfg.case)));
    }
    let p = AdjustmentParams::resolve(&cfg.params, cfg.model, lz);
    let k = match cfg.params.rho {
        None => p.k,
        Some(Profile::Exp { k, .. }) => k,
        Some(other) => return Err(Error::Unsupported(format!("no dispersion relation for density {other}"))),
    };
    // The profile exp(z + c) has g d(ln theta)/dz = g.
    match cfg.model {
        ModelKind::Boussinesq => DispersionParams::boussinesq(p.n_b),
        ModelKind::Anelastic => DispersionParams::anelastic_exp(p.g.sqrt(), k),
        ModelKind::PseudoIncompressible => DispersionParams::pseudo_incompressible_exp(p.g.sqrt(), k),
    }
}

fn nearest_to_center(summary: &RunSummary) -> usize {
    let m = &summary.built.mesh;
    let d = |i: usize| {
        let p = summary.probes[i].position;
        (p.x - 0.5 * m.lx).hypot(p.z - 0.5 * m.lz)
    };
    (0..summary.probes.len()).min_by(|&a, &b| d(a).total_cmp(&d(b))).unwrap_or(0)
}

/// Runs one suite against a config.
pub fn check(suite: Suite, cfg: &RunConfig) -> Result<CheckOutcome> {
    let measurements = match suite {
        Suite::Conservation => {
            let s = energy_stats(&run(cfg, None)?);
            vec![
                at_most("energy drift per second", s.drift.abs(), 1e-8),
                at_most("energy oscillation amplitude", s.amplitude, 1e-4),
                at_most("relative mass error", s.max_abs_mass, 1e-12),
            ]
        }
        Suite::Dispersion => {
            let summary = run(cfg, None)?;
            let params = dispersion_params(cfg, summary.built.mesh.lz)?;
            // The probe inside the initial disturbance starts with a
            // transient; without a taper its leakage alone exceeds 5%.
            let hann = summary
                .probes
                .iter()
                .map(|p| dft_windowed(&p.values, cfg.stepper.dt, Window::Hann))
                .collect::<Result<Vec<_>>>()?;
            let d = dispersion_bound_check(&hann, &params, 0.95, 0.05);
            let raw = dispersion_bound_check(&summary.spectra, &params, 0.95, 0.05);
            let mut m = vec![
                Measurement {
                    name: "smallest power fraction below 1.05 N (Hann)".into(),
                    value: d.min_fraction,
                    limit: ">= 0.95".into(),
                    pass: d.pass,
                },
                Measurement {
                    name: "same without taper (informational)".into(),
                    value: raw.min_fraction,
                    limit: "none".into(),
                    pass: true,
                },
            ];
            if cfg.model == ModelKind::Boussinesq {
                let c = nearest_to_center(&summary);
                let f = summary.spectra[c].dominant_frequency().unwrap_or(0.0);
                m.push(within("center probe dominant frequency / N", 2.0 * std::f64::consts::PI * f / params.n, 0.9, 1.0));
            }
            m
        }
        Suite::Equivalence => {
            let e = equivalence_error(cfg)?;
            vec![at_most("max-norm trajectory difference", e, 1e-12)]
        }
        Suite::Symmetry => {
            if cfg.mesh.perturbation != 0.0 {
                return Err(Error::Unsupported("the symmetry suite needs an unperturbed mesh".into()));
            }
            let summary = run(cfg, None)?;
            let mesh = &summary.built.mesh;
            let s0 = &summary.setup;
            let scale = s0.state.theta.iter().zip(s0.reference.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let err = symmetry_error(&summary.final_state.theta, mesh, 0.5 * mesh.lx)?;
            vec![at_most("mirror asymmetry / disturbance amplitude", err / scale.max(f64::MIN_POSITIVE), 1e-8)]
        }
    };
    Ok(CheckOutcome { suite, measurements })
}

/// Largest difference between a Boussinesq run and the anelastic run with
/// unit density, unit potential temperature and `Pi = -z`, started from
/// `Theta = -B`; compared every step in the max-norm.
pub fn equivalence_error(cfg: &RunConfig) -> Result<f64> {
    if cfg.case != CaseKind::HydrostaticAdjustment {
        return Err(Error::Unsupported("the equivalence suite runs the hydrostatic adjustment".into()));
    }
    cfg.validate()?;
    let built = build_mesh(&cfg.mesh)?;
    let (mesh, dual) = (&built.mesh, &built.dual);
    let p = AdjustmentParams::resolve(&cfg.params, ModelKind::Boussinesq, mesh.lz);
    let bous = init_hydro_boussinesq(mesh, &p)?;
    let anel = make_anelastic(mesh, Profile::Const(1.0), Profile::Const(1.0), |z| -z, 1.0, 1.0, Quadrature::Midpoint)?;
    let neg = |b: &CellField| CellField::from_fn(b.len(), |i| -b[i]);

    let mut sb = Stepper::new(mesh, dual, &bous.model, cfg.stepper)?;
    let mut sa = Stepper::new(mesh, dual, &anel, cfg.stepper)?;
    let mut xb = bous.state.clone();
    let mut xa = State { theta: neg(&xb.theta), ..xb.clone() };
    let mut worst = 0.0f64;
    for _ in 0..cfg.steps()? {
        xb = sb.step(&xb)?.0;
        xa = sa.step(&xa)?.0;
        let dv = xb.v.iter().zip(xa.v.iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let dt = xb.theta.iter().zip(xa.theta.iter()).map(|(a, b)| (a + b).abs()).fold(0.0, f64::max);
        worst = worst.max(dv).max(dt);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(model: ModelKind) -> RunConfig {
        let mut cfg = RunConfig::preset(CaseKind::HydrostaticAdjustment, model);
        cfg.mesh.nx = 24;
        cfg.mesh.nz = 4;
        cfg.mesh.lx = 6.0;
        cfg.t_end = 5.0;
        cfg
    }

    #[test]
    fn suite_names() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn equivalence_on_small_mesh() {
        assert!(equivalence_error(&small(ModelKind::Boussinesq)).unwrap() <= 1e-12);
    }

    #[test]
    fn symmetry_and_conservation_on_small_mesh() {
        let cfg = small(ModelKind::Boussinesq);
        let sym = check(Suite::Symmetry, &cfg).unwrap();
        assert!(sym.pass(), "{:?}", sym.measurements);
        let con = check(Suite::Conservation, &cfg).unwrap();
        assert!(con.measurements[2].pass, "{:?}", con.measurements);
    }

    #[test]
    fn dispersion_needs_adjustment_case() {
        let cfg = RunConfig::preset(CaseKind::WarmBubble, ModelKind::Anelastic);
        assert!(matches!(dispersion_params(&cfg, 1.0), Err(Error::Unsupported(_))));
        let p = dispersion_params(&small(ModelKind::PseudoIncompressible), 1.0).unwrap();
        assert!((p.sigma - 0.25).abs() < 1e-15);
    }
}

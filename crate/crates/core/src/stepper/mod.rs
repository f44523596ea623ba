//! Time integration.
//!
//! One step first transports the thermodynamic scalar with the Cayley map of
//! the current flux matrix, then solves the Crank–Nicolson momentum equation
//! by a fixed-point iteration in which every iterate is projected onto
//! discretely divergence-free velocities.

mod linalg;
mod poisson;

use serde::{Deserialize, Serialize};

pub use linalg::SolveStats;
pub use poisson::PoissonOperator;

use linalg::{cg, CgOptions};

use crate::error::{Error, Result};
use crate::mesh::{DualGeometry, Mesh};
use crate::models::{ModelKind, ModelSpec};
use crate::operators::{advection, divergence, flux_from_velocity, forcing, gradient, theta_tilde};
use crate::operators::{CellField, EdgeField};

/// Prognostic variables. `theta` holds buoyancy in Boussinesq mode.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub v: EdgeField,
    pub theta: CellField,
    pub t: f64,
}

impl State {
    pub fn at_rest(theta: CellField, n_edges: usize) -> Self {
        State { v: EdgeField::zeros(n_edges), theta, t: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepperConfig {
    pub dt: f64,
    /// Relative max-norm tolerance on successive fixed-point iterates.
    pub fp_tol: f64,
    /// Absolute max-norm floor below which iterates count as converged.
    pub fp_abs_tol: f64,
    pub fp_max_iter: usize,
    pub poisson_tol: f64,
    pub poisson_max_iter: usize,
    pub cayley_tol: f64,
    pub cayley_max_iter: usize,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            dt: 0.25,
            fp_tol: 1e-10,
            fp_abs_tol: 1e-15,
            fp_max_iter: 100,
            poisson_tol: 1e-13,
            poisson_max_iter: 20_000,
            cayley_tol: 1e-14,
            cayley_max_iter: 500,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("dt", self.dt),
            ("fp_tol", self.fp_tol),
            ("fp_abs_tol", self.fp_abs_tol),
            ("poisson_tol", self.poisson_tol),
            ("cayley_tol", self.cayley_tol),
        ];
        for (name, v) in pos {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.fp_max_iter == 0 || self.poisson_max_iter == 0 || self.cayley_max_iter == 0 {
            return Err(Error::Config("iteration limits must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepReport {
    pub fp_iterations: usize,
    /// Last max-norm change between fixed-point iterates.
    pub residual: f64,
    pub poisson_iterations: Vec<usize>,
    pub cayley_iterations: usize,
    /// `max_i |div(V)_i|` after the step.
    pub max_divergence: f64,
}

/// Cayley transport `(I - dt/2 A) Theta' = (I + dt/2 A) Theta`.
///
/// With `B = dt/2 A` antisymmetric in the `Omega^sigma` inner product,
/// `I - B^2` is positive there, so CG solves `(I - B^2) y = (I + B) Theta`
/// and `Theta' = (I + B) y`.
pub fn theta_update(
    theta: &CellField,
    v: &EdgeField,
    model: &ModelSpec,
    mesh: &Mesh,
    dt: f64,
    cfg: &StepperConfig,
) -> Result<(CellField, SolveStats)> {
    let a = flux_from_velocity(v, &model.weights, mesh);
    let half = 0.5 * dt;
    let apply_b = |x: &[f64], out: &mut [f64]| {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (e, edge) in mesh.edges.iter().enumerate() {
            let [i, j] = edge.cells;
            out[i] += half * a.forward[e] * x[j];
            out[j] += half * a.backward[e] * x[i];
        }
    };
    let n = theta.len();
    let mut bx = vec![0.0; n];
    apply_b(theta.values(), &mut bx);
    let rhs: Vec<f64> = theta.iter().zip(&bx).map(|(t, b)| t + b).collect();
    let mut tmp = vec![0.0; n];
    let mut tmp2 = vec![0.0; n];
    let apply = |x: &[f64], out: &mut [f64]| {
        apply_b(x, &mut tmp);
        apply_b(&tmp, &mut tmp2);
        for k in 0..x.len() {
            out[k] = x[k] - tmp2[k];
        }
    };
    let mut y = theta.values().to_vec();
    let opt = CgOptions {
        weights: Some(&model.weights.volumes),
        diagonal: None,
        tol: cfg.cayley_tol,
        max_iter: cfg.cayley_max_iter,
        what: "Cayley transport",
    };
    let stats = cg(apply, &rhs, &mut y, &opt)?;
    apply_b(&y, &mut bx);
    // One sweep of Theta' = Theta + B (Theta + Theta') puts the update in the
    // range of B, so mass moves only through the divergence of `v`.
    let sum: Vec<f64> = (0..n).map(|i| theta[i] + y[i] + bx[i]).collect();
    apply_b(&sum, &mut bx);
    Ok((CellField::from_fn(n, |i| theta[i] + bx[i]), stats))
}

/// Projects `rhs` through the model's pressure operator (no extra scaling).
pub fn poisson_solve(
    rhs: &CellField,
    model: &ModelSpec,
    mesh: &Mesh,
    dual: &DualGeometry,
    cfg: &StepperConfig,
) -> Result<(CellField, SolveStats)> {
    PoissonOperator::assemble(mesh, dual, &model.weights, None).solve(rhs, None, cfg.poisson_tol, cfg.poisson_max_iter)
}

/// Result of the projected fixed-point iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentumUpdate {
    pub v: EdgeField,
    pub pressure: CellField,
    pub report: StepReport,
}

/// Crank–Nicolson momentum update given `Theta^t` and `Theta^{t+1}`.
/// `warm` seeds the first pressure solve.
#[allow(clippy::too_many_arguments)]
pub fn momentum_update(
    v_old: &EdgeField,
    theta_old: &CellField,
    theta_new: &CellField,
    model: &ModelSpec,
    mesh: &Mesh,
    dual: &DualGeometry,
    cfg: &StepperConfig,
    warm: Option<&CellField>,
) -> Result<MomentumUpdate> {
    let dt = cfg.dt;
    let w = &model.weights;
    let kind = model.kind;
    let ne = mesh.n_edges();
    let pi = kind == ModelKind::PseudoIncompressible;

    // Per-edge factor 1 / Theta-tilde^{t+1} (pseudo-incompressible only).
    let scale = pi.then(|| {
        let tt = theta_tilde(theta_new, mesh);
        EdgeField::from_fn(ne, |e| 1.0 / tt[e])
    });
    let s = |e: usize| scale.as_ref().map_or(1.0, |s| s[e]);

    let adv_old = advection(v_old, Some(theta_old), w, mesh, dual, kind)?;
    let f = forcing(model.forcing_model(), theta_new, Some(v_old), w, mesh, dual)?;
    let g = if pi {
        let tt_old = theta_tilde(theta_old, mesh);
        EdgeField::from_fn(ne, |e| s(e) * (tt_old[e] * v_old[e] - 0.5 * dt * adv_old[e] + dt * f[e]))
    } else {
        EdgeField::from_fn(ne, |e| v_old[e] - 0.5 * dt * adv_old[e] + dt * f[e])
    };

    let op = PoissonOperator::assemble(mesh, dual, w, scale.as_ref());
    let mut report = StepReport::default();
    let mut v = v_old.clone();
    let mut p = warm.cloned().unwrap_or_else(|| CellField::zeros(mesh.n_cells()));
    let mut history = Vec::new();
    for k in 1..=cfg.fp_max_iter {
        let adv = advection(&v, Some(theta_new), w, mesh, dual, kind)?;
        let tentative = EdgeField::from_fn(ne, |e| g[e] - 0.5 * dt * s(e) * adv[e]);
        let rhs = divergence(&tentative, w, mesh);
        let rhs = CellField::from_fn(rhs.len(), |i| rhs[i] / dt);
        let (pk, stats) = op.solve(&rhs, Some(&p), cfg.poisson_tol, cfg.poisson_max_iter)?;
        report.poisson_iterations.push(stats.iterations);
        p = pk;
        let grad = gradient(&p, w, mesh, dual);
        let next = EdgeField::from_fn(ne, |e| tentative[e] - dt * s(e) * grad[e]);
        let diff = next.iter().zip(v.iter()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let size = next.max_abs();
        v = next;
        history.push(diff);
        report.fp_iterations = k;
        report.residual = diff;
        if !diff.is_finite() {
            break;
        }
        if diff <= cfg.fp_tol * size || diff <= cfg.fp_abs_tol {
            report.max_divergence = divergence(&v, w, mesh).max_abs();
            return Ok(MomentumUpdate { v, pressure: p, report });
        }
    }
    let tail: Vec<String> = history.iter().rev().take(5).rev().map(|d| format!("{d:.3e}")).collect();
    Err(Error::Solver(format!(
        "fixed-point iteration did not converge in {} iterations; last changes [{}]",
        report.fp_iterations,
        tail.join(", ")
    )))
}

/// Advances a state by one step, holding the last pressure for warm starts.
pub struct Stepper<'a> {
    pub mesh: &'a Mesh,
    pub dual: &'a DualGeometry,
    pub model: &'a ModelSpec,
    pub cfg: StepperConfig,
    pressure: Option<CellField>,
}

impl<'a> Stepper<'a> {
    pub fn new(mesh: &'a Mesh, dual: &'a DualGeometry, model: &'a ModelSpec, cfg: StepperConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Stepper { mesh, dual, model, cfg, pressure: None })
    }

    /// Pressure from the most recent step.
    pub fn pressure(&self) -> Option<&CellField> {
        self.pressure.as_ref()
    }

    pub fn step(&mut self, state: &State) -> Result<(State, StepReport)> {
        let (theta, cay) = theta_update(&state.theta, &state.v, self.model, self.mesh, self.cfg.dt, &self.cfg)?;
        let up = momentum_update(
            &state.v,
            &state.theta,
            &theta,
            self.model,
            self.mesh,
            self.dual,
            &self.cfg,
            self.pressure.as_ref(),
        )?;
        let mut report = up.report;
        report.cayley_iterations = cay.iterations;
        self.pressure = Some(up.pressure);
        Ok((State { v: up.v, theta, t: state.t + self.cfg.dt }, report))
    }
}

/// One step without warm starting.
pub fn step(
    state: &State,
    model: &ModelSpec,
    mesh: &Mesh,
    dual: &DualGeometry,
    cfg: &StepperConfig,
) -> Result<(State, StepReport)> {
    Stepper::new(mesh, dual, model, *cfg)?.step(state)
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{ModelKind, Profile, Quadrature};
use crate::stepper::StepperConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseKind {
    HydrostaticAdjustment,
    WarmBubble,
    ColdBubble,
}

impl std::fmt::Display for CaseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CaseKind::HydrostaticAdjustment => "hydrostatic-adjustment",
            CaseKind::WarmBubble => "warm-bubble",
            CaseKind::ColdBubble => "cold-bubble",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub nx: usize,
    pub nz: usize,
    pub lx: f64,
    pub lz: f64,
    #[serde(default)]
    pub perturbation: f64,
    #[serde(default)]
    pub seed: u64,
    /// Further seeds tried when a perturbed mesh fails validation.
    #[serde(default = "default_reseeds")]
    pub max_reseeds: u32,
    /// Perturbed meshes whose largest dual-length ratio exceeds this are
    /// rejected like invalid ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_delta_h: Option<f64>,
}

fn default_reseeds() -> u32 {
    20
}

/// Case parameters. Unset values take the case defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaseParams {
    /// Buoyancy frequency (Boussinesq adjustment).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cp: Option<f64>,
    /// Background potential temperature of the bubbles.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta_bar: Option<f64>,
    /// Disturbance radius of the adjustment cases.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    /// Disturbance amplitude of the adjustment cases.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Offset `c` of the adjustment profile `exp(z + c)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<f64>,
    /// Density exponent `K` of `exp(K z)` in the adjustment cases.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_theta: Option<f64>,
    /// Bubble length scale `L`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_off: Option<f64>,
    /// Replaces the case's reference density profile.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<Profile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<Quadrature>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Probe positions; the 3x3 quarter-point lattice when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<[f64; 2]>>,
    /// Times at which field snapshots are written (the final state always is).
    pub snapshot_times: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub case: CaseKind,
    pub model: ModelKind,
    pub t_end: f64,
    pub mesh: MeshConfig,
    #[serde(default)]
    pub stepper: StepperConfig,
    #[serde(default)]
    pub params: CaseParams,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    /// Desk-scale defaults for a case.
    pub fn preset(case: CaseKind, model: ModelKind) -> Self {
        let (mesh, dt, t_end, snaps) = match case {
            CaseKind::HydrostaticAdjustment => (mesh(192, 10, 24.0, 1.0), 0.25, 100.0, vec![5.0, 8.0]),
            CaseKind::WarmBubble => (mesh(80, 46, 20_000.0, 10_000.0), 2.5, 500.0, vec![250.0]),
            CaseKind::ColdBubble => (mesh(80, 46, 20.0, 10.0), 0.0125, 1.5, vec![1.5]),
        };
        RunConfig {
            case,
            model,
            t_end,
            mesh,
            stepper: StepperConfig { dt, ..Default::default() },
            params: CaseParams::default(),
            output: OutputConfig { probes: None, snapshot_times: snaps },
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Number of steps, `T_end / dt`, which must be integral.
    pub fn steps(&self) -> Result<usize> {
        let n = self.t_end / self.stepper.dt;
        let r = n.round();
        if !(r >= 1.0) || (n - r).abs() > 1e-9 * r {
            return Err(Error::Config(format!("t_end / dt = {n} is not a positive integer")));
        }
        Ok(r as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.stepper.validate()?;
        self.steps()?;
        let m = &self.mesh;
        if m.nx < 2 || m.nz < 2 || !(m.lx > 0.0) || !(m.lz > 0.0) {
            return Err(Error::Config("mesh needs nx, nz >= 2 and positive lengths".into()));
        }
        if !(0.0..0.5).contains(&m.perturbation) {
            return Err(Error::Config(format!("perturbation {} outside [0, 0.5)", m.perturbation)));
        }
        let bubble = matches!(self.case, CaseKind::WarmBubble | CaseKind::ColdBubble);
        if bubble && self.model == ModelKind::Boussinesq {
            return Err(Error::Config(format!("{} needs the anelastic or pseudo-incompressible model", self.case)));
        }
        if let Some(probes) = &self.output.probes {
            for p in probes {
                if !(0.0..=m.lz).contains(&p[1]) {
                    return Err(Error::Config(format!("probe ({}, {}) outside the domain", p[0], p[1])));
                }
            }
        }
        Ok(())
    }
}

fn mesh(nx: usize, nz: usize, lx: f64, lz: f64) -> MeshConfig {
    MeshConfig { nx, nz, lx, lz, perturbation: 0.0, seed: 0, max_reseeds: default_reseeds(), max_delta_h: None }
}

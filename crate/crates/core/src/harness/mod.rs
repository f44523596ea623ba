//! Run configuration, experiment initializers, orchestration and checks.

mod cases;
mod checks;
mod config;
mod run;

pub use cases::{
    bump, init_cold_bubble, init_hydro_anelastic, init_hydro_boussinesq, init_hydro_pi, init_warm_bubble, initialize,
    AdjustmentParams, BubbleParams, CaseSetup,
};
pub use checks::{
    check, dispersion_params, energy_stats, equivalence_error, CheckOutcome, EnergyStats, Measurement, Suite,
};
pub use config::{CaseKind, CaseParams, MeshConfig, OutputConfig, RunConfig};
pub use run::{build_mesh, run, BuiltMesh, RunSummary};

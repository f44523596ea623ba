//! Mesh construction, the stepping loop and output files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use super::cases::{initialize, CaseSetup};
use super::config::{MeshConfig, RunConfig};
use crate::diagnostics::{
    anomaly_centroid, dft, probe_lattice, record, write_cell_snapshot, write_edge_snapshot, write_spectra,
    ConservationRow, ConservationTracker, DiagnosticsWriter, ProbeSeries, ProbeWriter, Spectrum,
};
use crate::error::{Error, Result};
use crate::mesh::{
    build_dual, build_regular, perturb_interior, quality, validate, write_mesh, DualGeometry, Mesh, Point,
};
use crate::models::{energies, mass};
use crate::stepper::{State, StepReport, Stepper};

/// A validated mesh with its dual.
#[derive(Clone, Debug)]
pub struct BuiltMesh {
    pub mesh: Mesh,
    pub dual: DualGeometry,
    /// Seed that produced the accepted mesh.
    pub seed: u64,
    /// Perturbed meshes rejected before this one.
    pub rejections: u32,
}

fn accept(mesh: Mesh, max_delta_h: Option<f64>) -> Result<(Mesh, DualGeometry)> {
    let dual = build_dual(&mesh)?;
    let bad = validate(&mesh, &dual);
    if let Some(v) = bad.first() {
        return Err(Error::MeshQuality(format!("{} violations, first: {v}", bad.len())));
    }
    if let Some(limit) = max_delta_h {
        let dh = quality(&mesh, &dual).max_delta_h;
        if dh > limit {
            return Err(Error::MeshQuality(format!("max delta h {dh} exceeds {limit}")));
        }
    }
    Ok((mesh, dual))
}

/// Builds the configured mesh. Perturbed meshes that fail validation are
/// regenerated with the next seed, up to `max_reseeds` times.
pub fn build_mesh(cfg: &MeshConfig) -> Result<BuiltMesh> {
    let base = build_regular(cfg.nx, cfg.nz, cfg.lx, cfg.lz)?;
    if cfg.perturbation == 0.0 {
        let (mesh, dual) = accept(base, cfg.max_delta_h)?;
        return Ok(BuiltMesh { mesh, dual, seed: cfg.seed, rejections: 0 });
    }
    let mut last = None;
    for r in 0..=cfg.max_reseeds {
        let seed = cfg.seed.wrapping_add(u64::from(r));
        match accept(perturb_interior(&base, cfg.perturbation, seed)?, cfg.max_delta_h) {
            Ok((mesh, dual)) => return Ok(BuiltMesh { mesh, dual, seed, rejections: r }),
            Err(e @ Error::MeshQuality(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(Error::MeshQuality(format!(
        "no valid mesh after {} seeds; last: {}",
        cfg.max_reseeds + 1,
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}

/// Everything a finished run produced.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub built: BuiltMesh,
    pub setup: CaseSetup,
    pub final_state: State,
    /// One row per step, excluding the initial state.
    pub rows: Vec<ConservationRow>,
    pub probes: Vec<ProbeSeries>,
    pub spectra: Vec<Spectrum>,
    /// Anomaly centroid height, starting with the initial state.
    pub centroids: Vec<f64>,
    /// States at the configured snapshot times.
    pub snapshots: Vec<State>,
    pub max_fp_iterations: usize,
    pub max_divergence: f64,
}

struct Outputs {
    dir: std::path::PathBuf,
    diagnostics: DiagnosticsWriter<BufWriter<File>>,
    probes: ProbeWriter<BufWriter<File>>,
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

impl Outputs {
    fn open(dir: &Path, cfg: &RunConfig, mesh: &Mesh) -> Result<Self> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("config.toml"), cfg.to_toml()?)?;
        let mut m = create(dir, "mesh.txt")?;
        write_mesh(mesh, &mut m)?;
        m.flush()?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            diagnostics: DiagnosticsWriter::new(create(dir, "diagnostics.csv")?)?,
            probes: ProbeWriter::new(create(dir, "probes.csv")?)?,
        })
    }

    fn snapshot(&self, state: &State, mesh: &Mesh) -> Result<()> {
        let tag = format!("{}", state.t);
        let mut c = create(&self.dir, &format!("theta_t{tag}.csv"))?;
        write_cell_snapshot(&state.theta, mesh, &mut c)?;
        c.flush()?;
        let mut e = create(&self.dir, &format!("v_t{tag}.csv"))?;
        write_edge_snapshot(&state.v, mesh, &mut e)?;
        e.flush()?;
        Ok(())
    }
}

/// Runs a configured experiment. With `out`, writes `diagnostics.csv` and
/// `probes.csv` row by row, snapshots as they occur, and `spectrum.csv` at
/// the end; files written before a failure are left in place.
pub fn run(cfg: &RunConfig, out: Option<&Path>) -> Result<RunSummary> {
    cfg.validate()?;
    let n_steps = cfg.steps()?;
    let dt = cfg.stepper.dt;
    let built = build_mesh(&cfg.mesh)?;
    let (mesh, dual) = (&built.mesh, &built.dual);
    let setup = initialize(cfg, mesh)?;
    let model = &setup.model;

    let positions: Vec<Point> = match &cfg.output.probes {
        Some(p) => p.iter().map(|&[x, z]| Point::new(x, z)).collect(),
        None => probe_lattice(mesh.lx, mesh.lz),
    };
    let mut probes = positions.into_iter().map(|p| ProbeSeries::new(mesh, p)).collect::<Result<Vec<_>>>()?;
    let snap_steps: Vec<usize> = cfg.output.snapshot_times.iter().map(|t| (t / dt).round() as usize).collect();

    let mut outputs = out.map(|d| Outputs::open(d, cfg, mesh)).transpose()?;
    let e0 = energies(&setup.state.v, &setup.state.theta, model, mesh, dual)?;
    let tracker = ConservationTracker::new(&e0, mass(&setup.state.theta, model));

    let mut stepper = Stepper::new(mesh, dual, model, cfg.stepper)?;
    let mut state = setup.state.clone();
    let mut rows = Vec::with_capacity(n_steps);
    let mut centroids = vec![anomaly_centroid(&state.theta, &setup.reference, mesh)];
    let mut snapshots = Vec::new();
    let (mut max_fp, mut max_div) = (0, 0.0f64);
    for k in 1..=n_steps {
        let (mut next, report): (State, StepReport) = stepper.step(&state)?;
        next.t = k as f64 * dt;
        state = next;

        let e = energies(&state.v, &state.theta, model, mesh, dual)?;
        let row = tracker.row(state.t, &e, mass(&state.theta, model));
        record(&state.theta, state.t, &mut probes);
        centroids.push(anomaly_centroid(&state.theta, &setup.reference, mesh));
        max_fp = max_fp.max(report.fp_iterations);
        max_div = max_div.max(report.max_divergence);
        let snap = snap_steps.contains(&k);
        if let Some(o) = outputs.as_mut() {
            o.diagnostics.write(&row, &report)?;
            o.probes.write_latest(&probes)?;
            if snap || k == n_steps {
                o.snapshot(&state, mesh)?;
            }
        }
        if snap {
            snapshots.push(state.clone());
        }
        rows.push(row);
    }

    let spectra = probes.iter().map(|p| dft(&p.values, dt)).collect::<Result<Vec<_>>>()?;
    if let Some(o) = &outputs {
        let mut f = create(&o.dir, "spectrum.csv")?;
        write_spectra(spectra.iter().enumerate(), &mut f)?;
        f.flush()?;
    }
    Ok(RunSummary {
        built,
        setup,
        final_state: state,
        rows,
        probes,
        spectra,
        centroids,
        snapshots,
        max_fp_iterations: max_fp,
        max_divergence: max_div,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::CaseKind;
    use crate::models::ModelKind;

    fn small() -> RunConfig {
        let mut cfg = RunConfig::preset(CaseKind::HydrostaticAdjustment, ModelKind::Boussinesq);
        cfg.mesh.nx = 24;
        cfg.mesh.nz = 4;
        cfg.mesh.lx = 6.0;
        cfg.t_end = 2.5;
        cfg.output.snapshot_times = vec![1.0];
        cfg
    }

    #[test]
    fn writes_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let summary = run(&small(), Some(dir.path())).unwrap();
        assert_eq!(summary.rows.len(), 10);
        assert_eq!(summary.snapshots.len(), 1);
        assert_eq!(summary.centroids.len(), 11);
        let diag = fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
        assert_eq!(diag.lines().count(), 11);
        let probes = fs::read_to_string(dir.path().join("probes.csv")).unwrap();
        assert_eq!(probes.lines().count(), 1 + 10 * 9);
        for f in ["spectrum.csv", "theta_t1.csv", "v_t1.csv", "theta_t2.5.csv", "mesh.txt", "config.toml"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
    }

    #[test]
    fn deterministic_with_seed() {
        let mut cfg = small();
        cfg.mesh.perturbation = 0.2;
        cfg.mesh.seed = 7;
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run(&cfg, Some(a.path())).unwrap();
        run(&cfg, Some(b.path())).unwrap();
        let read = |d: &Path| fs::read(d.join("probes.csv")).unwrap();
        assert_eq!(read(a.path()), read(b.path()));
    }

    #[test]
    fn reseeds_until_valid() {
        let mut cfg = MeshConfig {
            nx: 40,
            nz: 23,
            lx: 20.0,
            lz: 10.0,
            perturbation: 0.1,
            seed: 1,
            max_reseeds: 200,
            max_delta_h: Some(1.38),
        };
        let b = build_mesh(&cfg).unwrap();
        assert_eq!(b.seed, 1 + u64::from(b.rejections));
        assert!(quality(&b.mesh, &b.dual).max_delta_h <= 1.38);
        cfg.max_delta_h = Some(1.0);
        cfg.max_reseeds = 3;
        assert!(matches!(build_mesh(&cfg), Err(Error::MeshQuality(_))));
    }

    #[test]
    fn solver_failure_keeps_partial_output() {
        let mut cfg = small();
        cfg.stepper.fp_max_iter = 1;
        cfg.stepper.fp_tol = 1e-300;
        cfg.stepper.fp_abs_tol = 1e-300;
        let dir = tempfile::tempdir().unwrap();
        let err = run(&cfg, Some(dir.path())).unwrap_err();
        assert!(matches!(err, Error::Solver(_)), "{err}");
        assert!(dir.path().join("diagnostics.csv").exists());
    }
}

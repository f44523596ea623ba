//! Command-line front end: mesh generation and validation, runs, spectra
//! and check suites.
//!
//! Exit codes: 0 success, 1 failed check, 2 configuration or usage error,
//! 3 input/output error, 4 solver failure, 5 mesh error.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use soundproof::diagnostics::{dft_windowed, read_probes, write_spectra, Window};
use soundproof::harness::{build_mesh, check, run, CaseKind, MeshConfig, RunConfig, Suite};
use soundproof::mesh::{build_dual, quality, read_mesh, validate, write_mesh};
use soundproof::{Error, ModelKind};

#[derive(Parser)]
#[command(name = "soundproof", version, about = "Variational soundproof-model integrators on triangular meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a regular or perturbed channel mesh.
    MeshGen {
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        nz: usize,
        #[arg(long)]
        lx: f64,
        #[arg(long)]
        lz: f64,
        /// Perturbation amplitude c in [0, 0.5).
        #[arg(long, default_value_t = 0.0)]
        perturbation: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        max_reseeds: u32,
        /// Reject perturbed meshes whose max delta h exceeds this.
        #[arg(long)]
        max_delta_h: Option<f64>,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a mesh file and report its quality.
    MeshValidate { file: PathBuf },
    /// Print the default configuration of a case.
    InitConfig {
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long, value_enum)]
        model: ModelArg,
    },
    /// Run a configured experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Amplitude spectra of recorded probe series.
    Spectra {
        #[arg(long)]
        probes: PathBuf,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = WindowArg::Rectangular)]
        window: WindowArg,
    },
    /// Run a pass/fail suite against a configuration.
    Check {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    HydrostaticAdjustment,
    WarmBubble,
    ColdBubble,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Boussinesq,
    Anelastic,
    PseudoIncompressible,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WindowArg {
    Rectangular,
    Hann,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Conservation,
    Dispersion,
    Equivalence,
    Symmetry,
}

impl From<CaseArg> for CaseKind {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::HydrostaticAdjustment => CaseKind::HydrostaticAdjustment,
            CaseArg::WarmBubble => CaseKind::WarmBubble,
            CaseArg::ColdBubble => CaseKind::ColdBubble,
        }
    }
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Boussinesq => ModelKind::Boussinesq,
            ModelArg::Anelastic => ModelKind::Anelastic,
            ModelArg::PseudoIncompressible => ModelKind::PseudoIncompressible,
        }
    }
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Conservation => Suite::Conservation,
            SuiteArg::Dispersion => Suite::Dispersion,
            SuiteArg::Equivalence => Suite::Equivalence,
            SuiteArg::Symmetry => Suite::Symmetry,
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(Error::Config(_) | Error::InvalidArgument(_) | Error::Unsupported(_)) => 2,
        Some(Error::Io(_) | Error::Csv(_) | Error::Parse { .. }) => 3,
        Some(Error::Solver(_) | Error::Domain(_)) => 4,
        Some(Error::Mesh(_) | Error::MeshQuality(_)) => 5,
        None if err.chain().any(|e| e.is::<io::Error>()) => 3,
        None => 2,
    }
}

fn load_config(path: &PathBuf) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(Error::from).with_context(|| format!("reading {}", path.display()))?;
    RunConfig::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Returns whether the command succeeded in the pass/fail sense.
fn execute(cmd: Command) -> Result<bool> {
    match cmd {
        Command::MeshGen { nx, nz, lx, lz, perturbation, seed, max_reseeds, max_delta_h, out } => {
            let cfg = MeshConfig { nx, nz, lx, lz, perturbation, seed, max_reseeds, max_delta_h };
            let built = build_mesh(&cfg)?;
            let q = quality(&built.mesh, &built.dual);
            match out {
                Some(path) => {
                    let mut f = BufWriter::new(File::create(&path).map_err(Error::from)?);
                    write_mesh(&built.mesh, &mut f)?;
                    f.flush().map_err(Error::from)?;
                }
                None => write_mesh(&built.mesh, io::stdout().lock())?,
            }
            eprintln!(
                "{} cells, seed {}, {} rejected, max delta h {:.4}",
                built.mesh.n_cells(),
                built.seed,
                built.rejections,
                q.max_delta_h
            );
            Ok(true)
        }
        Command::MeshValidate { file } => {
            let f = File::open(&file).map_err(Error::from).with_context(|| format!("opening {}", file.display()))?;
            let mesh = read_mesh(BufReader::new(f))?;
            let dual = build_dual(&mesh)?;
            let bad = validate(&mesh, &dual);
            for v in &bad {
                println!("{v}");
            }
            if !bad.is_empty() {
                return Err(Error::MeshQuality(format!("{} violations", bad.len())).into());
            }
            let q = quality(&mesh, &dual);
            println!(
                "valid: {} cells, {} vertices, max delta h {:.6}, h in [{:.6e}, {:.6e}], min angle {:.2} deg",
                mesh.n_cells(),
                mesh.n_vertices(),
                q.max_delta_h,
                q.min_h,
                q.max_h,
                q.min_angle.to_degrees()
            );
            Ok(true)
        }
        Command::InitConfig { case, model } => {
            print!("{}", RunConfig::preset(case.into(), model.into()).to_toml()?);
            Ok(true)
        }
        Command::Run { config, out } => {
            let cfg = load_config(&config)?;
            let s = run(&cfg, Some(&out))?;
            let last = s.rows.last();
            println!(
                "{} steps to t = {}; rel energy {:.3e}, rel mass {:.3e}; max fixed-point iterations {}; outputs in {}",
                s.rows.len(),
                s.final_state.t,
                last.map_or(0.0, |r| r.rel_energy),
                last.map_or(0.0, |r| r.rel_mass),
                s.max_fp_iterations,
                out.display()
            );
            Ok(true)
        }
        Command::Spectra { probes, dt, out, window } => {
            let f = File::open(&probes).map_err(Error::from).with_context(|| format!("opening {}", probes.display()))?;
            let series = read_probes(BufReader::new(f))?;
            let window = if window == WindowArg::Hann { Window::Hann } else { Window::Rectangular };
            let spectra = series
                .iter()
                .map(|(&id, (_, v))| Ok((id, dft_windowed(v, dt, window)?)))
                .collect::<soundproof::Result<Vec<_>>>()?;
            let mut w = BufWriter::new(File::create(&out).map_err(Error::from)?);
            write_spectra(spectra.iter().map(|(id, s)| (*id, s)), &mut w)?;
            w.flush().map_err(Error::from)?;
            for (id, s) in &spectra {
                if let Some(f) = s.dominant_frequency() {
                    println!("probe {id}: dominant frequency {f:.6e} Hz ({:.6e} rad/s)", 2.0 * std::f64::consts::PI * f);
                }
            }
            Ok(true)
        }
        Command::Check { suite, config } => {
            let cfg = load_config(&config)?;
            let outcome = check(suite.into(), &cfg)?;
            for m in &outcome.measurements {
                println!("{m}");
            }
            println!("{} {}", outcome.suite, if outcome.pass() { "PASS" } else { "FAIL" });
            Ok(outcome.pass())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

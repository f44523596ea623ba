//! Probes, spectra, conservation series, symmetry and extrema.

mod output;
mod spectra;

pub use output::{
    read_probes, write_edge_snapshot, ProbeTable, write_cell_snapshot, write_spectra, DiagnosticsWriter, ProbeWriter,
};
pub use spectra::{dft, dft_windowed, dispersion_bound_check, DispersionCheck, DispersionParams, Spectrum, Window};

use crate::error::{Error, Result};
use crate::mesh::{DualGeometry, Mesh, Point};
use crate::models::{energies, mass, Energies, ModelSpec};
use crate::operators::CellField;
use crate::stepper::State;

/// Floats in output files: 17 significant digits, round-trip exact.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Cell values sampled at a fixed point every step.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSeries {
    pub position: Point,
    pub cell: usize,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl ProbeSeries {
    pub fn new(mesh: &Mesh, position: Point) -> Result<Self> {
        let cell = mesh
            .locate(position)
            .ok_or_else(|| Error::invalid(format!("probe ({}, {}) is outside the domain", position.x, position.z)))?;
        Ok(ProbeSeries { position, cell, times: Vec::new(), values: Vec::new() })
    }
}

/// The 3x3 lattice at quarter points of the domain.
pub fn probe_lattice(lx: f64, lz: f64) -> Vec<Point> {
    let q = [0.25, 0.5, 0.75];
    q.iter().flat_map(|&fz| q.iter().map(move |&fx| Point::new(fx * lx, fz * lz))).collect()
}

/// Appends the value of `field` at every probe.
pub fn record(field: &CellField, t: f64, probes: &mut [ProbeSeries]) {
    for p in probes {
        p.times.push(t);
        p.values.push(field[p.cell]);
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservationRow {
    pub t: f64,
    pub kinetic: f64,
    pub potential: f64,
    /// `E(t)/E(0) - 1`, or `E(t) - E(0)` when `absolute`.
    pub rel_energy: f64,
    /// `M(t)/M(0) - 1`, or `M(t) - M(0)` when `absolute`.
    pub rel_mass: f64,
    /// Set when an initial value is zero and differences are absolute.
    pub absolute: bool,
}

/// Incremental form of [`conservation_series`].
#[derive(Clone, Copy, Debug)]
pub struct ConservationTracker {
    e0: f64,
    m0: f64,
}

impl ConservationTracker {
    pub fn new(e0: &Energies, m0: f64) -> Self {
        ConservationTracker { e0: e0.total, m0 }
    }

    pub fn row(&self, t: f64, e: &Energies, m: f64) -> ConservationRow {
        let absolute = self.e0 == 0.0 || self.m0 == 0.0;
        let rel = |x: f64, x0: f64| if absolute { x - x0 } else { (x - x0) / x0 };
        ConservationRow {
            t,
            kinetic: e.kinetic,
            potential: e.potential,
            rel_energy: rel(e.total, self.e0),
            rel_mass: rel(m, self.m0),
            absolute,
        }
    }
}

/// Relative energy and mass errors against the first state.
pub fn conservation_series(
    states: &[State],
    model: &ModelSpec,
    mesh: &Mesh,
    dual: &DualGeometry,
) -> Result<Vec<ConservationRow>> {
    let Some(first) = states.first() else {
        return Ok(Vec::new());
    };
    let e0 = energies(&first.v, &first.theta, model, mesh, dual)?;
    let tracker = ConservationTracker::new(&e0, mass(&first.theta, model));
    states
        .iter()
        .map(|s| Ok(tracker.row(s.t, &energies(&s.v, &s.theta, model, mesh, dual)?, mass(&s.theta, model))))
        .collect()
}

/// Least-squares line through `(t, y)`: `(slope, intercept)`.
pub fn linear_fit(t: &[f64], y: &[f64]) -> (f64, f64) {
    let n = t.len().min(y.len()) as f64;
    if n < 2.0 {
        return (0.0, y.first().copied().unwrap_or(0.0));
    }
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (a, b) in t.iter().zip(y) {
        sxy += (a - tm) * (b - ym);
        sxx += (a - tm) * (a - tm);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, ym - slope * tm)
}

/// Largest `|Theta_i - Theta_mirror(i)|` for the reflection `x -> 2 x_c - x`.
///
/// Cells are paired by mirrored centroids; a mesh without an exact pairing
/// is unsupported.
pub fn symmetry_error(theta: &CellField, mesh: &Mesh, x_c: f64) -> Result<f64> {
    let tol = 1e-9 * mesh.lx.max(mesh.lz);
    let mut order: Vec<usize> = (0..mesh.n_cells()).collect();
    order.sort_by(|&a, &b| mesh.centroids[a].z.total_cmp(&mesh.centroids[b].z));
    // Rows of equal centroid height.
    let mut rows: Vec<&[usize]> = Vec::new();
    let mut start = 0;
    for k in 1..=order.len() {
        if k == order.len() || mesh.centroids[order[k]].z - mesh.centroids[order[start]].z > tol {
            rows.push(&order[start..k]);
            start = k;
        }
    }
    let wrap = |d: f64| d - mesh.lx * (d / mesh.lx).round();
    let mut worst = 0.0f64;
    for row in rows {
        for &i in row {
            let mx = 2.0 * x_c - mesh.centroids[i].x;
            let j = row
                .iter()
                .copied()
                .find(|&j| wrap(mesh.centroids[j].x - mx).abs() <= tol)
                .ok_or_else(|| Error::Unsupported(format!("cell {i} has no mirror image about x = {x_c}")))?;
            worst = worst.max((theta[i] - theta[j]).abs());
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrema {
    pub min: f64,
    pub max: f64,
    pub argmin: usize,
    pub argmax: usize,
}

pub fn extrema(theta: &CellField) -> Extrema {
    let mut e = Extrema { min: f64::INFINITY, max: f64::NEG_INFINITY, argmin: 0, argmax: 0 };
    for (i, &v) in theta.iter().enumerate() {
        if v < e.min {
            e.min = v;
            e.argmin = i;
        }
        if v > e.max {
            e.max = v;
            e.argmax = i;
        }
    }
    e
}

/// Height of the anomaly `Theta - reference`, weighted by area:
/// `sum Omega_i d_i z_i / sum Omega_i d_i`.
pub fn anomaly_centroid(theta: &CellField, reference: &CellField, mesh: &Mesh) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..mesh.n_cells() {
        let d = mesh.areas[i] * (theta[i] - reference[i]);
        num += d * mesh.centroids[i].z;
        den += d;
    }
    num / den
}

/// Area-weighted L2 norm of `a - b`.
pub fn weighted_l2_diff(a: &CellField, b: &CellField, mesh: &Mesh) -> f64 {
    (0..mesh.n_cells()).map(|i| mesh.areas[i] * (a[i] - b[i]).powi(2)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_regular, perturb_interior};

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02e23] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn probes_sample_owning_cell() {
        let m = build_regular(8, 4, 4.0, 2.0).unwrap();
        let f = CellField::from_fn(m.n_cells(), |i| i as f64);
        let mut probes = vec![ProbeSeries::new(&m, m.centroids[13]).unwrap()];
        record(&f, 0.0, &mut probes);
        assert_eq!(probes[0].values, vec![13.0]);

        let seam = ProbeSeries::new(&m, Point::new(4.0, 0.3)).unwrap();
        let origin = ProbeSeries::new(&m, Point::new(0.0, 0.3)).unwrap();
        assert_eq!(seam.cell, origin.cell);
        assert!(ProbeSeries::new(&m, Point::new(1.0, 2.5)).is_err());

        let c = CellField::from_vec(vec![2.0; m.n_cells()]);
        let mut ps: Vec<_> = probe_lattice(4.0, 2.0).into_iter().map(|p| ProbeSeries::new(&m, p).unwrap()).collect();
        for k in 0..5 {
            record(&c, k as f64, &mut ps);
        }
        assert!(ps.iter().all(|p| p.values.iter().all(|&v| v == 2.0)));
        assert_eq!(ps.len(), 9);
    }

    #[test]
    fn symmetry_of_mirrored_fields() {
        let m = build_regular(10, 6, 5.0, 3.0).unwrap();
        let xc = 2.5;
        let sym = CellField::from_fn(m.n_cells(), |i| {
            let c = m.centroids[i];
            (-(c.x - xc).powi(2)).exp() + c.z
        });
        assert!(symmetry_error(&sym, &m, xc).unwrap() < 1e-14);
        let mut bumped = sym.clone();
        bumped[7] += 0.3;
        assert!((symmetry_error(&bumped, &m, xc).unwrap() - 0.3).abs() < 1e-12);
        let p = perturb_interior(&m, 0.2, 1).unwrap();
        assert!(matches!(symmetry_error(&sym, &p, xc), Err(Error::Unsupported(_))));
    }

    #[test]
    fn extrema_scan() {
        let c = CellField::from_vec(vec![1.0; 5]);
        let e = extrema(&c);
        assert_eq!(e.min, e.max);
        let f = CellField::from_vec(vec![3.0, -1.0, 7.0, 2.0]);
        let e = extrema(&f);
        assert_eq!((e.min, e.argmin, e.max, e.argmax), (-1.0, 1, 7.0, 2));
    }

    #[test]
    fn fit_recovers_line() {
        let t: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = t.iter().map(|t| 3.0 - 0.5 * t).collect();
        let (s, c) = linear_fit(&t, &y);
        assert!((s + 0.5).abs() < 1e-14 && (c - 3.0).abs() < 1e-13);
    }

    #[test]
    fn frozen_states_have_zero_errors() {
        use crate::mesh::build_dual;
        use crate::models::make_boussinesq;
        let m = build_regular(6, 4, 3.0, 2.0).unwrap();
        let d = build_dual(&m).unwrap();
        let model = make_boussinesq(&m);
        let s = State::at_rest(CellField::from_fn(m.n_cells(), |i| -m.centroids[i].z + 0.01 * i as f64), m.n_edges());
        let rows = conservation_series(&[s.clone(), s.clone(), s], &model, &m, &d).unwrap();
        assert!(rows.iter().all(|r| r.rel_energy == 0.0 && r.rel_mass == 0.0 && !r.absolute));
    }
}

//! CSV outputs. Every file has a one-line header.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::{fmt_float, ConservationRow, ProbeSeries, Spectrum};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::operators::{CellField, EdgeField};
use crate::stepper::StepReport;

/// `t,E_k,E_p,relE,relM,fp_iters,max_div`, flushed per row.
pub struct DiagnosticsWriter<W: Write> {
    out: csv::Writer<W>,
}

impl<W: Write> DiagnosticsWriter<W> {
    pub fn new(out: W) -> Result<Self> {
        let mut out = csv::Writer::from_writer(out);
        out.write_record(["t", "E_k", "E_p", "relE", "relM", "fp_iters", "max_div"])?;
        out.flush()?;
        Ok(DiagnosticsWriter { out })
    }

    pub fn write(&mut self, row: &ConservationRow, report: &StepReport) -> Result<()> {
        self.out.write_record([
            fmt_float(row.t),
            fmt_float(row.kinetic),
            fmt_float(row.potential),
            fmt_float(row.rel_energy),
            fmt_float(row.rel_mass),
            report.fp_iterations.to_string(),
            fmt_float(report.max_divergence),
        ])?;
        self.out.flush()?;
        Ok(())
    }
}

/// `t,probe_id,value`.
pub struct ProbeWriter<W: Write> {
    out: csv::Writer<W>,
}

impl<W: Write> ProbeWriter<W> {
    pub fn new(out: W) -> Result<Self> {
        let mut out = csv::Writer::from_writer(out);
        out.write_record(["t", "probe_id", "value"])?;
        out.flush()?;
        Ok(ProbeWriter { out })
    }

    /// Writes the latest sample of every probe.
    pub fn write_latest(&mut self, probes: &[ProbeSeries]) -> Result<()> {
        for (id, p) in probes.iter().enumerate() {
            if let (Some(t), Some(v)) = (p.times.last(), p.values.last()) {
                self.out.write_record([fmt_float(*t), id.to_string(), fmt_float(*v)])?;
            }
        }
        self.out.flush()?;
        Ok(())
    }
}

/// Per-probe `(times, values)` keyed by probe id.
pub type ProbeTable = BTreeMap<usize, (Vec<f64>, Vec<f64>)>;

/// Reads `t,probe_id,value` back into per-probe `(times, values)`.
pub fn read_probes(input: impl Read) -> Result<ProbeTable> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = ProbeTable::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::Parse { line: line + 2, message: format!("bad {what}") };
        let t: f64 = rec.get(0).and_then(|s| s.trim().parse().ok()).ok_or_else(|| bad("time"))?;
        let id: usize = rec.get(1).and_then(|s| s.trim().parse().ok()).ok_or_else(|| bad("probe id"))?;
        let v: f64 = rec.get(2).and_then(|s| s.trim().parse().ok()).ok_or_else(|| bad("value"))?;
        let e = out.entry(id).or_default();
        e.0.push(t);
        e.1.push(v);
    }
    Ok(out)
}

/// `probe_id,freq,amplitude`.
pub fn write_spectra<'a>(spectra: impl IntoIterator<Item = (usize, &'a Spectrum)>, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["probe_id", "freq", "amplitude"])?;
    for (id, s) in spectra {
        for (f, a) in s.freqs.iter().zip(&s.amps) {
            w.write_record([id.to_string(), fmt_float(*f), fmt_float(*a)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `cell_id,x,z,theta`.
pub fn write_cell_snapshot(theta: &CellField, mesh: &Mesh, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["cell_id", "x", "z", "theta"])?;
    for (i, (c, v)) in mesh.centroids.iter().zip(theta.iter()).enumerate() {
        w.write_record([i.to_string(), fmt_float(c.x), fmt_float(c.z), fmt_float(*v)])?;
    }
    w.flush()?;
    Ok(())
}

/// `edge_id,x_mid,z_mid,V`.
pub fn write_edge_snapshot(v: &EdgeField, mesh: &Mesh, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["edge_id", "x_mid", "z_mid", "V"])?;
    for (i, (e, x)) in mesh.edges.iter().zip(v.iter()).enumerate() {
        w.write_record([i.to_string(), fmt_float(e.midpoint.x), fmt_float(e.midpoint.z), fmt_float(*x)])?;
    }
    w.flush()?;
    Ok(())
}

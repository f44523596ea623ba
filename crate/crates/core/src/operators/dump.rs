//! CSV dumps of fields for debugging: `id,x,z,value`.

use std::io::Write;

use super::{CellField, EdgeField, VertexField};
use crate::diagnostics::fmt_float;
use crate::error::Result;
use crate::mesh::Mesh;

fn dump(out: impl Write, rows: impl Iterator<Item = (f64, f64, f64)>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "x", "z", "value"])?;
    for (id, (x, z, v)) in rows.enumerate() {
        w.write_record([id.to_string(), fmt_float(x), fmt_float(z), fmt_float(v)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn dump_cell_field(f: &CellField, mesh: &Mesh, out: impl Write) -> Result<()> {
    dump(out, mesh.centroids.iter().zip(f.iter()).map(|(p, &v)| (p.x, p.z, v)))
}

pub fn dump_edge_field(f: &EdgeField, mesh: &Mesh, out: impl Write) -> Result<()> {
    dump(out, mesh.edges.iter().zip(f.iter()).map(|(e, &v)| (e.midpoint.x, e.midpoint.z, v)))
}

pub fn dump_vertex_field(f: &VertexField, mesh: &Mesh, out: impl Write) -> Result<()> {
    dump(out, mesh.vertices.iter().zip(f.iter()).map(|(p, &v)| (p.x, p.z, v)))
}

//! Plain-text mesh format.
//!
//! ```text
//! [meta]
//! lx 24
//! lz 1
//! nx 384
//! nz 20
//! seed 7        # or "none"
//! c 0.2
//! [vertices]
//! v <x> <z>
//! [triangles]
//! t <v1> <v2> <v3> [<s1> <s2> <s3>]
//! ```
//!
//! The optional trailing integers are the periodic shifts of each corner in
//! units of `Lx`; they are written only for triangles crossing the seam.

use std::io::{BufRead, Write};

use super::{Mesh, MeshMeta, Point, Triangle};
use crate::error::{Error, Result};

pub fn write_mesh(mesh: &Mesh, mut out: impl Write) -> Result<()> {
    writeln!(out, "[meta]")?;
    writeln!(out, "lx {}", mesh.lx)?;
    writeln!(out, "lz {}", mesh.lz)?;
    writeln!(out, "nx {}", mesh.meta.nx)?;
    writeln!(out, "nz {}", mesh.meta.nz)?;
    match mesh.meta.seed {
        Some(s) => writeln!(out, "seed {s}")?,
        None => writeln!(out, "seed none")?,
    }
    writeln!(out, "c {}", mesh.meta.perturbation)?;
    writeln!(out, "[vertices]")?;
    for p in &mesh.vertices {
        writeln!(out, "v {} {}", p.x, p.z)?;
    }
    writeln!(out, "[triangles]")?;
    for t in &mesh.triangles {
        let [a, b, c] = t.vertices;
        if t.shifts == [0; 3] {
            writeln!(out, "t {a} {b} {c}")?;
        } else {
            let [p, q, r] = t.shifts;
            writeln!(out, "t {a} {b} {c} {p} {q} {r}")?;
        }
    }
    Ok(())
}

pub fn read_mesh(input: impl BufRead) -> Result<Mesh> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Meta,
        Vertices,
        Triangles,
    }
    let mut section = Section::None;
    let (mut lx, mut lz, mut nx, mut nz) = (None, None, None, None);
    let mut seed = None;
    let mut c = 0.0;
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();

    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let err = |message: String| Error::Parse { line: lineno, message };
        let text = line.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        match text {
            "[meta]" => section = Section::Meta,
            "[vertices]" => section = Section::Vertices,
            "[triangles]" => section = Section::Triangles,
            _ => {
                let mut words = text.split_whitespace();
                let key = words.next().unwrap_or_default();
                let rest: Vec<&str> = words.collect();
                let num = |s: &str| s.parse::<f64>().map_err(|e| err(format!("bad number {s:?}: {e}")));
                let int = |s: &str| s.parse::<i64>().map_err(|e| err(format!("bad integer {s:?}: {e}")));
                let one = || rest.first().copied().ok_or_else(|| err(format!("missing value for {key}")));
                match (&section, key) {
                    (Section::Meta, "lx") => lx = Some(num(one()?)?),
                    (Section::Meta, "lz") => lz = Some(num(one()?)?),
                    (Section::Meta, "nx") => nx = Some(int(one()?)? as usize),
                    (Section::Meta, "nz") => nz = Some(int(one()?)? as usize),
                    (Section::Meta, "seed") => {
                        let s = one()?;
                        seed = if s == "none" { None } else { Some(int(s)? as u64) };
                    }
                    (Section::Meta, "c") => c = num(one()?)?,
                    (Section::Vertices, "v") if rest.len() == 2 => {
                        vertices.push(Point::new(num(rest[0])?, num(rest[1])?))
                    }
                    (Section::Triangles, "t") if rest.len() == 3 || rest.len() == 6 => {
                        let mut ids = [0usize; 3];
                        let mut shifts = [0i32; 3];
                        for k in 0..3 {
                            ids[k] = usize::try_from(int(rest[k])?).map_err(|_| err("negative vertex id".into()))?;
                            if rest.len() == 6 {
                                shifts[k] = int(rest[k + 3])? as i32;
                            }
                        }
                        triangles.push(Triangle { vertices: ids, shifts });
                    }
                    _ => return Err(err(format!("unexpected line {text:?}"))),
                }
            }
        }
    }
    let missing = |what: &str| Error::Parse { line: 0, message: format!("missing meta field {what}") };
    let meta = MeshMeta {
        nx: nx.ok_or_else(|| missing("nx"))?,
        nz: nz.ok_or_else(|| missing("nz"))?,
        seed,
        perturbation: c,
    };
    Mesh::from_parts(lx.ok_or_else(|| missing("lx"))?, lz.ok_or_else(|| missing("lz"))?, vertices, triangles, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_regular, perturb_interior};

    #[test]
    fn round_trip_is_exact() {
        let m = perturb_interior(&build_regular(6, 5, 3.0, 1.0).unwrap(), 0.2, 9).unwrap();
        let mut buf = Vec::new();
        write_mesh(&m, &mut buf).unwrap();
        let back = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn two_column_mesh_needs_shifts() {
        let m = build_regular(2, 2, 2.0, 2.0).unwrap();
        let mut buf = Vec::new();
        write_mesh(&m, &mut buf).unwrap();
        let back = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(back.n_cells(), 8);
        assert!((back.total_area() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn reports_line_of_bad_input() {
        let text = "[meta]\nlx 1\nlz 1\nnx 2\nnz 2\n[vertices]\nv 0 zero\n";
        match read_mesh(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("unexpected {other:?}"),
        }
    }
}

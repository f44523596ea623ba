use super::{Mesh, MeshMeta, Point, Triangle};
use crate::error::{Error, Result};

/// Builds the regular channel mesh of `2 * nx * nz` isosceles triangles.
///
/// Vertex rows sit at `z = r * Lz / nz`; odd rows are shifted by half a
/// column so that up and down triangles alternate. Cell `2k` of strip `r`
/// points up and cell `2k + 1` points down; cell ids run strip by strip.
pub fn build_regular(nx: usize, nz: usize, lx: f64, lz: f64) -> Result<Mesh> {
    if nx < 2 || nz < 2 {
        return Err(Error::invalid(format!("need nx, nz >= 2, got {nx} x {nz}")));
    }
    if !(lx > 0.0 && lz > 0.0) {
        return Err(Error::invalid(format!("domain lengths must be positive, got {lx} x {lz}")));
    }
    let fx = lx / nx as f64;
    let fz = lz / nz as f64;
    let id = |row: usize, k: usize| row * nx + k % nx;
    let wrap = |k: usize| i32::from(k >= nx);

    let mut vertices = Vec::with_capacity(nx * (nz + 1));
    for row in 0..=nz {
        let offset = if row % 2 == 1 { 0.5 } else { 0.0 };
        for k in 0..nx {
            vertices.push(Point::new((k as f64 + offset) * fx, row as f64 * fz));
        }
    }

    let mut triangles = Vec::with_capacity(2 * nx * nz);
    for r in 0..nz {
        let (b, t) = (r, r + 1);
        for k in 0..nx {
            let (up, down) = if r % 2 == 0 {
                (
                    Triangle { vertices: [id(b, k), id(b, k + 1), id(t, k)], shifts: [0, wrap(k + 1), 0] },
                    Triangle {
                        vertices: [id(b, k + 1), id(t, k + 1), id(t, k)],
                        shifts: [wrap(k + 1), wrap(k + 1), 0],
                    },
                )
            } else {
                (
                    Triangle {
                        vertices: [id(b, k), id(b, k + 1), id(t, k + 1)],
                        shifts: [0, wrap(k + 1), wrap(k + 1)],
                    },
                    Triangle { vertices: [id(b, k), id(t, k + 1), id(t, k)], shifts: [0, wrap(k + 1), 0] },
                )
            };
            triangles.push(up);
            triangles.push(down);
        }
    }
    let meta = MeshMeta { nx, nz, seed: None, perturbation: 0.0 };
    Mesh::from_parts(lx, lz, vertices, triangles, meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_spacing() {
        let m = build_regular(384, 20, 24.0, 1.0).unwrap();
        assert_eq!(m.n_cells(), 15360);
        assert_eq!(m.fx(), 0.0625);
        assert_eq!(m.fz(), 0.05);
        assert_eq!(m.n_vertices(), 384 * 21);
    }

    #[test]
    fn small_mesh_area() {
        let m = build_regular(2, 2, 2.0, 2.0).unwrap();
        assert_eq!(m.n_cells(), 8);
        assert!((m.total_area() - 4.0).abs() < 1e-14);
        assert!(m.areas.iter().all(|&a| a > 0.0));
    }

    #[test]
    fn euler_characteristic_of_cylinder() {
        for (nx, nz) in [(2, 2), (5, 3), (12, 7)] {
            let m = build_regular(nx, nz, 3.0, 1.0).unwrap();
            let e = m.n_edges() + m.wall_edges.len();
            assert_eq!(m.n_vertices() as i64 - e as i64 + m.n_cells() as i64, 0);
            assert_eq!(m.wall_edges.len(), 2 * nx);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(build_regular(1, 4, 1.0, 1.0).is_err());
        assert!(build_regular(4, 4, 0.0, 1.0).is_err());
        assert!(build_regular(4, 4, 1.0, -1.0).is_err());
    }

    #[test]
    fn edge_normals_point_from_low_to_high_cell() {
        let m = build_regular(6, 4, 6.0, 4.0).unwrap();
        for e in &m.edges {
            let [i, j] = e.cells;
            let mut d = m.centroids[j] - m.centroids[i];
            d.x -= m.lx * (d.x / m.lx).round();
            assert!(d.dot(e.normal) > 0.0);
            // e_minus -> e_plus rotated counterclockwise gives the normal.
            let t = m.corner(i, m.corner_of(i, e.ends[1]).unwrap()) - m.corner(i, m.corner_of(i, e.ends[0]).unwrap());
            assert!((t.perp() * (1.0 / t.norm()) - e.normal).norm() < 1e-14);
        }
    }

    #[test]
    fn seam_rows_repeat_pattern() {
        let m = build_regular(4, 3, 4.0, 3.0).unwrap();
        // Each strip has the same connectivity modulo a column shift.
        for r in 0..3 {
            for k in 0..4 {
                for s in 0..2 {
                    let a = m.triangles[r * 8 + 2 * k + s].vertices;
                    let b = m.triangles[r * 8 + 2 * ((k + 1) % 4) + s].vertices;
                    for c in 0..3 {
                        assert_eq!((a[c] % 4 + 1) % 4, b[c] % 4);
                    }
                }
            }
        }
    }
}

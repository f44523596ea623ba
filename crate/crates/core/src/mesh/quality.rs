use super::{DualGeometry, Mesh};

#[derive(Clone, Debug, PartialEq)]
pub struct MeshQualityReport {
    /// `max h / min h` over the dual edges of each vertex.
    pub delta_h: Vec<f64>,
    pub max_delta_h: f64,
    pub min_h: f64,
    pub max_h: f64,
    /// Smallest interior angle over all triangles, in radians.
    pub min_angle: f64,
}

/// Measures dual-cell distortion. Vertices whose dual edges include a
/// nonpositive length get an infinite `delta_h`.
pub fn quality(mesh: &Mesh, dual: &DualGeometry) -> MeshQualityReport {
    let n = mesh.n_vertices();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for (e, edge) in mesh.edges.iter().enumerate() {
        for &v in &edge.ends {
            lo[v] = lo[v].min(dual.h[e]);
            hi[v] = hi[v].max(dual.h[e]);
        }
    }
    let delta_h: Vec<f64> =
        lo.iter().zip(&hi).map(|(&l, &h)| if l > 0.0 { h / l } else { f64::INFINITY }).collect();
    let min_angle = (0..mesh.n_cells())
        .flat_map(|t| {
            let c = mesh.corners(t);
            (0..3).map(move |k| {
                let u = c[(k + 1) % 3] - c[k];
                let w = c[(k + 2) % 3] - c[k];
                u.cross(w).abs().atan2(u.dot(w))
            })
        })
        .fold(f64::INFINITY, f64::min);
    MeshQualityReport {
        max_delta_h: delta_h.iter().copied().fold(1.0, f64::max),
        delta_h,
        min_h: dual.h.iter().copied().fold(f64::INFINITY, f64::min),
        max_h: dual.h.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        min_angle,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_dual, build_regular};

    #[test]
    fn equilateral_mesh_is_undistorted() {
        let m = build_regular(12, 8, 12.0, 8.0 * 3f64.sqrt() / 2.0).unwrap();
        let q = quality(&m, &build_dual(&m).unwrap());
        assert!(q.delta_h.iter().all(|&d| (d - 1.0).abs() < 1e-12));
        assert!((q.min_angle - std::f64::consts::FRAC_PI_3).abs() < 1e-12);
    }

    #[test]
    fn stretched_vertex_ratio() {
        let m = build_regular(6, 4, 6.0, 4.0 * 3f64.sqrt() / 2.0).unwrap();
        let mut d = build_dual(&m).unwrap();
        let v = 2 * 6 + 3;
        let base = d.h[0];
        for (e, edge) in m.edges.iter().enumerate() {
            d.h[e] = if edge.ends[0] == v { 2.0 * base } else { base };
        }
        let q = quality(&m, &d);
        assert!((q.delta_h[v] - 2.0).abs() < 1e-12);
    }
}

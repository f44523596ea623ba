use std::fmt;

use super::{DualGeometry, Mesh};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entity {
    Mesh,
    Cell(usize),
    Edge(usize),
    WallEdge(usize),
    Vertex(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Orientation,
    TotalArea,
    WallPlacement,
    DualLength,
    DualCell,
    KitePartition,
    CoefficientSum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub entity: Entity,
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {:?}: {}", self.entity, self.kind, self.detail)
    }
}

/// Lists every broken mesh or dual invariant; empty means valid.
pub fn validate(mesh: &Mesh, dual: &DualGeometry) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |entity, kind, detail: String| out.push(Violation { entity, kind, detail });
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);

    for (t, &a) in mesh.areas.iter().enumerate() {
        if !(a > 0.0) {
            push(Entity::Cell(t), ViolationKind::Orientation, format!("signed area {a:e} is not positive"));
        }
    }
    let total = mesh.total_area();
    if rel(total, mesh.lx * mesh.lz) > 1e-12 {
        push(Entity::Mesh, ViolationKind::TotalArea, format!("area {total} differs from {}", mesh.lx * mesh.lz));
    }
    let tol = 1e-12 * mesh.lz;
    for (w, edge) in mesh.wall_edges.iter().enumerate() {
        let z: Vec<f64> = edge.ends.iter().map(|&v| mesh.vertices[v].z).collect();
        let bottom = z.iter().all(|z| z.abs() <= tol);
        let top = z.iter().all(|z| (z - mesh.lz).abs() <= tol);
        if !(bottom || top) {
            push(Entity::WallEdge(w), ViolationKind::WallPlacement, "single-cell edge off the walls".into());
        }
    }
    for (e, &h) in dual.h.iter().enumerate() {
        if !(h > 0.0) {
            push(Entity::Edge(e), ViolationKind::DualLength, format!("h = {h:e}"));
        }
    }
    for t in 0..mesh.n_cells() {
        let s: f64 = dual.kites[t].iter().sum();
        if rel(s, mesh.areas[t]) > 1e-12 {
            push(Entity::Cell(t), ViolationKind::KitePartition, format!("kites sum to {s}, area {}", mesh.areas[t]));
        }
    }
    for v in 0..mesh.n_vertices() {
        let fan = &dual.fans[v];
        if fan.broken || !dual.cell_is_convex(mesh, v) {
            push(Entity::Vertex(v), ViolationKind::DualCell, "dual cell is not a simple convex polygon".into());
            continue;
        }
        let s: f64 = fan.cells.iter().map(|&t| dual.coefficient(mesh, t, v)).sum();
        if (s - 1.0).abs() > 1e-12 {
            push(Entity::Vertex(v), ViolationKind::CoefficientSum, format!("coefficients sum to {s}"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_regular, perturb_interior, Mesh};

    #[test]
    fn regular_mesh_is_valid() {
        let m = build_regular(10, 6, 5.0, 3.0).unwrap();
        assert!(validate(&m, &DualGeometry::compute(&m)).is_empty());
    }

    #[test]
    fn flipped_triangle_is_reported_once() {
        let m = build_regular(8, 6, 8.0, 6.0 * 3f64.sqrt() / 2.0).unwrap();
        let mut tris = m.triangles.clone();
        let t = &mut tris[37];
        t.vertices.swap(1, 2);
        t.shifts.swap(1, 2);
        let bad = Mesh::from_parts(m.lx, m.lz, m.vertices.clone(), tris, m.meta.clone()).unwrap();
        let v = validate(&bad, &DualGeometry::compute(&bad));
        let flips: Vec<_> = v.iter().filter(|x| x.kind == ViolationKind::Orientation).collect();
        assert_eq!(flips.len(), 1);
        assert_eq!(flips[0].entity, Entity::Cell(37));
    }

    #[test]
    fn strong_perturbation_is_flagged() {
        let m = build_regular(20, 10, 10.0, 5.0 * 3f64.sqrt() / 2.0).unwrap();
        let found = (0..50u64).any(|seed| {
            let p = perturb_interior(&m, 0.45, seed).unwrap();
            validate(&p, &DualGeometry::compute(&p)).iter().any(|x| x.kind == ViolationKind::DualLength)
        });
        assert!(found);
    }
}

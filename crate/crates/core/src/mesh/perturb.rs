use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Mesh;
use crate::error::{Error, Result};

/// Randomly displaces the vertices that belong to no boundary triangle.
///
/// A boundary triangle is any triangle touching a wall. Each moved vertex
/// gets `dx = c * fx * r1` and `dz = c * fz * r2`, where `r1` then `r2` are
/// drawn uniformly from `[-0.5, 0.5)` by a `ChaCha8Rng` seeded with
/// `seed_from_u64(seed)`, visiting vertices in index order. ChaCha output is
/// specified bit-for-bit, so meshes are reproducible across platforms.
pub fn perturb_interior(mesh: &Mesh, c: f64, seed: u64) -> Result<Mesh> {
    if !(0.0..0.5).contains(&c) {
        return Err(Error::invalid(format!("perturbation amplitude must lie in [0, 0.5), got {c}")));
    }
    let (fx, fz) = (mesh.fx(), mesh.fz());
    let wall = mesh.wall_vertices();
    let mut fixed = vec![false; mesh.n_vertices()];
    for tri in &mesh.triangles {
        if tri.vertices.iter().any(|&v| wall[v]) {
            for &v in &tri.vertices {
                fixed[v] = true;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertices = mesh.vertices.clone();
    if c > 0.0 {
        for (p, _) in vertices.iter_mut().zip(&fixed).filter(|(_, &f)| !f) {
            let r1: f64 = rng.random::<f64>() - 0.5;
            let r2: f64 = rng.random::<f64>() - 0.5;
            p.x += c * fx * r1;
            p.z += c * fz * r2;
        }
    }
    let mut meta = mesh.meta.clone();
    meta.seed = Some(seed);
    meta.perturbation = c;
    Mesh::from_parts(mesh.lx, mesh.lz, vertices, mesh.triangles.clone(), meta)
}

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soundproof::mesh::{build_dual, build_regular, perturb_interior};
use soundproof::models::{make_anelastic, make_boussinesq, make_pseudo_incompressible, Quadrature};
use soundproof::operators::velocity_from_stream;
use soundproof::{CellField, DualGeometry, EdgeField, Mesh, ModelSpec, Profile, VertexField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random perturbed mesh with at most `max_cells` cells and an acute dual.
pub fn random_mesh(rng: &mut ChaCha8Rng, max_cells: usize) -> (Mesh, DualGeometry) {
    loop {
        let nx = rng.random_range(4..=10usize);
        let nz_max = (max_cells / (2 * nx)).max(3);
        let nz = rng.random_range(3..=nz_max.min(8));
        if 2 * nx * nz > max_cells {
            continue;
        }
        let fz = rng.random_range(0.75..1.0);
        let base = build_regular(nx, nz, nx as f64, nz as f64 * fz).unwrap();
        let mesh = perturb_interior(&base, 0.2, rng.random()).unwrap();
        if let Ok(dual) = build_dual(&mesh) {
            return (mesh, dual);
        }
    }
}

/// Random stream function, constant along each wall.
pub fn random_stream(mesh: &Mesh, rng: &mut ChaCha8Rng) -> VertexField {
    let (bottom, top): (f64, f64) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    VertexField::from_fn(mesh.n_vertices(), |v| {
        let z = mesh.vertices[v].z;
        if z.abs() < 1e-12 {
            bottom
        } else if (z - mesh.lz).abs() < 1e-12 {
            top
        } else {
            rng.random_range(-1.0..1.0)
        }
    })
}

pub fn random_velocity(mesh: &Mesh, model: &ModelSpec, rng: &mut ChaCha8Rng) -> EdgeField {
    velocity_from_stream(&random_stream(mesh, rng), &model.weights, mesh)
}

pub fn random_theta(mesh: &Mesh, rng: &mut ChaCha8Rng, positive: bool) -> CellField {
    CellField::from_fn(mesh.n_cells(), |_| {
        let x: f64 = rng.random_range(-1.0..1.0);
        if positive {
            1.5 + x
        } else {
            x
        }
    })
}

/// One specification of each kind on `mesh`, with stratified weights.
pub fn all_models(mesh: &Mesh) -> Vec<ModelSpec> {
    let lz = mesh.lz;
    vec![
        make_boussinesq(mesh),
        make_anelastic(
            mesh,
            Profile::Exp { a: 1.0, k: -1.0 / lz },
            Profile::Exp { a: 1.0, k: 0.5 / lz },
            |z| 1.0 - 0.3 * z / lz,
            1.0,
            1.0,
            Quadrature::Midpoint,
        )
        .unwrap(),
        make_pseudo_incompressible(
            mesh,
            Profile::Exp { a: 1.0, k: -1.0 / lz },
            Profile::Exp { a: 1.0, k: 0.5 / lz },
            1.0,
            Quadrature::Midpoint,
        )
        .unwrap(),
    ]
}

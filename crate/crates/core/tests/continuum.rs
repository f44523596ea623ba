//! Operators against the continuous equations on smooth fields.

use std::f64::consts::PI;

use soundproof::mesh::{build_dual, build_regular};
use soundproof::models::{make_boussinesq, ModelKind};
use soundproof::operators::{advection, flat, forcing, velocity_from_stream, vorticity};
use soundproof::{CellField, DualGeometry, EdgeField, Mesh, VertexField};

const LX: f64 = 2.0;
const LZ: f64 = 1.0;
const KX: f64 = 2.0 * PI / LX;
const KZ: f64 = PI / LZ;

fn psi(x: f64, z: f64) -> f64 {
    (KX * x).sin() * (KZ * z).sin() + 0.3 * (2.0 * KZ * z).sin() * (KX * x).cos()
}

fn grad_psi(x: f64, z: f64) -> (f64, f64) {
    let px = KX * (KX * x).cos() * (KZ * z).sin() - 0.3 * KX * (2.0 * KZ * z).sin() * (KX * x).sin();
    let pz = KZ * (KX * x).sin() * (KZ * z).cos() + 0.6 * KZ * (2.0 * KZ * z).cos() * (KX * x).cos();
    (px, pz)
}

fn lap_psi(x: f64, z: f64) -> f64 {
    -(KX * KX + KZ * KZ) * (KX * x).sin() * (KZ * z).sin()
        - 0.3 * (KX * KX + 4.0 * KZ * KZ) * (2.0 * KZ * z).sin() * (KX * x).cos()
}

fn near_equilateral(nx: usize) -> (Mesh, DualGeometry) {
    let nz = (nx as f64 * LZ / LX * 2.0 / 3f64.sqrt()).round() as usize;
    let mesh = build_regular(nx, nz, LX, LZ).unwrap();
    let dual = build_dual(&mesh).unwrap();
    (mesh, dual)
}

fn stream_velocity(mesh: &Mesh) -> EdgeField {
    let p = VertexField::from_fn(mesh.n_vertices(), |v| psi(mesh.vertices[v].x, mesh.vertices[v].z));
    velocity_from_stream(&p, &soundproof::WeightSet::uniform(mesh), mesh)
}

/// Edges whose ends are both away from the walls.
fn interior_edges(mesh: &Mesh) -> Vec<usize> {
    let wall = mesh.wall_vertices();
    (0..mesh.n_edges()).filter(|&e| mesh.edges[e].ends.iter().all(|&v| !wall[v])).collect()
}

#[test]
fn stream_velocity_is_the_normal_component() {
    let mut errs = Vec::new();
    for nx in [16, 32] {
        let (mesh, _) = near_equilateral(nx);
        let v = stream_velocity(&mesh);
        let err = (0..mesh.n_edges()).fold(0.0f64, |m, e| {
            let (c, n) = (mesh.edges[e].midpoint, mesh.edges[e].normal);
            let (px, pz) = grad_psi(c.x, c.z);
            m.max((v[e] - (-pz * n.x + px * n.z)).abs())
        });
        errs.push(err);
    }
    assert!(errs[1] < 0.3 * errs[0], "{errs:?}");
}

#[test]
fn vertex_circulation_is_minus_vorticity_times_area() {
    let (mesh, dual) = near_equilateral(32);
    let v = stream_velocity(&mesh);
    let w = soundproof::WeightSet::uniform(&mesh);
    let circ = vorticity(&flat(&v, &w, &dual), &dual);
    let wall = mesh.wall_vertices();
    let mut worst = 0.0f64;
    for n in (0..mesh.n_vertices()).filter(|&n| !wall[n]) {
        let p = mesh.vertices[n];
        let want = -lap_psi(p.x, p.z) * dual.cell_areas[n];
        worst = worst.max((circ[n] - want).abs() / dual.cell_areas[n]);
    }
    assert!(worst < 0.05 * (KX * KX + KZ * KZ), "worst {worst}");
}

#[test]
fn advection_matches_the_lamb_vector_away_from_walls() {
    // With u = (-psi_z, psi_x) and zeta = lap psi, the rotational advection
    // term is zeta (k x u) . n = zeta (-w n_x + u n_z).
    let mut errs = Vec::new();
    for nx in [16usize, 32, 64] {
        let (mesh, dual) = near_equilateral(nx);
        let model = make_boussinesq(&mesh);
        let v = stream_velocity(&mesh);
        let adv = advection(&v, None, &model.weights, &mesh, &dual, ModelKind::Boussinesq).unwrap();
        let (mut num, mut den) = (0.0f64, 0.0f64);
        for e in interior_edges(&mesh) {
            let (c, n) = (mesh.edges[e].midpoint, mesh.edges[e].normal);
            let (px, pz) = grad_psi(c.x, c.z);
            let (u, w) = (-pz, px);
            let want = lap_psi(c.x, c.z) * (-w * n.x + u * n.z);
            num = num.max((adv[e] - want).abs());
            den = den.max(want.abs());
        }
        errs.push(num / den);
    }
    assert!(errs[2] < 0.05, "{errs:?}");
    assert!(errs[2] < errs[1] && errs[1] < errs[0], "{errs:?}");
}

#[test]
fn boussinesq_forcing_is_minus_b_vertical() {
    // Modulo a gradient F is -b n_z, which makes b = -N^2 z stable.
    // Compare circulations around interior dual cells.
    let (mesh, dual) = near_equilateral(32);
    let model = make_boussinesq(&mesh);
    let bf = |x: f64, z: f64| (PI * x).sin() * (-(z - 0.5).powi(2) * 10.0).exp();
    let b = CellField::from_fn(mesh.n_cells(), |i| bf(mesh.centroids[i].x, mesh.centroids[i].z));
    let f = forcing(model.forcing_model(), &b, None, &model.weights, &mesh, &dual).unwrap();
    let want = EdgeField::from_fn(mesh.n_edges(), |e| {
        let m = mesh.edges[e].midpoint;
        -bf(m.x, m.z) * mesh.edges[e].normal.z
    });
    let hf = EdgeField::from_fn(f.len(), |e| dual.h[e] * f[e]);
    let hw = EdgeField::from_fn(f.len(), |e| dual.h[e] * want[e]);
    let (cf, cw) = (vorticity(&hf, &dual), vorticity(&hw, &dual));
    let wall = mesh.wall_vertices();
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for n in (0..mesh.n_vertices()).filter(|&n| !wall[n]) {
        num = num.max((cf[n] - cw[n]).abs());
        den = den.max(cw[n].abs());
    }
    assert!(num / den < 0.1, "relative circulation error {}", num / den);
}

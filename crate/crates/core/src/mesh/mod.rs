//! Triangular meshes of the channel `[0, Lx] x [0, Lz]`, periodic in `x`.
//!
//! Vertices carry a representative position. A triangle stores, per corner,
//! an integer multiple of `Lx` to add to that position, so every triangle has
//! an unwrapped local frame even when it straddles the seam. Perturbation
//! moves representative positions and keeps the shifts.

mod dual;
mod geometry;
mod io;
mod perturb;
mod quality;
mod regular;
mod validate;

use std::collections::HashMap;

pub use dual::{build_dual, DualGeometry, EdgeStencil, Fan, FanStep, StencilSide};
pub use geometry::{circumcenter, signed_area, Point};
pub use io::{read_mesh, write_mesh};
pub use perturb::perturb_interior;
pub use quality::{quality, MeshQualityReport};
pub use regular::build_regular;
pub use validate::{validate, Entity, Violation, ViolationKind};

use crate::error::{Error, Result};

/// A triangle given by counterclockwise vertex ids and per-corner periodic shifts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub shifts: [i32; 3],
}

/// An edge shared by two triangles.
///
/// The stored orientation runs from `cells[0]` to `cells[1]` with
/// `cells[0] < cells[1]`. `ends = [e_minus, e_plus]` is ordered so that the
/// unit normal is the counterclockwise rotation of `e_plus - e_minus`;
/// equivalently, turning from `cells[0]` to `cells[1]` is counterclockwise
/// about `e_minus`.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub cells: [usize; 2],
    pub ends: [usize; 2],
    /// Primal length `f_ij`.
    pub length: f64,
    /// Unit normal pointing from `cells[0]` into `cells[1]`.
    pub normal: Point,
    /// Local side index of this edge in each cell.
    pub sides: [usize; 2],
    /// Translation in `x` taking coordinates in the frame of `cells[1]`
    /// to the frame of `cells[0]`.
    pub offset: f64,
    /// Midpoint, wrapped into `[0, Lx)`.
    pub midpoint: Point,
}

/// An edge with a single adjacent triangle, lying on a wall.
#[derive(Clone, Debug, PartialEq)]
pub struct WallEdge {
    pub cell: usize,
    pub ends: [usize; 2],
    pub length: f64,
    pub side: usize,
}

/// What lies across side `k` of a triangle (the side from corner `k` to corner `k + 1`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Side {
    /// Interior edge; `sign` is `+1` when the triangle is `cells[0]` of the edge.
    Interior { edge: usize, sign: f64 },
    Wall(usize),
}

/// Construction metadata carried through export and import.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshMeta {
    pub nx: usize,
    pub nz: usize,
    pub seed: Option<u64>,
    pub perturbation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub lx: f64,
    pub lz: f64,
    pub periodic: bool,
    pub vertices: Vec<Point>,
    pub triangles: Vec<Triangle>,
    pub edges: Vec<Edge>,
    pub wall_edges: Vec<WallEdge>,
    /// Per triangle, what lies across each of its three sides.
    pub sides: Vec<[Side; 3]>,
    /// Signed triangle areas `Omega_i`.
    pub areas: Vec<f64>,
    /// Triangle centroids wrapped into `[0, Lx)`.
    pub centroids: Vec<Point>,
    pub meta: MeshMeta,
}

impl Mesh {
    /// Assembles edge and neighbor structure from vertices and triangles.
    ///
    /// Geometry is not checked here beyond what is needed to build the
    /// topology; see [`validate`] for the full invariant list.
    pub fn from_parts(
        lx: f64,
        lz: f64,
        vertices: Vec<Point>,
        triangles: Vec<Triangle>,
        meta: MeshMeta,
    ) -> Result<Mesh> {
        if !(lx > 0.0 && lz > 0.0) {
            return Err(Error::invalid(format!("domain lengths must be positive, got {lx} x {lz}")));
        }
        let nv = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            if let Some(&v) = tri.vertices.iter().find(|&&v| v >= nv) {
                return Err(Error::Mesh(format!("triangle {t} references missing vertex {v}")));
            }
        }

        let mut mesh = Mesh {
            lx,
            lz,
            periodic: true,
            vertices,
            triangles,
            edges: Vec::new(),
            wall_edges: Vec::new(),
            sides: Vec::new(),
            areas: Vec::new(),
            centroids: Vec::new(),
            meta,
        };
        mesh.areas = (0..mesh.n_cells()).map(|t| {
            let [a, b, c] = mesh.corners(t);
            signed_area(a, b, c)
        }).collect();
        mesh.centroids = (0..mesh.n_cells()).map(|t| {
            let [a, b, c] = mesh.corners(t);
            let g = (a + b + c) * (1.0 / 3.0);
            Point::new(g.x.rem_euclid(lx), g.z)
        }).collect();

        // Edge key: (low vertex, high vertex, shift of high relative to low).
        let mut incident: HashMap<(usize, usize, i32), Vec<(usize, usize)>> = HashMap::new();
        let mut order = Vec::new();
        for (t, tri) in mesh.triangles.iter().enumerate() {
            for k in 0..3 {
                let (va, vb) = (tri.vertices[k], tri.vertices[(k + 1) % 3]);
                let (sa, sb) = (tri.shifts[k], tri.shifts[(k + 1) % 3]);
                if va == vb {
                    return Err(Error::Mesh(format!("triangle {t} has a degenerate side")));
                }
                let key = if va < vb { (va, vb, sb - sa) } else { (vb, va, sa - sb) };
                let list = incident.entry(key).or_default();
                if list.is_empty() {
                    order.push(key);
                }
                list.push((t, k));
            }
        }

        let placeholder = Side::Wall(usize::MAX);
        mesh.sides = vec![[placeholder; 3]; mesh.n_cells()];
        for key in order {
            let list = &incident[&key];
            match *list.as_slice() {
                [(t, k)] => {
                    let [a, b] = mesh.side_points(t, k);
                    let tri = mesh.triangles[t];
                    mesh.sides[t][k] = Side::Wall(mesh.wall_edges.len());
                    mesh.wall_edges.push(WallEdge {
                        cell: t,
                        ends: [tri.vertices[k], tri.vertices[(k + 1) % 3]],
                        length: (b - a).norm(),
                        side: k,
                    });
                }
                [(t0, k0), (t1, k1)] => {
                    if t0 == t1 {
                        return Err(Error::Mesh(format!("triangle {t0} borders itself")));
                    }
                    let ((i, ki), (j, kj)) = if t0 < t1 { ((t0, k0), (t1, k1)) } else { ((t1, k1), (t0, k0)) };
                    let edge = mesh.make_edge(i, ki, j, kj);
                    let id = mesh.edges.len();
                    mesh.sides[i][ki] = Side::Interior { edge: id, sign: 1.0 };
                    mesh.sides[j][kj] = Side::Interior { edge: id, sign: -1.0 };
                    mesh.edges.push(edge);
                }
                _ => {
                    return Err(Error::Mesh(format!(
                        "edge between vertices {} and {} borders {} triangles",
                        key.0,
                        key.1,
                        list.len()
                    )))
                }
            }
        }
        Ok(mesh)
    }

    fn make_edge(&self, i: usize, ki: usize, j: usize, kj: usize) -> Edge {
        // In cell i the side runs a -> b counterclockwise; its outward normal
        // is the clockwise rotation of b - a, so e_minus = b and e_plus = a.
        let [a, b] = self.side_points(i, ki);
        let d = b - a;
        let length = d.norm();
        let normal = Point::new(d.z, -d.x) * (1.0 / length);
        let ti = self.triangles[i];
        let e_minus = ti.vertices[(ki + 1) % 3];
        let e_plus = ti.vertices[ki];
        let si = ti.shifts[(ki + 1) % 3];
        let tj = self.triangles[j];
        let cj = (0..3).find(|&c| tj.vertices[c] == e_minus).expect("shared vertex");
        let offset = f64::from(si - tj.shifts[cj]) * self.lx;
        let m = (a + b) * 0.5;
        Edge {
            cells: [i, j],
            ends: [e_minus, e_plus],
            length,
            normal,
            sides: [ki, kj],
            offset,
            midpoint: Point::new(m.x.rem_euclid(self.lx), m.z),
        }
    }

    pub fn n_cells(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Column spacing `Lx / Nx`.
    pub fn fx(&self) -> f64 {
        self.lx / self.meta.nx as f64
    }

    /// Row height `Lz / Nz`.
    pub fn fz(&self) -> f64 {
        self.lz / self.meta.nz as f64
    }

    /// Position of corner `k` of triangle `t` in the triangle's frame.
    pub fn corner(&self, t: usize, k: usize) -> Point {
        let tri = &self.triangles[t];
        let p = self.vertices[tri.vertices[k]];
        Point::new(p.x + f64::from(tri.shifts[k]) * self.lx, p.z)
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        [self.corner(t, 0), self.corner(t, 1), self.corner(t, 2)]
    }

    /// Endpoints of side `k` of triangle `t`, counterclockwise.
    pub fn side_points(&self, t: usize, k: usize) -> [Point; 2] {
        [self.corner(t, k), self.corner(t, (k + 1) % 3)]
    }

    /// Local corner index of vertex `v` in triangle `t`.
    pub fn corner_of(&self, t: usize, v: usize) -> Option<usize> {
        self.triangles[t].vertices.iter().position(|&u| u == v)
    }

    /// Interior neighbors of cell `t` as `(neighbor, edge, sign)`.
    pub fn neighbors(&self, t: usize) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.sides[t].iter().filter_map(move |s| match *s {
            Side::Interior { edge, sign } => {
                let e = &self.edges[edge];
                let other = if sign > 0.0 { e.cells[1] } else { e.cells[0] };
                Some((other, edge, sign))
            }
            Side::Wall(_) => None,
        })
    }

    /// Whether vertex `v` lies on a wall, judged by the wall-edge list.
    pub fn wall_vertices(&self) -> Vec<bool> {
        let mut on = vec![false; self.n_vertices()];
        for w in &self.wall_edges {
            on[w.ends[0]] = true;
            on[w.ends[1]] = true;
        }
        on
    }

    /// Cell containing `p`, with `x` taken modulo `Lx`.
    pub fn locate(&self, p: Point) -> Option<usize> {
        if p.z < 0.0 || p.z > self.lz {
            return None;
        }
        let x = p.x.rem_euclid(self.lx);
        let tol = 1e-12 * (self.lx + self.lz);
        (0..self.n_cells()).find(|&t| {
            let [a, b, c] = self.corners(t);
            [-self.lx, 0.0, self.lx].iter().any(|&s| {
                let q = Point::new(x + s, p.z);
                signed_area(a, b, q) >= -tol * (b - a).norm()
                    && signed_area(b, c, q) >= -tol * (c - b).norm()
                    && signed_area(c, a, q) >= -tol * (a - c).norm()
            })
        })
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }
}

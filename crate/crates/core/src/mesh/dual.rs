//! Circumcentric dual geometry: dual lengths, kites, vertex fans, stencils.

use super::{circumcenter, signed_area, Mesh, Point, Side};
use crate::error::{Error, Result};

/// One dual edge of a vertex fan, crossed from `cells[k]` to `cells[k + 1]`.
///
/// A one-form stored on `edge` is read in the traversal direction by
/// multiplying with `sign`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FanStep {
    pub edge: usize,
    pub sign: f64,
}

/// Incident triangles of a vertex in counterclockwise order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Fan {
    pub cells: Vec<usize>,
    /// Dual edges between consecutive cells; for a closed fan the last step
    /// returns to the first cell.
    pub steps: Vec<FanStep>,
    pub closed: bool,
    /// Set when consecutive cells could not be matched through an edge.
    pub broken: bool,
}

/// Data for one endpoint of an edge `(i, j)` in the advection stencil.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StencilSide {
    pub vertex: usize,
    /// The other edge of `i` meeting `vertex`, oriented away from `i`;
    /// `None` when it is a wall.
    pub from_i: Option<FanStep>,
    pub from_j: Option<FanStep>,
    /// `K^e_i` and `K^e_j` for this vertex.
    pub k_i: f64,
    pub k_j: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeStencil {
    pub minus: StencilSide,
    pub plus: StencilSide,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualGeometry {
    /// Circumcenter of each triangle, in the triangle's frame.
    pub circumcenters: Vec<Point>,
    /// Signed dual length `h_ij` per interior edge, positive when the
    /// circumcenters are ordered along the edge normal.
    pub h: Vec<f64>,
    /// Kite areas `|zeta_e ∩ T_k|` per triangle corner.
    pub kites: Vec<[f64; 3]>,
    /// Dual cell area `|zeta_e|` per vertex.
    pub cell_areas: Vec<f64>,
    pub fans: Vec<Fan>,
    pub stencils: Vec<EdgeStencil>,
}

/// Builds the dual geometry and rejects meshes whose dual degenerates.
pub fn build_dual(mesh: &Mesh) -> Result<DualGeometry> {
    let dual = DualGeometry::compute(mesh);
    if let Some((e, &h)) = dual.h.iter().enumerate().find(|(_, &h)| !(h > 0.0)) {
        let [i, j] = mesh.edges[e].cells;
        return Err(Error::MeshQuality(format!("dual length h = {h:e} at edge {e} (cells {i}, {j})")));
    }
    for v in 0..mesh.n_vertices() {
        if dual.fans[v].broken {
            return Err(Error::MeshQuality(format!("vertex {v} has a broken triangle fan")));
        }
        if !dual.cell_is_convex(mesh, v) {
            return Err(Error::MeshQuality(format!("dual cell of vertex {v} self-intersects")));
        }
    }
    Ok(dual)
}

fn kites_of(c: [Point; 3], o: Point) -> [f64; 3] {
    let mut out = [0.0; 3];
    for k in 0..3 {
        let (p0, p1, p2) = (c[k], c[(k + 1) % 3], c[(k + 2) % 3]);
        let m01 = (p0 + p1) * 0.5;
        let m20 = (p2 + p0) * 0.5;
        out[k] = signed_area(p0, m01, o) + signed_area(p0, o, m20);
    }
    out
}

impl DualGeometry {
    /// Computes the dual without rejecting degenerate configurations.
    pub fn compute(mesh: &Mesh) -> DualGeometry {
        let circumcenters: Vec<Point> = (0..mesh.n_cells())
            .map(|t| {
                let [a, b, c] = mesh.corners(t);
                circumcenter(a, b, c)
            })
            .collect();

        let h = mesh
            .edges
            .iter()
            .map(|e| {
                let [i, j] = e.cells;
                let cj = circumcenters[j] + Point::new(e.offset, 0.0);
                (cj - circumcenters[i]).dot(e.normal)
            })
            .collect();

        let kites: Vec<[f64; 3]> =
            (0..mesh.n_cells()).map(|t| kites_of(mesh.corners(t), circumcenters[t])).collect();

        let mut cell_areas = vec![0.0; mesh.n_vertices()];
        let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); mesh.n_vertices()];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            for k in 0..3 {
                cell_areas[tri.vertices[k]] += kites[t][k];
                incident[tri.vertices[k]].push((t, k));
            }
        }

        let on_wall = mesh.wall_vertices();
        let fans = incident
            .iter()
            .enumerate()
            .map(|(v, list)| build_fan(mesh, list, on_wall[v]))
            .collect();

        let mut dual = DualGeometry { circumcenters, h, kites, cell_areas, fans, stencils: Vec::new() };
        dual.stencils = (0..mesh.n_edges()).map(|e| dual.stencil(mesh, e)).collect();
        dual
    }

    /// `K^e_t = |zeta_e ∩ T_t| / |zeta_e|` for vertex `v` of triangle `t`.
    pub fn coefficient(&self, mesh: &Mesh, t: usize, v: usize) -> f64 {
        let k = mesh.corner_of(t, v).expect("vertex of triangle");
        self.kites[t][k] / self.cell_areas[v]
    }

    fn stencil(&self, mesh: &Mesh, e: usize) -> EdgeStencil {
        let edge = &mesh.edges[e];
        let side = |v: usize| {
            let other = |which: usize| {
                let c = edge.cells[which];
                let k = mesh.corner_of(c, v).expect("edge end in cell");
                let s = if edge.sides[which] == k { (k + 2) % 3 } else { k };
                let step = match mesh.sides[c][s] {
                    Side::Interior { edge, sign } => Some(FanStep { edge, sign }),
                    Side::Wall(_) => None,
                };
                (step, self.kites[c][k] / self.cell_areas[v])
            };
            let (from_i, k_i) = other(0);
            let (from_j, k_j) = other(1);
            StencilSide { vertex: v, from_i, from_j, k_i, k_j }
        };
        EdgeStencil { minus: side(edge.ends[0]), plus: side(edge.ends[1]) }
    }

    /// Dual cell of vertex `v` as a counterclockwise polygon around the
    /// vertex's representative position. Wall cells are closed along the wall.
    pub fn polygon(&self, mesh: &Mesh, v: usize) -> Vec<Point> {
        let fan = &self.fans[v];
        let home = mesh.vertices[v];
        let to_home = |t: usize, p: Point| {
            let k = mesh.corner_of(t, v).expect("fan cell");
            p - (mesh.corner(t, k) - home)
        };
        let mut poly = Vec::with_capacity(fan.cells.len() + 3);
        if !fan.closed {
            let first = fan.cells[0];
            let k = mesh.corner_of(first, v).unwrap();
            let [a, b] = mesh.side_points(first, k);
            poly.push(home);
            poly.push(to_home(first, (a + b) * 0.5));
        }
        for &t in &fan.cells {
            poly.push(to_home(t, self.circumcenters[t]));
        }
        if !fan.closed {
            let last = *fan.cells.last().unwrap();
            let k = mesh.corner_of(last, v).unwrap();
            let [a, b] = mesh.side_points(last, (k + 2) % 3);
            poly.push(to_home(last, (a + b) * 0.5));
        }
        poly
    }

    /// Whether the dual polygon of `v` is convex with positive orientation.
    pub fn cell_is_convex(&self, mesh: &Mesh, v: usize) -> bool {
        let poly = self.polygon(mesh, v);
        let n = poly.len();
        if n < 3 {
            return false;
        }
        let scale = poly.iter().map(|p| (*p - poly[0]).norm()).fold(0.0, f64::max);
        let tol = 1e-12 * scale * scale;
        let mut area = 0.0;
        for k in 0..n {
            let (a, b, c) = (poly[k], poly[(k + 1) % n], poly[(k + 2) % n]);
            if (b - a).cross(c - b) < -tol {
                return false;
            }
            area += a.cross(b);
        }
        area > 0.0
    }
}

fn build_fan(mesh: &Mesh, list: &[(usize, usize)], on_wall: bool) -> Fan {
    let mut items: Vec<(f64, usize, usize)> = list
        .iter()
        .map(|&(t, k)| {
            let [a, b, c] = mesh.corners(t);
            let d = (a + b + c) * (1.0 / 3.0) - mesh.corner(t, k);
            (d.z.atan2(d.x), t, k)
        })
        .collect();
    items.sort_by(|p, q| p.0.total_cmp(&q.0));
    let cells: Vec<usize> = items.iter().map(|x| x.1).collect();
    let closed = !on_wall;
    let n = items.len();
    let pairs = if closed { n } else { n.saturating_sub(1) };
    let mut steps = Vec::with_capacity(pairs);
    let mut broken = n == 0;
    for p in 0..pairs {
        let (_, m, k) = items[p];
        let next = items[(p + 1) % n].1;
        let found = [k, (k + 2) % 3].iter().find_map(|&s| match mesh.sides[m][s] {
            Side::Interior { edge, sign } => {
                let e = &mesh.edges[edge];
                let other = if sign > 0.0 { e.cells[1] } else { e.cells[0] };
                (other == next).then_some(FanStep { edge, sign })
            }
            Side::Wall(_) => None,
        });
        match found {
            Some(step) => steps.push(step),
            None => broken = true,
        }
    }
    Fan { cells, steps, closed, broken }
}

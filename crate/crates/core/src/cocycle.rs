//! Triangulated torus with radial-gauge charts, transition functions and the
//! flux theorem `int B = sum over triangles of c_Delta`.
//!
//! Every vertex `alpha` owns a chart on its star with potential
//! `A_alpha = B/2 ((x - x_alpha) dy - (y - y_alpha) dx)`. Two neighbouring
//! potentials differ by `d chi_alpha_beta` with the linear function
//! `chi_alpha_beta = B/2 ((x_beta - x_alpha) y - (y_beta - y_alpha) x)`.
//! That formula depends on the planar lift, so each edge is evaluated in the
//! star frame of its lower-index endpoint, where that endpoint sits at its
//! canonical position. The two triangles sharing an edge then see the same
//! transition function.

use std::collections::HashMap;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::TorusGeometry;
use crate::quadrature::pairwise_sum_real;

pub type Point = [f64; 2];

/// Bound on the spread of `chi_ab + chi_bc + chi_ca` over the three corners,
/// relative to `1 + |c|`.
pub const COCYCLE_CONSTANCY_TOL: f64 = 1e-10;
/// `|lhs - rhs| <= IDENTITY_REL_TOL |lhs| + IDENTITY_ABS_TOL`.
pub const IDENTITY_REL_TOL: f64 = 1e-10;
pub const IDENTITY_ABS_TOL: f64 = 1e-14;
/// `|sum c - B L1 L2| <= THEOREM_REL_TOL |B L1 L2|`.
pub const THEOREM_REL_TOL: f64 = 1e-9;
/// Distance of `flux / 2 pi` from the nearest integer.
pub const WEIL_TOL: f64 = 1e-9;
/// Mesh covering test: `|sum of areas - L1 L2| <= AREA_REL_TOL L1 L2`.
pub const AREA_REL_TOL: f64 = 1e-12;

/// Radial-gauge potential centred at a vertex lift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPotential {
    pub center: Point,
}

impl ChartPotential {
    pub fn new(center: Point) -> Self {
        Self { center }
    }

    /// Components `(A_x, A_y)` at `p`.
    pub fn one_form(&self, field: f64, p: Point) -> Point {
        [
            -0.5 * field * (p[1] - self.center[1]),
            0.5 * field * (p[0] - self.center[0]),
        ]
    }

    /// `int_from^to A` along the straight segment. Midpoint rule, exact here.
    pub fn line_integral(&self, field: f64, from: Point, to: Point) -> f64 {
        let mid = [(from[0] + to[0]) / 2.0, (from[1] + to[1]) / 2.0];
        let a = self.one_form(field, mid);
        a[0] * (to[0] - from[0]) + a[1] * (to[1] - from[1])
    }
}

/// `chi` with `A_alpha - A_beta = d chi`, in the frame where the two centres are given.
pub fn chi(field: f64, alpha: &ChartPotential, beta: &ChartPotential, p: Point) -> f64 {
    let dx = beta.center[0] - alpha.center[0];
    let dy = beta.center[1] - alpha.center[1];
    0.5 * field * (dx * p[1] - dy * p[0])
}

/// A mesh triangle: vertex ids in counter-clockwise order and the lattice
/// wrap of each directed edge `k -> k+1`, in units of `(L1, L2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshTriangle {
    pub vertices: [usize; 3],
    pub wraps: [[i32; 2]; 3],
}

impl MeshTriangle {
    /// Lift offsets of the corners with corner 0 at its canonical position.
    pub fn corner_offsets(&self) -> [[i32; 2]; 3] {
        let w = self.wraps;
        [[0, 0], w[0], [w[0][0] + w[1][0], w[0][1] + w[1][1]]]
    }
}

/// One triangle in a planar lift, with the canonical positions of its vertices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftedTriangle {
    pub vertices: [usize; 3],
    pub corners: [Point; 3],
    pub anchors: [Point; 3],
}

impl LiftedTriangle {
    /// Triangle whose corners are their own canonical positions.
    pub fn unwrapped(vertices: [usize; 3], corners: [Point; 3]) -> Self {
        Self {
            vertices,
            corners,
            anchors: corners,
        }
    }

    pub fn signed_area(&self) -> f64 {
        let [a, b, c] = self.corners;
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    fn is_unwrapped(&self) -> bool {
        self.corners == self.anchors
    }

    pub fn chart(&self, k: usize) -> ChartPotential {
        ChartPotential::new(self.corners[k])
    }

    /// `chi` between corners `i` and `j` at `p`, in the star frame of the
    /// lower-index vertex of the edge.
    pub fn edge_chi(&self, field: f64, i: usize, j: usize, p: Point) -> f64 {
        let lower = if (self.vertices[i], i) < (self.vertices[j], j) { i } else { j };
        let s = [
            self.corners[lower][0] - self.anchors[lower][0],
            self.corners[lower][1] - self.anchors[lower][1],
        ];
        let shift = |q: Point| [q[0] - s[0], q[1] - s[1]];
        chi(
            field,
            &ChartPotential::new(shift(self.corners[i])),
            &ChartPotential::new(shift(self.corners[j])),
            shift(p),
        )
    }

    fn cocycle_at(&self, field: f64, p: Point) -> f64 {
        self.edge_chi(field, 0, 1, p) + self.edge_chi(field, 1, 2, p) + self.edge_chi(field, 2, 0, p)
    }
}

/// `c_Delta = chi_ab + chi_bc + chi_ca`, checked to be the same at all three corners.
/// With the lift-consistent `chi` of [`LiftedTriangle::edge_chi`] only rounding can make them differ.
pub fn cocycle_constant(tri: &LiftedTriangle, field: f64, index: usize) -> Result<f64> {
    let values = tri.corners.map(|p| tri.cocycle_at(field, p));
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = max - min;
    let scale = 1.0 + values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if spread > COCYCLE_CONSTANCY_TOL * scale {
        return Err(Error::NotConstant { triangle: index, spread });
    }
    Ok((values[0] + values[1] + values[2]) / 3.0)
}

/// Both sides of `int_Delta B = 1/3 oint (A_a + A_b + A_c)` with the right side
/// split into its cocycle, vertex and edge parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleIdentity {
    pub lhs: f64,
    pub rhs: f64,
    /// `1/3 sum_k c(corner k)`.
    pub cocycle: f64,
    /// `-1/2 sum_edges (chi_ij(i) + chi_ij(j))`.
    pub vertex_terms: f64,
    /// `1/2 sum_edges int_ij (A_i + A_j)`.
    pub edge_terms: f64,
}

impl TriangleIdentity {
    pub fn defect(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }

    pub fn holds(&self) -> bool {
        self.defect() <= IDENTITY_REL_TOL * self.lhs.abs() + IDENTITY_ABS_TOL
    }

    /// The terms that cancel between neighbouring triangles.
    pub fn boundary_terms(&self) -> f64 {
        self.vertex_terms + self.edge_terms
    }
}

pub fn triangle_identity(tri: &LiftedTriangle, field: f64) -> TriangleIdentity {
    let p = tri.corners;
    let cocycle = (tri.cocycle_at(field, p[0]) + tri.cocycle_at(field, p[1]) + tri.cocycle_at(field, p[2])) / 3.0;
    let mut vertex_terms = 0.0;
    let mut edge_terms = 0.0;
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        vertex_terms -= 0.5 * (tri.edge_chi(field, i, j, p[i]) + tri.edge_chi(field, i, j, p[j]));
        edge_terms += 0.5
            * (tri.chart(i).line_integral(field, p[i], p[j]) + tri.chart(j).line_integral(field, p[i], p[j]));
    }
    TriangleIdentity {
        lhs: field * tri.signed_area(),
        rhs: cocycle + vertex_terms + edge_terms,
        cocycle,
        vertex_terms,
        edge_terms,
    }
}

/// Triangulated torus `[0, L1) x [0, L2)` carrying a uniform field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triangulation {
    pub l1: f64,
    pub l2: f64,
    pub field: f64,
    pub vertices: Vec<Point>,
    pub triangles: Vec<MeshTriangle>,
}

impl Triangulation {
    /// Right-triangle subdivision of an `n x n` grid, `2 n^2` triangles.
    pub fn uniform(l1: f64, l2: f64, field: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidMesh(format!("grid size {n} < 3 leaves stars that are not disks")));
        }
        let (hx, hy) = (l1 / n as f64, l2 / n as f64);
        let vertices = (0..n)
            .flat_map(|j| (0..n).map(move |i| [i as f64 * hx, j as f64 * hy]))
            .collect();
        let id = |i: usize, j: usize| (j % n) * n + (i % n);
        let off = |i: usize, j: usize| [(i / n) as i32, (j / n) as i32];
        let make = |c: [(usize, usize); 3]| {
            let o = c.map(|(i, j)| off(i, j));
            MeshTriangle {
                vertices: c.map(|(i, j)| id(i, j)),
                wraps: [
                    [o[1][0] - o[0][0], o[1][1] - o[0][1]],
                    [o[2][0] - o[1][0], o[2][1] - o[1][1]],
                    [o[0][0] - o[2][0], o[0][1] - o[2][1]],
                ],
            }
        };
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                triangles.push(make([(i, j), (i + 1, j), (i + 1, j + 1)]));
                triangles.push(make([(i, j), (i + 1, j + 1), (i, j + 1)]));
            }
        }
        let mesh = Self {
            l1,
            l2,
            field,
            vertices,
            triangles,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Uniform mesh with `B` chosen so that `B L1 L2 = flux`.
    pub fn with_flux(l1: f64, l2: f64, flux: f64, n: usize) -> Result<Self> {
        Self::uniform(l1, l2, flux / (l1 * l2), n)
    }

    /// Uniform mesh over a quantized torus in natural units, where `B = 2`.
    pub fn for_geometry(geometry: &TorusGeometry, n: usize) -> Result<Self> {
        Self::uniform(geometry.l1(), geometry.l2(), 2.0, n)
    }

    /// Moves vertices that are not on the `x = 0` or `y = 0` grid lines by up to
    /// `amplitude` times the local spacing in each direction. Requires a mesh
    /// from [`Triangulation::uniform`] with `amplitude < 1/2`.
    pub fn jittered<R: Rng>(&self, amplitude: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..0.5).contains(&amplitude) {
            return Err(Error::InvalidParameter(format!("jitter amplitude {amplitude} outside [0, 1/2)")));
        }
        let n = (self.vertices.len() as f64).sqrt().round() as usize;
        if n * n != self.vertices.len() {
            return Err(Error::InvalidMesh("jitter needs a uniform square mesh".into()));
        }
        let (hx, hy) = (self.l1 / n as f64, self.l2 / n as f64);
        let mut mesh = self.clone();
        for v in &mut mesh.vertices {
            if v[0] > 0.0 && v[1] > 0.0 {
                v[0] += rng.gen_range(-amplitude..=amplitude) * hx;
                v[1] += rng.gen_range(-amplitude..=amplitude) * hy;
            }
        }
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn area(&self) -> f64 {
        self.l1 * self.l2
    }

    pub fn flux(&self) -> f64 {
        self.field * self.area()
    }

    pub fn lifted(&self, index: usize) -> LiftedTriangle {
        let t = &self.triangles[index];
        let offsets = t.corner_offsets();
        let anchors = t.vertices.map(|v| self.vertices[v]);
        let mut corners = anchors;
        for k in 0..3 {
            corners[k][0] += offsets[k][0] as f64 * self.l1;
            corners[k][1] += offsets[k][1] as f64 * self.l2;
        }
        LiftedTriangle {
            vertices: t.vertices,
            corners,
            anchors,
        }
    }

    /// Structural checks: indices, canonical positions, closed wraps, positive
    /// orientation, exact covering, coherent edge wraps and disk-shaped stars.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidMesh(m));
        if !(self.l1 > 0.0 && self.l2 > 0.0 && self.l1.is_finite() && self.l2.is_finite()) {
            return bad(format!("side lengths {} x {}", self.l1, self.l2));
        }
        if !self.field.is_finite() {
            return bad("field is not finite".into());
        }
        for (k, v) in self.vertices.iter().enumerate() {
            if !(0.0..self.l1).contains(&v[0]) || !(0.0..self.l2).contains(&v[1]) {
                return bad(format!("vertex {k} at ({}, {}) outside the fundamental domain", v[0], v[1]));
            }
        }
        let mut edges: HashMap<(usize, usize), [i32; 2]> = HashMap::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.vertices.iter().any(|&v| v >= self.vertices.len()) {
                return bad(format!("triangle {t} references a missing vertex"));
            }
            let w = tri.wraps;
            if w[0][0] + w[1][0] + w[2][0] != 0 || w[0][1] + w[1][1] + w[2][1] != 0 {
                return bad(format!("wraps of triangle {t} do not close"));
            }
            if self.lifted(t).signed_area() <= 0.0 {
                return bad(format!("triangle {t} is not positively oriented"));
            }
            for (k, wk) in w.iter().enumerate() {
                let (a, b) = (tri.vertices[k], tri.vertices[(k + 1) % 3]);
                if a == b {
                    return bad(format!("triangle {t} has a loop edge at vertex {a}"));
                }
                let (key, wrap) = if a < b {
                    ((a, b), *wk)
                } else {
                    ((b, a), [-wk[0], -wk[1]])
                };
                if *edges.entry(key).or_insert(wrap) != wrap {
                    return bad(format!("edge {}-{} appears with two different wraps", key.0, key.1));
                }
            }
        }
        let total = pairwise_sum_real(
            &(0..self.triangles.len()).map(|t| self.lifted(t).signed_area()).collect::<Vec<_>>(),
        );
        if (total - self.area()).abs() > AREA_REL_TOL * self.area() {
            return bad(format!("triangles cover area {total}, expected {}", self.area()));
        }
        self.check_stars()
    }

    /// The link of each vertex must be one closed cycle.
    fn check_stars(&self) -> Result<()> {
        type Node = (usize, [i32; 2]);
        let mut links: Vec<HashMap<Node, Node>> = vec![HashMap::new(); self.vertices.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            let o = tri.corner_offsets();
            for k in 0..3 {
                let (a, b) = ((k + 1) % 3, (k + 2) % 3);
                let rel = |c: usize| (tri.vertices[c], [o[c][0] - o[k][0], o[c][1] - o[k][1]]);
                if links[tri.vertices[k]].insert(rel(a), rel(b)).is_some() {
                    return Err(Error::InvalidMesh(format!(
                        "star of vertex {} is not a disk (triangle {t})",
                        tri.vertices[k]
                    )));
                }
            }
        }
        for (v, link) in links.iter().enumerate() {
            let Some(&start) = link.keys().next() else {
                return Err(Error::InvalidMesh(format!("vertex {v} belongs to no triangle")));
            };
            let mut node = start;
            let mut steps = 0;
            loop {
                node = match link.get(&node) {
                    Some(&next) => next,
                    None => return Err(Error::InvalidMesh(format!("star of vertex {v} is not closed"))),
                };
                steps += 1;
                if node == start || steps > link.len() {
                    break;
                }
            }
            if node != start || steps != link.len() {
                return Err(Error::InvalidMesh(format!("star of vertex {v} is not a single disk")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let mesh: Self = serde_json::from_str(text)?;
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Per-triangle row of a flux report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriangleRecord {
    pub index: usize,
    pub cocycle: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub defect: f64,
    pub identity_holds: bool,
}

/// `sum_c` against `B L1 L2` and the integrality verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluxReport {
    pub sum_c: f64,
    pub flux: f64,
    pub flux_over_two_pi: f64,
    pub theorem_holds: bool,
    pub weil_integral: bool,
    /// Sum of the vertex and edge terms over the whole mesh.
    pub boundary_terms_sum: f64,
    pub max_identity_defect: f64,
    pub identity_holds_everywhere: bool,
    pub triangles: Vec<TriangleRecord>,
}

/// `(sum_Delta c_Delta, B L1 L2)` with the per-triangle identity on every triangle.
pub fn total_flux(mesh: &Triangulation) -> Result<FluxReport> {
    let records: Vec<TriangleRecord> = (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| {
            let tri = mesh.lifted(t);
            let cocycle = cocycle_constant(&tri, mesh.field, t)?;
            let id = triangle_identity(&tri, mesh.field);
            Ok(TriangleRecord {
                index: t,
                cocycle,
                lhs: id.lhs,
                rhs: id.rhs,
                defect: id.defect(),
                identity_holds: id.holds(),
            })
        })
        .collect::<Result<_>>()?;
    let sum_c = pairwise_sum_real(&records.iter().map(|r| r.cocycle).collect::<Vec<_>>());
    let boundary_terms_sum = pairwise_sum_real(&records.iter().map(|r| r.rhs - r.cocycle).collect::<Vec<_>>());
    let flux = mesh.flux();
    let ratio = flux / (2.0 * std::f64::consts::PI);
    Ok(FluxReport {
        sum_c,
        flux,
        flux_over_two_pi: ratio,
        theorem_holds: (sum_c - flux).abs() <= THEOREM_REL_TOL * flux.abs(),
        weil_integral: (ratio - ratio.round()).abs() <= WEIL_TOL,
        boundary_terms_sum,
        max_identity_defect: records.iter().map(|r| r.defect).fold(0.0, f64::max),
        identity_holds_everywhere: records.iter().all(|r| r.identity_holds),
        triangles: records,
    })
}

/// `true` when all three lifts of the triangle are canonical positions.
pub fn is_unwrapped(mesh: &Triangulation, index: usize) -> bool {
    mesh.lifted(index).is_unwrapped()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn chi_is_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let mut p = || [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let (a, b, x) = (ChartPotential::new(p()), ChartPotential::new(p()), p());
            assert_eq!(chi(1.7, &a, &a, x), 0.0);
            assert!((chi(1.7, &a, &b, x) + chi(1.7, &b, &a, x)).abs() < 1e-15);
        }
    }

    #[test]
    fn chi_gradient_matches_potential_difference() {
        let field = 2.3;
        let a = ChartPotential::new([0.2, -0.4]);
        let b = ChartPotential::new([1.1, 0.7]);
        let p = [0.35, 0.9];
        let h = 1e-5;
        let grad = |k: usize| {
            let (mut lo, mut hi) = (p, p);
            lo[k] -= h;
            hi[k] += h;
            (chi(field, &a, &b, hi) - chi(field, &a, &b, lo)) / (2.0 * h)
        };
        let (aa, ab) = (a.one_form(field, p), b.one_form(field, p));
        assert!((grad(0) - (aa[0] - ab[0])).abs() < 1e-10);
        assert!((grad(1) - (aa[1] - ab[1])).abs() < 1e-10);
    }

    #[test]
    fn unwrapped_triangles_have_zero_cocycle() {
        let mesh = Triangulation::with_flux(3.0, 2.0, 2.0 * PI, 5).unwrap();
        let mut count = 0;
        for t in 0..mesh.triangles.len() {
            if is_unwrapped(&mesh, t) {
                count += 1;
                assert!(cocycle_constant(&mesh.lifted(t), mesh.field, t).unwrap().abs() < 1e-14);
            }
        }
        assert_eq!(count, 2 * 4 * 4);
    }

    #[test]
    fn seam_triangle_cocycle_closed_form() {
        let (l1, l2, n) = (2.5, 1.6, 4);
        let mesh = Triangulation::with_flux(l1, l2, 6.0 * PI, n).unwrap();
        // lower-right triangle of the last column in row 1
        let t = 2 * (n + n - 1);
        assert_eq!(mesh.triangles[t].wraps[0], [1, 0]);
        let c = cocycle_constant(&mesh.lifted(t), mesh.field, t).unwrap();
        let expected = 0.5 * mesh.field * l1 * (l2 / n as f64);
        assert!((c - expected).abs() < 1e-13, "{c} vs {expected}");
    }

    #[test]
    fn identity_on_every_triangle() {
        for n in [4, 8, 16] {
            let mesh = Triangulation::with_flux(2.0, 3.5, 6.0 * PI, n).unwrap();
            let report = total_flux(&mesh).unwrap();
            assert!(report.identity_holds_everywhere, "n {n}: {}", report.max_identity_defect);
        }
    }

    #[test]
    fn sum_of_cocycles_is_the_flux() {
        let mesh = Triangulation::with_flux(1.0, 1.0, 6.0 * PI, 8).unwrap();
        let r = total_flux(&mesh).unwrap();
        assert!((r.sum_c - 6.0 * PI).abs() <= 1e-9 * 6.0 * PI);
        assert!(r.theorem_holds && r.weil_integral);
        assert!(r.boundary_terms_sum.abs() < 1e-10);
    }

    #[test]
    fn mesh_independence() {
        let sums: Vec<f64> = [4, 8, 16]
            .iter()
            .map(|&n| total_flux(&Triangulation::with_flux(1.3, 2.9, 2.0 * PI, n).unwrap()).unwrap().sum_c)
            .collect();
        for s in &sums {
            assert!((s - sums[0]).abs() <= 1e-9 * sums[0].abs());
        }
    }

    #[test]
    fn weil_verdicts() {
        for (flux, integral) in [(2.0 * PI, true), (6.0 * PI, true), (3.0 * PI, false)] {
            let r = total_flux(&Triangulation::with_flux(1.0, 2.0, flux, 8).unwrap()).unwrap();
            assert!(r.theorem_holds);
            assert_eq!(r.weil_integral, integral, "flux {flux}");
        }
    }

    #[test]
    fn zero_field() {
        let r = total_flux(&Triangulation::uniform(1.0, 1.0, 0.0, 4).unwrap()).unwrap();
        assert_eq!((r.sum_c, r.flux), (0.0, 0.0));
        assert!(r.theorem_holds && r.weil_integral);
        assert!(r.triangles.iter().all(|t| t.lhs == 0.0 && t.rhs == 0.0));
    }

    #[test]
    fn degenerate_triangle() {
        let tri = LiftedTriangle::unwrapped([0, 1, 2], [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]);
        let id = triangle_identity(&tri, 3.0);
        assert_eq!(id.lhs, 0.0);
        assert!(id.rhs.abs() < 1e-14 && id.holds());
    }

    #[test]
    fn natural_units_flux_is_two_pi_n() {
        let g = TorusGeometry::with_aspect(3, 1.7).unwrap();
        let r = total_flux(&Triangulation::for_geometry(&g, 6).unwrap()).unwrap();
        assert!((r.flux_over_two_pi - 3.0).abs() < 1e-12);
        assert!(r.theorem_holds && r.weil_integral);
    }

    #[test]
    fn jittered_mesh_keeps_the_theorem() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mesh = Triangulation::with_flux(2.0, 1.0, 4.0 * PI, 6).unwrap().jittered(0.3, &mut rng).unwrap();
        let r = total_flux(&mesh).unwrap();
        assert!(r.identity_holds_everywhere && r.theorem_holds);
    }

    #[test]
    fn json_round_trip() {
        let mesh = Triangulation::with_flux(1.0, 1.0, 2.0 * PI, 3).unwrap();
        let back = Triangulation::from_json(&mesh.to_json().unwrap()).unwrap();
        assert_eq!(mesh, back);
    }

    #[test]
    fn rejects_bad_meshes() {
        assert!(matches!(Triangulation::uniform(1.0, 1.0, 1.0, 2), Err(Error::InvalidMesh(_))));
        let mut mesh = Triangulation::uniform(1.0, 1.0, 1.0, 3).unwrap();
        mesh.triangles.pop();
        assert!(matches!(mesh.validate(), Err(Error::InvalidMesh(_))));
        let mut mesh = Triangulation::uniform(1.0, 1.0, 1.0, 3).unwrap();
        mesh.triangles[0].vertices.swap(1, 2);
        assert!(matches!(mesh.validate(), Err(Error::InvalidMesh(_))));
    }

    #[test]
    fn cocycle_is_constant_on_seam_triangles_at_large_field() {
        let mesh = Triangulation::with_flux(7.0, 9.0, 2.0 * PI * 400.0, 5).unwrap();
        for t in 0..mesh.triangles.len() {
            let tri = mesh.lifted(t);
            let values = tri.corners.map(|p| tri.cocycle_at(mesh.field, p));
            assert!((values[0] - values[1]).abs() < 1e-10 * (1.0 + values[0].abs()));
            assert!(cocycle_constant(&tri, mesh.field, t).is_ok());
        }
    }
}

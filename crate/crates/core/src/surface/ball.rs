//! Metric balls on a triangulated surface.

use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::TriSurface;
use crate::scalar::{rational_to_f64, serialize_exact};
use crate::Rational;

/// Faces of the graph-metric ball `B(x, R)`, optionally filled to `B⁺`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallSubcomplex {
    pub center: usize,
    #[serde(serialize_with = "serialize_exact")]
    pub radius: Rational,
    /// Vertices at distance at most `R`.
    pub vertices: Vec<usize>,
    pub faces: Vec<usize>,
    /// Edges bordering exactly one included face.
    pub boundary_edges: Vec<usize>,
    pub boundary_components: usize,
    /// Every boundary vertex meets exactly two boundary edges.
    pub boundary_simple: bool,
    pub filled: bool,
}

impl BallSubcomplex {
    pub fn new(s: &TriSurface, center: usize, radius: &Rational) -> Self {
        let limit = s.ticks_floor(radius);
        let (dist, _) = s.shortest_path_tree_within(center, limit);
        let inside: Vec<bool> = dist.iter().map(|&d| d <= limit).collect();
        let vertices = (0..s.vertex_count()).filter(|&v| inside[v]).collect();
        let faces: Vec<usize> = (0..s.face_count()).filter(|&f| s.faces()[f].iter().all(|&v| inside[v])).collect();
        Self::from_faces(s, center, radius.clone(), vertices, faces, false)
    }

    fn from_faces(
        s: &TriSurface,
        center: usize,
        radius: Rational,
        vertices: Vec<usize>,
        faces: Vec<usize>,
        filled: bool,
    ) -> Self {
        let mut member = vec![false; s.face_count()];
        for &f in &faces {
            member[f] = true;
        }
        let boundary_edges: Vec<usize> = (0..s.edge_count())
            .filter(|&e| {
                let [p, q] = s.edge_faces(e);
                member[p] != member[q]
            })
            .collect();
        let mut degree = vec![0usize; s.vertex_count()];
        for &e in &boundary_edges {
            for v in s.edges()[e] {
                degree[v] += 1;
            }
        }
        let boundary_simple = degree.iter().all(|&d| d == 0 || d == 2);
        let boundary_components = s.subgraph(&boundary_edges).component_count();
        Self { center, radius, vertices, faces, boundary_edges, boundary_components, boundary_simple, filled }
    }

    /// Sum of the areas of the included faces.
    pub fn area(&self, s: &TriSurface) -> f64 {
        // fold from +0 so an empty ball reports 0 rather than -0
        self.faces.iter().map(|&f| s.area(f)).fold(0.0, |a, b| a + b)
    }

    pub fn boundary_length(&self, s: &TriSurface) -> Rational {
        s.edges_length(&self.boundary_edges)
    }

    /// `B⁺`: every complementary component that is an open disk is added.
    pub fn fill_to_bplus(&self, s: &TriSurface) -> Self {
        let mut member = vec![false; s.face_count()];
        for &f in &self.faces {
            member[f] = true;
        }
        let mut seen = member.clone();
        let mut faces = self.faces.clone();
        for start in 0..s.face_count() {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut component = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(f) = queue.pop_front() {
                for e in s.face_edges(f) {
                    let [p, q] = s.edge_faces(e);
                    let g = if p == f { q } else { p };
                    if !seen[g] {
                        seen[g] = true;
                        component.push(g);
                        queue.push_back(g);
                    }
                }
            }
            if open_euler_characteristic(s, &component) == 1 {
                faces.extend(component);
            }
        }
        faces.sort_unstable();
        let mut vertices: BTreeSet<usize> = self.vertices.iter().copied().collect();
        vertices.extend(faces.iter().flat_map(|&f| s.faces()[f]));
        Self::from_faces(s, self.center, self.radius.clone(), vertices.into_iter().collect(), faces, true)
    }
}

/// Euler characteristic of the interior of a union of faces: its faces, the
/// edges with both sides inside and the vertices with every face inside.
pub(crate) fn open_euler_characteristic(s: &TriSurface, faces: &[usize]) -> i64 {
    let member: BTreeSet<usize> = faces.iter().copied().collect();
    let edges: BTreeSet<usize> = faces
        .iter()
        .flat_map(|&f| s.face_edges(f))
        .filter(|&e| s.edge_faces(e).iter().all(|g| member.contains(g)))
        .collect();
    let vertices: BTreeSet<usize> = faces
        .iter()
        .flat_map(|&f| s.faces()[f])
        .filter(|&v| s.vertex_faces(v).iter().all(|g| member.contains(g)))
        .collect();
    faces.len() as i64 - edges.len() as i64 + vertices.len() as i64
}

/// Area of the part of a triangle within distance `rho` of its vertex `A`,
/// where `b = |AC|`, `c = |AB|` and `a = |BC|`.
pub fn sector_in_triangle(a: f64, b: f64, c: f64, rho: f64) -> f64 {
    if rho <= 0.0 {
        return 0.0;
    }
    let area = super::heron(a, b, c);
    if rho >= b.max(c) {
        return area;
    }
    let theta = ((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0).acos();
    let h = 2.0 * area / a;
    if rho <= h {
        return 0.5 * theta * rho * rho;
    }
    // angle from AB to the foot of the altitude: a right angle minus the angle at B
    let beta = ((a * a + c * c - b * b) / (2.0 * a * c)).clamp(-1.0, 1.0).acos();
    let phi0 = FRAC_PI_2 - beta;
    let alpha = (h / rho).clamp(-1.0, 1.0).acos();
    let lo = (phi0 - alpha).max(0.0);
    let hi = (phi0 + alpha).min(theta);
    if hi <= lo {
        return 0.5 * theta * rho * rho;
    }
    let chord = 0.5 * h * h * ((hi - phi0).tan() - (lo - phi0).tan());
    (0.5 * rho * rho * (theta - (hi - lo)) + chord).min(area)
}

/// Certified inner estimate of the area of the ball of radius `radius` in the
/// flat metric of the triangles: each face contributes its largest sector
/// around a vertex `v`, of radius `radius - d(x, v)` with `d` the skeleton
/// distance (an upper bound for the flat distance).
pub fn polyhedral_ball_area(s: &TriSurface, center: usize, radius: f64) -> f64 {
    let dist: Vec<f64> = s.distances(center).iter().map(rational_to_f64).collect();
    (0..s.face_count())
        .map(|f| {
            let verts = s.faces()[f];
            let sides = s.face_edges(f).map(|e| rational_to_f64(s.length(e)));
            // sides: (v0 v1), (v1 v2), (v2 v0)
            (0..3)
                .filter(|&k| dist[verts[k]] < radius)
                .map(|k| {
                    let opposite = sides[(k + 1) % 3];
                    let next = sides[k];
                    let prev = sides[(k + 2) % 3];
                    sector_in_triangle(opposite, prev, next, radius - dist[verts[k]])
                })
                .fold(0.0, f64::max)
        })
        .fold(0.0, |a, b| a + b)
}

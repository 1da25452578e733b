//! Triangulated closed orientable surfaces with edge-length metrics.
//!
//! Distances are shortest paths in the 1-skeleton. All lengths share a
//! lattice unit (the reciprocal of the lcm of their denominators), so path
//! lengths are computed as integers and converted back to exact rationals.

mod ball;
mod capture;
mod fixtures;
mod homology;
mod io;
mod nerve;
mod pipeline;
mod systole;

use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::{EdgeId, MetricGraph, MinItem, VertexId};
use crate::scalar::{format_rational, rational_to_f64};
use crate::Rational;

pub use ball::{polyhedral_ball_area, sector_in_triangle, BallSubcomplex};
pub use capture::{
    capture_length, greedy_capture, height, prop65_check, CaptureMode, CaptureResult, HeightReport,
    Prop65Point, Prop65Status, EXACT_VERTEX_LIMIT,
};
pub use fixtures::{connected_sum, fine_genus2, fine_torus, genus2, octahedron, refine, subdivide, tetrahedron, torus7};
pub use homology::{capturing_test, prune_to_iso, sparse_rank, CaptureTest, Homology, SparseColumn};
pub use io::{emit_surface, parse_surface};
pub use nerve::{nerve_graph, NerveEdge, NerveReport, DEFAULT_EPS, DEFAULT_R0};
pub use pipeline::{
    coarea_identity, lemma91_grid_check, lemma91_shrink, theorem1_lambda_search, theorem9_pipeline,
    LambdaResult, LambdaSearch, PipelineOptions, PipelineReport, RadiusCheck,
};
pub use systole::{bounds_disk, systole_at, systole_simple, Systole};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("non-manifold: {0}")]
    NonManifold(String),
    #[error("non-orientable: {0}")]
    NonOrientable(String),
    #[error("faces are not consistently oriented: {0}")]
    InconsistentOrientation(String),
    #[error("disconnected: {0} face components")]
    Disconnected(usize),
    #[error("triangle inequality fails on face {face} ({a}, {b}, {c})")]
    TriangleInequality { face: usize, a: String, b: String, c: String },
    #[error("edge ({0}, {1}) has nonpositive length")]
    NonPositiveLength(usize, usize),
    #[error("length given for ({0}, {1}), which is not an edge")]
    UnknownEdge(usize, usize),
    #[error("edge lengths need a lattice finer than 64-bit integers support")]
    LatticeOverflow,
    #[error("no non-contractible cycle on a sphere")]
    Sphere,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

/// Validated triangulated surface.
#[derive(Clone, Debug)]
pub struct TriSurface {
    vertex_count: usize,
    faces: Vec<[usize; 3]>,
    /// Endpoints with `u < w`; index is the edge id.
    edges: Vec<[usize; 2]>,
    edge_lookup: HashMap<(usize, usize), usize>,
    lengths: Vec<Rational>,
    /// Edge ids of the sides `(a, b)`, `(b, c)`, `(c, a)` of each face.
    face_edges: Vec<[usize; 3]>,
    /// Face traversing the edge from its smaller to its larger endpoint, then the other one.
    edge_faces: Vec<[usize; 2]>,
    adjacency: Vec<Vec<(usize, usize)>>,
    vertex_faces: Vec<Vec<usize>>,
    unit: Rational,
    ticks: Vec<u64>,
    areas: Vec<f64>,
    homology: OnceLock<Homology>,
}

fn key(u: usize, w: usize) -> (usize, usize) {
    if u < w {
        (u, w)
    } else {
        (w, u)
    }
}

/// Triangle area from side lengths, stable for needle triangles.
pub fn heron(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.partial_cmp(x).expect("finite lengths"));
    let [a, b, c] = s;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * p.max(0.0).sqrt()
}

impl TriSurface {
    /// Builds and validates a surface. Missing lengths default to 1.
    pub fn new(
        vertex_count: usize,
        faces: Vec<[usize; 3]>,
        lengths: &BTreeMap<(usize, usize), Rational>,
    ) -> Result<Self, SurfaceError> {
        let mut edge_lookup = HashMap::new();
        let mut edges = Vec::new();
        let mut face_edges = Vec::with_capacity(faces.len());
        let mut incidence: Vec<Vec<usize>> = Vec::new();
        let mut vertex_faces = vec![Vec::new(); vertex_count];
        for (fi, f) in faces.iter().enumerate() {
            let [a, b, c] = *f;
            if a == b || b == c || a == c {
                return Err(SurfaceError::NonManifold(format!("face {fi} repeats a vertex")));
            }
            if f.iter().any(|&v| v >= vertex_count) {
                return Err(SurfaceError::NonManifold(format!("face {fi} uses an undeclared vertex")));
            }
            let mut ids = [0; 3];
            for (k, (u, w)) in [(a, b), (b, c), (c, a)].into_iter().enumerate() {
                let id = *edge_lookup.entry(key(u, w)).or_insert_with(|| {
                    edges.push([u.min(w), u.max(w)]);
                    incidence.push(Vec::new());
                    edges.len() - 1
                });
                incidence[id].push(fi);
                ids[k] = id;
                vertex_faces[u].push(fi);
            }
            face_edges.push(ids);
        }
        if let Some(v) = vertex_faces.iter().position(|f| f.is_empty()) {
            return Err(SurfaceError::NonManifold(format!("vertex {v} lies on no face")));
        }
        for (id, inc) in incidence.iter().enumerate() {
            if inc.len() != 2 {
                let [u, w] = edges[id];
                return Err(SurfaceError::NonManifold(format!(
                    "edge ({u}, {w}) borders {} faces",
                    inc.len()
                )));
            }
        }
        // vertex links must be single cycles
        for v in 0..vertex_count {
            let mut link: HashMap<usize, Vec<usize>> = HashMap::new();
            for &fi in &vertex_faces[v] {
                let others: Vec<usize> = faces[fi].iter().copied().filter(|&x| x != v).collect();
                link.entry(others[0]).or_default().push(others[1]);
                link.entry(others[1]).or_default().push(others[0]);
            }
            let start = *link.keys().min().expect("nonempty link");
            let mut seen = 1;
            let (mut prev, mut cur) = (start, link[&start][0]);
            while cur != start {
                let nb = &link[&cur];
                let next = if nb[0] == prev { nb[1] } else { nb[0] };
                prev = cur;
                cur = next;
                seen += 1;
                if seen > link.len() {
                    break;
                }
            }
            if seen != link.len() {
                return Err(SurfaceError::NonManifold(format!("link of vertex {v} is not a single cycle")));
            }
        }
        // connectivity and orientation by a walk over face adjacency
        let mut flip: Vec<Option<bool>> = vec![None; faces.len()];
        let mut components = 0;
        let mut inconsistent = false;
        for start in 0..faces.len() {
            if flip[start].is_some() {
                continue;
            }
            components += 1;
            flip[start] = Some(false);
            let mut stack = vec![start];
            while let Some(fi) = stack.pop() {
                let fl = flip[fi].expect("visited");
                for &e in &face_edges[fi] {
                    let other = incidence[e].iter().copied().find(|&g| g != fi).expect("two faces");
                    let same = side_direction(&faces[fi], edges[e]) == side_direction(&faces[other], edges[e]);
                    // neighbours must traverse a shared edge in opposite directions
                    let want = fl ^ same;
                    if same {
                        inconsistent = true;
                    }
                    match flip[other] {
                        None => {
                            flip[other] = Some(want);
                            stack.push(other);
                        }
                        Some(x) if x != want => {
                            return Err(SurfaceError::NonOrientable(format!(
                                "no consistent orientation around face {other}"
                            )));
                        }
                        _ => {}
                    }
                }
            }
        }
        if components > 1 {
            return Err(SurfaceError::Disconnected(components));
        }
        if inconsistent {
            let bad = flip.iter().position(|f| *f == Some(true)).unwrap_or(0);
            return Err(SurfaceError::InconsistentOrientation(format!("face {bad} must be reversed")));
        }
        for &(u, w) in lengths.keys() {
            if !edge_lookup.contains_key(&key(u, w)) {
                return Err(SurfaceError::UnknownEdge(u, w));
            }
        }
        let edge_lengths: Vec<Rational> = edges
            .iter()
            .map(|&[u, w]| {
                lengths.get(&(u, w)).or_else(|| lengths.get(&(w, u))).cloned().unwrap_or_else(Rational::one)
            })
            .collect();
        for (id, l) in edge_lengths.iter().enumerate() {
            if !l.is_positive() {
                return Err(SurfaceError::NonPositiveLength(edges[id][0], edges[id][1]));
            }
        }
        for (fi, ids) in face_edges.iter().enumerate() {
            let [a, b, c] = ids.map(|e| &edge_lengths[e]);
            if a + b <= *c || b + c <= *a || a + c <= *b {
                return Err(SurfaceError::TriangleInequality {
                    face: fi,
                    a: format_rational(a),
                    b: format_rational(b),
                    c: format_rational(c),
                });
            }
        }
        let edge_faces: Vec<[usize; 2]> = incidence
            .iter()
            .enumerate()
            .map(|(e, inc)| {
                if side_direction(&faces[inc[0]], edges[e]) {
                    [inc[0], inc[1]]
                } else {
                    [inc[1], inc[0]]
                }
            })
            .collect();
        let mut adjacency = vec![Vec::new(); vertex_count];
        for (id, &[u, w]) in edges.iter().enumerate() {
            adjacency[u].push((w, id));
            adjacency[w].push((u, id));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let (unit, ticks) = lattice(&edge_lengths)?;
        let approx: Vec<f64> = edge_lengths.iter().map(rational_to_f64).collect();
        let areas = face_edges.iter().map(|ids| heron(approx[ids[0]], approx[ids[1]], approx[ids[2]])).collect();
        for list in &mut vertex_faces {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            vertex_count,
            faces,
            edges,
            edge_lookup,
            lengths: edge_lengths,
            face_edges,
            edge_faces,
            adjacency,
            vertex_faces,
            unit,
            ticks,
            areas,
            homology: OnceLock::new(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn genus(&self) -> usize {
        ((2 - self.euler_characteristic()) / 2) as usize
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_id(&self, u: usize, w: usize) -> Option<usize> {
        self.edge_lookup.get(&key(u, w)).copied()
    }

    pub fn length(&self, e: usize) -> &Rational {
        &self.lengths[e]
    }

    pub fn lengths(&self) -> &[Rational] {
        &self.lengths
    }

    pub fn face_edges(&self, f: usize) -> [usize; 3] {
        self.face_edges[f]
    }

    /// `[positive, negative]` faces of an edge: the first traverses it from its smaller endpoint.
    pub fn edge_faces(&self, e: usize) -> [usize; 2] {
        self.edge_faces[e]
    }

    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    /// Neighbours of `v` with the connecting edge id, sorted by neighbour.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn area(&self, f: usize) -> f64 {
        self.areas[f]
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn total_length(&self) -> Rational {
        self.lengths.iter().fold(Rational::zero(), |a, b| a + b)
    }

    /// Lattice unit `s`: every edge length is an integer multiple of it.
    pub fn unit(&self) -> &Rational {
        &self.unit
    }

    /// Edge length in lattice units.
    pub fn ticks(&self, e: usize) -> u64 {
        self.ticks[e]
    }

    pub fn to_rational(&self, ticks: u64) -> Rational {
        &self.unit * Rational::from_integer(ticks.into())
    }

    /// Smallest tick count `t` with `t * unit >= r`.
    pub fn ticks_ceil(&self, r: &Rational) -> u64 {
        (r / &self.unit).ceil().to_integer().to_u64().unwrap_or(u64::MAX)
    }

    /// Largest tick count `t` with `t * unit <= r`.
    pub fn ticks_floor(&self, r: &Rational) -> u64 {
        if r.is_negative() {
            return 0;
        }
        (r / &self.unit).floor().to_integer().to_u64().unwrap_or(u64::MAX)
    }

    pub fn homology(&self) -> &Homology {
        self.homology.get_or_init(|| Homology::compute(self))
    }

    /// Shortest-path tree from `source`: distances in ticks and parent `(vertex, edge)`.
    ///
    /// Ties are broken towards smaller vertex ids, so the tree is deterministic.
    pub fn shortest_path_tree(&self, source: usize) -> (Vec<u64>, Vec<Option<(usize, usize)>>) {
        self.shortest_path_tree_within(source, u64::MAX)
    }

    /// Same as [`Self::shortest_path_tree`], leaving vertices beyond `limit` ticks unreached.
    pub fn shortest_path_tree_within(&self, source: usize, limit: u64) -> (Vec<u64>, Vec<Option<(usize, usize)>>) {
        let mut dist = vec![u64::MAX; self.vertex_count];
        let mut parent = vec![None; self.vertex_count];
        let mut heap = BinaryHeap::new();
        dist[source] = 0;
        heap.push(MinItem(0u64, source));
        while let Some(MinItem(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(w, e) in &self.adjacency[v] {
                let nd = d + self.ticks[e];
                if nd > limit {
                    continue;
                }
                let better = nd < dist[w] || (nd == dist[w] && parent[w].is_some_and(|(p, _)| v < p));
                if better {
                    if nd < dist[w] {
                        heap.push(MinItem(nd, w));
                    }
                    dist[w] = nd;
                    parent[w] = Some((v, e));
                }
            }
        }
        (dist, parent)
    }

    /// Exact shortest-path distances from `source`.
    pub fn distances(&self, source: usize) -> Vec<Rational> {
        self.shortest_path_tree(source).0.into_iter().map(|t| self.to_rational(t)).collect()
    }

    /// Distances in ticks from the nearest of several sources.
    pub fn multi_source_ticks(&self, sources: &[usize]) -> Vec<u64> {
        let mut dist = vec![u64::MAX; self.vertex_count];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0;
            heap.push(MinItem(0u64, s));
        }
        while let Some(MinItem(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(w, e) in &self.adjacency[v] {
                let nd = d + self.ticks[e];
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(MinItem(nd, w));
                }
            }
        }
        dist
    }

    /// Edge path from `source` to `target` along the shortest-path tree of `source`.
    pub fn shortest_path(&self, source: usize, target: usize) -> Vec<usize> {
        let (_, parent) = self.shortest_path_tree(source);
        let mut path = Vec::new();
        let mut v = target;
        while let Some((p, e)) = parent[v] {
            path.push(e);
            v = p;
        }
        path.reverse();
        path
    }

    /// Sum of edge lengths over a set of edge ids.
    pub fn edges_length<'a>(&self, edges: impl IntoIterator<Item = &'a usize>) -> Rational {
        edges.into_iter().fold(Rational::zero(), |acc, &e| acc + &self.lengths[e])
    }

    /// Subgraph of the 1-skeleton as a metric graph; vertex and edge ids are kept.
    pub fn subgraph(&self, edges: &[usize]) -> MetricGraph<Rational> {
        let mut verts: Vec<u32> = edges.iter().flat_map(|&e| self.edges[e].map(|v| v as u32)).collect();
        verts.sort_unstable();
        verts.dedup();
        MetricGraph::from_parts(
            verts,
            edges.iter().map(|&e| (e as u32, self.edges[e][0] as u32, self.edges[e][1] as u32, self.lengths[e].clone())),
        )
        .expect("skeleton edges are valid")
    }

    /// The whole 1-skeleton as a metric graph.
    pub fn skeleton(&self) -> MetricGraph<Rational> {
        let all: Vec<usize> = (0..self.edges.len()).collect();
        self.subgraph(&all)
    }

    /// Multiplies every length by `mu`.
    pub fn scaled(&self, mu: &Rational) -> Result<Self, SurfaceError> {
        if !mu.is_positive() {
            return Err(SurfaceError::Precondition("scale must be positive".into()));
        }
        let lengths = self.length_map().into_iter().map(|(k, l)| (k, l * mu)).collect();
        Self::new(self.vertex_count, self.faces.clone(), &lengths)
    }

    pub fn length_map(&self) -> BTreeMap<(usize, usize), Rational> {
        self.edges.iter().zip(&self.lengths).map(|(&[u, w], l)| ((u, w), l.clone())).collect()
    }
}

/// True when the face traverses `edge` from its smaller to its larger endpoint.
fn side_direction(face: &[usize; 3], edge: [usize; 2]) -> bool {
    let [a, b, c] = *face;
    [(a, b), (b, c), (c, a)].contains(&(edge[0], edge[1]))
}

fn lattice(lengths: &[Rational]) -> Result<(Rational, Vec<u64>), SurfaceError> {
    let denom = lengths.iter().fold(BigInt::one(), |acc, l| acc.lcm(l.denom()));
    let numer_gcd = lengths.iter().fold(BigInt::zero(), |acc, l| acc.gcd(&(l.numer() * (&denom / l.denom()))));
    let unit = Rational::new(numer_gcd.clone(), denom.clone());
    let ticks: Option<Vec<u64>> =
        lengths.iter().map(|l| (l.numer() * (&denom / l.denom()) / &numer_gcd).to_u64()).collect();
    let ticks = ticks.ok_or(SurfaceError::LatticeOverflow)?;
    // leave headroom for sums along long paths
    if ticks.iter().any(|&t| t > u64::MAX / (4 * lengths.len() as u64 + 4)) {
        return Err(SurfaceError::LatticeOverflow);
    }
    Ok((unit, ticks))
}

/// Vertex id of the surface as a graph vertex.
pub fn vid(v: usize) -> VertexId {
    VertexId(v as u32)
}

/// Edge id of the surface as a graph edge.
pub fn eid(e: usize) -> EdgeId {
    EdgeId(e as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn fixtures_have_expected_topology() {
        let t = tetrahedron();
        assert_eq!((t.vertex_count(), t.edge_count(), t.face_count()), (4, 6, 4));
        assert_eq!(t.genus(), 0);
        let k = torus7();
        assert_eq!((k.vertex_count(), k.edge_count(), k.face_count()), (7, 21, 14));
        assert_eq!(k.genus(), 1);
        let g2 = genus2();
        assert_eq!((g2.vertex_count(), g2.edge_count(), g2.face_count()), (11, 39, 26));
        assert_eq!(g2.genus(), 2);
    }

    #[test]
    fn validation_errors_are_distinct() {
        let none = BTreeMap::new();
        // a triangle glued to itself along two sides is not a surface
        let open = TriSurface::new(3, vec![[0, 1, 2]], &none).unwrap_err();
        assert!(matches!(open, SurfaceError::NonManifold(_)));
        let mut faces = tetrahedron().faces().to_vec();
        faces[0] = [faces[0][0], faces[0][2], faces[0][1]];
        assert!(matches!(TriSurface::new(4, faces, &none), Err(SurfaceError::InconsistentOrientation(_))));
        let mut two = tetrahedron().faces().to_vec();
        two.extend(tetrahedron().faces().iter().map(|f| f.map(|v| v + 4)));
        assert_eq!(TriSurface::new(8, two, &none).unwrap_err(), SurfaceError::Disconnected(2));
        let mut bad = BTreeMap::new();
        bad.insert((0, 1), int(3));
        assert!(matches!(TriSurface::new(4, tetrahedron().faces().to_vec(), &bad), Err(SurfaceError::TriangleInequality { .. })));
        let mut zero = BTreeMap::new();
        zero.insert((0, 1), int(0));
        assert!(matches!(TriSurface::new(4, tetrahedron().faces().to_vec(), &zero), Err(SurfaceError::NonPositiveLength(0, 1))));
    }

    #[test]
    fn projective_plane_is_non_orientable() {
        // six-vertex real projective plane
        let faces = vec![
            [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 1],
            [1, 2, 4], [2, 3, 5], [3, 4, 1], [4, 5, 2], [5, 1, 3],
        ];
        assert!(matches!(TriSurface::new(6, faces, &BTreeMap::new()), Err(SurfaceError::NonOrientable(_))));
    }

    #[test]
    fn lattice_distances() {
        let s = torus7().scaled(&ratio(1, 4)).unwrap();
        assert_eq!(s.unit(), &ratio(1, 4));
        let d = s.distances(0);
        assert!(d.iter().skip(1).all(|x| *x == ratio(1, 4)));
        assert!((s.total_area() - 14.0 * 3f64.sqrt() / 4.0 / 16.0).abs() < 1e-12);
    }
}

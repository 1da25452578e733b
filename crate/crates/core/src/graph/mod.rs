//! Metric graphs: data model, topological invariants, and the reductions the
//! witness search is built on.

mod darts;
mod generate;
mod io;
mod reduce;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub use darts::DartIndex;
pub use generate::{generate, random_connected, trivalent_reference, GraphKind};
pub use io::{emit_graph, parse_graph};
pub use reduce::{prune_leaves, reduce, smooth_degree2, ReductionTrace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge {edge}: nonpositive length")]
    NonPositiveLength { edge: EdgeId },
    #[error("edge {edge}: unknown endpoint {vertex}")]
    UnknownVertex { edge: EdgeId, vertex: VertexId },
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("unknown edge id {0}")]
    UnknownEdge(EdgeId),
    #[error("unknown vertex id {0}")]
    MissingVertex(VertexId),
    #[error("graph is not connected ({components} components)")]
    NotConnected { components: usize },
    #[error("scale factor must be positive")]
    NonPositiveScale,
    #[error("first Betti number {found} is below the required {required}")]
    BettiTooSmall { found: usize, required: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid generator parameters: {0}")]
    Generator(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge<T> {
    pub id: EdgeId,
    pub ends: (VertexId, VertexId),
    pub length: T,
}

impl<T> Edge<T> {
    pub fn is_loop(&self) -> bool {
        self.ends.0 == self.ends.1
    }

    /// The endpoint across the edge from `v`.
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.ends.0 == v {
            self.ends.1
        } else {
            self.ends.0
        }
    }
}

/// Finite graph with positive edge lengths. Loops and parallel edges are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricGraph<T> {
    vertices: BTreeSet<VertexId>,
    edges: BTreeMap<EdgeId, Edge<T>>,
}

impl<T> Default for MetricGraph<T> {
    fn default() -> Self {
        Self { vertices: BTreeSet::new(), edges: BTreeMap::new() }
    }
}

impl<T: Scalar> MetricGraph<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: VertexId) -> Result<(), GraphError> {
        if !self.vertices.insert(v) {
            return Err(GraphError::DuplicateVertex(v));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, id: EdgeId, u: VertexId, w: VertexId, length: T) -> Result<(), GraphError> {
        if self.edges.contains_key(&id) {
            return Err(GraphError::DuplicateEdge(id));
        }
        for v in [u, w] {
            if !self.vertices.contains(&v) {
                return Err(GraphError::UnknownVertex { edge: id, vertex: v });
            }
        }
        if !length.is_positive() {
            return Err(GraphError::NonPositiveLength { edge: id });
        }
        self.edges.insert(id, Edge { id, ends: (u, w), length });
        Ok(())
    }

    /// Builds a graph from vertex and edge lists, rejecting the first violation.
    pub fn from_parts<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = u32>,
        E: IntoIterator<Item = (u32, u32, u32, T)>,
    {
        let mut g = Self::new();
        for v in vertices {
            g.add_vertex(VertexId(v))?;
        }
        for (id, u, w, len) in edges {
            g.add_edge(EdgeId(id), VertexId(u), VertexId(w), len)?;
        }
        Ok(g)
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.iter().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge<T>> + '_ {
        self.edges.values()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge<T>> {
        self.edges.get(&id)
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn next_edge_id(&self) -> EdgeId {
        self.edges.keys().next_back().map_or(EdgeId(0), |e| EdgeId(e.0 + 1))
    }

    pub fn next_vertex_id(&self) -> VertexId {
        self.vertices.iter().next_back().map_or(VertexId(0), |v| VertexId(v.0 + 1))
    }

    pub fn total_length(&self) -> T {
        self.edges.values().fold(T::zero(), |acc, e| acc + e.length.clone())
    }

    /// Degree with loops counted twice.
    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .values()
            .map(|e| usize::from(e.ends.0 == v) + usize::from(e.ends.1 == v))
            .sum()
    }

    pub fn degrees(&self) -> BTreeMap<VertexId, usize> {
        let mut deg: BTreeMap<VertexId, usize> = self.vertices.iter().map(|&v| (v, 0)).collect();
        for e in self.edges.values() {
            *deg.get_mut(&e.ends.0).expect("endpoint") += 1;
            *deg.get_mut(&e.ends.1).expect("endpoint") += 1;
        }
        deg
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.degrees().values().copied().min()
    }

    /// Edges incident to `v`, loops listed once.
    pub fn incident(&self, v: VertexId) -> impl Iterator<Item = &Edge<T>> + '_ {
        self.edges.values().filter(move |e| e.ends.0 == v || e.ends.1 == v)
    }

    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut uf = UnionFind::new(self.vertices.iter().copied());
        for e in self.edges.values() {
            uf.union(e.ends.0, e.ends.1);
        }
        uf.classes()
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// First Betti number `e - v + n`.
    pub fn betti(&self) -> usize {
        self.edges.len() + self.component_count() - self.vertices.len()
    }

    pub fn require_connected(&self) -> Result<(), GraphError> {
        let n = self.component_count();
        if n > 1 {
            return Err(GraphError::NotConnected { components: n });
        }
        Ok(())
    }

    /// True iff deleting the open edge increases the number of components.
    pub fn is_separating(&self, id: EdgeId) -> Result<bool, GraphError> {
        let e = self.edges.get(&id).ok_or(GraphError::UnknownEdge(id))?;
        if e.is_loop() {
            return Ok(false);
        }
        let (start, target) = e.ends;
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for f in self.incident(v) {
                if f.id == id {
                    continue;
                }
                let w = f.other(v);
                if w == target {
                    return Ok(false);
                }
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        Ok(true)
    }

    pub fn without_edge(&self, id: EdgeId) -> Result<Self, GraphError> {
        let mut g = self.clone();
        g.edges.remove(&id).ok_or(GraphError::UnknownEdge(id))?;
        Ok(g)
    }

    /// Subgraph induced on a vertex set.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> Self {
        Self {
            vertices: self.vertices.intersection(keep).copied().collect(),
            edges: self
                .edges
                .iter()
                .filter(|(_, e)| keep.contains(&e.ends.0) && keep.contains(&e.ends.1))
                .map(|(k, e)| (*k, e.clone()))
                .collect(),
        }
    }

    pub(crate) fn remove_vertex_unchecked(&mut self, v: VertexId) {
        self.vertices.remove(&v);
    }

    pub(crate) fn remove_edge_unchecked(&mut self, id: EdgeId) -> Option<Edge<T>> {
        self.edges.remove(&id)
    }

    pub(crate) fn insert_edge_unchecked(&mut self, e: Edge<T>) {
        self.edges.insert(e.id, e);
    }

    /// Multiplies every edge length by `mu`.
    pub fn scale(&self, mu: &T) -> Result<Self, GraphError> {
        if !mu.is_positive() {
            return Err(GraphError::NonPositiveScale);
        }
        Ok(self.map_lengths(|l| l.clone() * mu.clone()))
    }

    pub fn map_lengths<U: Scalar>(&self, f: impl Fn(&T) -> U) -> MetricGraph<U> {
        MetricGraph {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|(k, e)| (*k, Edge { id: e.id, ends: e.ends, length: f(&e.length) }))
                .collect(),
        }
    }

    /// Splits edge `id` at distance `offset` from its first endpoint, returning the new vertex.
    ///
    /// An offset of zero or the full length returns the existing endpoint.
    pub fn subdivide(&mut self, id: EdgeId, offset: &T) -> Result<VertexId, GraphError> {
        let e = self.edges.get(&id).ok_or(GraphError::UnknownEdge(id))?.clone();
        if offset.is_zero() {
            return Ok(e.ends.0);
        }
        if *offset == e.length {
            return Ok(e.ends.1);
        }
        if offset.is_negative() || *offset > e.length {
            return Err(GraphError::NonPositiveLength { edge: id });
        }
        let mid = self.next_vertex_id();
        self.vertices.insert(mid);
        self.edges.remove(&id);
        let second = self.next_edge_id().max(EdgeId(id.0 + 1));
        self.edges.insert(id, Edge { id, ends: (e.ends.0, mid), length: offset.clone() });
        self.edges.insert(
            second,
            Edge { id: second, ends: (mid, e.ends.1), length: e.length - offset.clone() },
        );
        Ok(mid)
    }

    /// Shortest-path distances from `source` over the whole graph.
    pub fn distances_from(&self, source: VertexId) -> BTreeMap<VertexId, T> {
        self.distances_from_excluding(source, None)
    }

    fn distances_from_excluding(&self, source: VertexId, skip: Option<EdgeId>) -> BTreeMap<VertexId, T> {
        let idx = DartIndex::new(self);
        let Some(s) = idx.vertex_index(source) else {
            return BTreeMap::new();
        };
        let mut dist: Vec<Option<T>> = vec![None; idx.vertex_count()];
        let mut done = vec![false; idx.vertex_count()];
        let mut heap = BinaryHeap::new();
        dist[s] = Some(T::zero());
        heap.push(MinItem(T::zero(), s));
        while let Some(MinItem(d, v)) = heap.pop() {
            if done[v] {
                continue;
            }
            done[v] = true;
            for &dart in idx.out_darts(v) {
                if Some(idx.edge_id(dart)) == skip {
                    continue;
                }
                let w = idx.head(dart);
                let nd = d.clone() + idx.length(dart).clone();
                if dist[w].as_ref().is_none_or(|old| nd < *old) {
                    dist[w] = Some(nd.clone());
                    heap.push(MinItem(nd, w));
                }
            }
        }
        dist.into_iter()
            .enumerate()
            .filter_map(|(i, d)| d.map(|d| (idx.vertex_id(i), d)))
            .collect()
    }

    /// Length of the shortest cycle, or `None` for a forest.
    pub fn girth(&self) -> Option<T> {
        let mut best: Option<T> = None;
        for e in self.edges.values() {
            let candidate = if e.is_loop() {
                Some(e.length.clone())
            } else {
                self.distances_from_excluding(e.ends.0, Some(e.id))
                    .get(&e.ends.1)
                    .map(|d| d.clone() + e.length.clone())
            };
            if let Some(c) = candidate {
                if best.as_ref().is_none_or(|b| c < *b) {
                    best = Some(c);
                }
            }
        }
        best
    }

    /// Length of the radius-`radius` ball around `center` measured in the graph itself.
    pub fn graph_ball_length(&self, center: VertexId, radius: &T) -> T {
        let dist = self.distances_from(center);
        let mut total = T::zero();
        for e in self.edges.values() {
            let reach = |v: &VertexId| {
                dist.get(v).map_or(T::zero(), |d| T::max_of(radius.clone() - d.clone(), T::zero()))
            };
            let covered = reach(&e.ends.0) + reach(&e.ends.1);
            total = total + T::min_of(covered, e.length.clone());
        }
        total
    }
}

/// Structural report for a graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub vertices: usize,
    pub edges: usize,
    pub components: usize,
    pub connected: bool,
    pub min_degree: Option<usize>,
    pub degree_sum: usize,
    pub degree_sum_matches: bool,
    pub betti: usize,
    pub loops: usize,
    pub issues: Vec<String>,
}

/// Reports connectivity, minimal degree and the degree-sum identity.
pub fn validate<T: Scalar>(g: &MetricGraph<T>) -> Diagnostics {
    let degrees = g.degrees();
    let degree_sum: usize = degrees.values().sum();
    let components = g.component_count();
    let mut issues = Vec::new();
    for e in g.edges() {
        if !e.length.is_positive() {
            issues.push(format!("edge {}: nonpositive length", e.id));
        }
    }
    if components > 1 {
        issues.push(format!("graph is not connected ({components} components)"));
    }
    if degree_sum != 2 * g.edge_count() {
        issues.push(format!("degree sum {} differs from 2e = {}", degree_sum, 2 * g.edge_count()));
    }
    Diagnostics {
        vertices: g.vertex_count(),
        edges: g.edge_count(),
        components,
        connected: components <= 1,
        min_degree: degrees.values().copied().min(),
        degree_sum,
        degree_sum_matches: degree_sum == 2 * g.edge_count(),
        betti: g.betti(),
        loops: g.edges().filter(|e| e.is_loop()).count(),
        issues,
    }
}

/// Min-heap entry ordered by a partially ordered key.
pub(crate) struct MinItem<K, V>(pub K, pub V);

impl<K: PartialOrd, V: Ord> PartialEq for MinItem<K, V> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<K: PartialOrd, V: Ord> Eq for MinItem<K, V> {}

impl<K: PartialOrd, V: Ord> PartialOrd for MinItem<K, V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<K: PartialOrd, V: Ord> Ord for MinItem<K, V> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .partial_cmp(&self.0)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.1.cmp(&self.1))
    }
}

pub(crate) struct UnionFind<K: Ord + Copy> {
    parent: BTreeMap<K, K>,
}

impl<K: Ord + Copy> UnionFind<K> {
    pub fn new(keys: impl IntoIterator<Item = K>) -> Self {
        Self { parent: keys.into_iter().map(|k| (k, k)).collect() }
    }

    pub fn find(&mut self, k: K) -> K {
        let mut root = k;
        while self.parent[&root] != root {
            root = self.parent[&root];
        }
        let mut cur = k;
        while cur != root {
            let next = self.parent[&cur];
            self.parent.insert(cur, root);
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: K, b: K) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent.insert(hi, lo);
        true
    }

    pub fn classes(&mut self) -> Vec<BTreeSet<K>> {
        let keys: Vec<K> = self.parent.keys().copied().collect();
        let mut by_root: BTreeMap<K, BTreeSet<K>> = BTreeMap::new();
        for k in keys {
            let r = self.find(k);
            by_root.entry(r).or_default().insert(k);
        }
        by_root.into_values().collect()
    }
}

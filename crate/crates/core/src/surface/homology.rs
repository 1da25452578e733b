//! First homology of a triangulated surface via a tree-cotree decomposition.
//!
//! A spanning tree of the 1-skeleton and a spanning tree of the dual graph
//! avoiding it leave exactly `2g` edges. Each leftover edge closes a primal
//! generator loop through the tree and a dual loop through the cotree; the
//! dual loops give integer cocycles with `<ω_i, γ_j> = δ_ij`, so the class of
//! any cycle is read off as its pairing with the cocycles.

use std::collections::{BTreeMap, VecDeque};

use num_traits::Zero;
use serde::Serialize;

use super::{SurfaceError, TriSurface};
use crate::Rational;

/// Sparse integer column: `(row, coefficient)` pairs.
pub type SparseColumn = Vec<(usize, i64)>;

#[derive(Clone, Debug)]
pub struct Homology {
    genus: usize,
    /// Spanning-tree parent `(vertex, edge)` of every vertex, rooted at 0.
    tree_parent: Vec<Option<(usize, usize)>>,
    leftover: Vec<usize>,
    /// Generator loops as signed edge chains (sign relative to the `u < w` direction).
    generators: Vec<Vec<(usize, i64)>>,
    /// `omega[e][j]`: value of cocycle `j` on edge `e` oriented from its smaller endpoint.
    omega: Vec<Vec<i64>>,
}

impl Homology {
    pub fn compute(s: &TriSurface) -> Self {
        let n = s.vertex_count();
        let mut tree_parent = vec![None; n];
        let mut in_tree = vec![false; s.edge_count()];
        let mut seen = vec![false; n];
        let mut depth = vec![0usize; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in s.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    depth[w] = depth[v] + 1;
                    in_tree[e] = true;
                    tree_parent[w] = Some((v, e));
                    queue.push_back(w);
                }
            }
        }
        // dual tree over faces, crossing only non-tree edges
        let fcount = s.face_count();
        let mut face_parent: Vec<Option<(usize, usize)>> = vec![None; fcount];
        let mut face_depth = vec![0usize; fcount];
        let mut in_cotree = vec![false; s.edge_count()];
        let mut fseen = vec![false; fcount];
        fseen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(f) = queue.pop_front() {
            for e in s.face_edges(f) {
                if in_tree[e] {
                    continue;
                }
                let [p, q] = s.edge_faces(e);
                let g = if p == f { q } else { p };
                if !fseen[g] {
                    fseen[g] = true;
                    in_cotree[e] = true;
                    face_parent[g] = Some((f, e));
                    face_depth[g] = face_depth[f] + 1;
                    queue.push_back(g);
                }
            }
        }
        let leftover: Vec<usize> = (0..s.edge_count()).filter(|&e| !in_tree[e] && !in_cotree[e]).collect();
        let genus = s.genus();
        debug_assert_eq!(leftover.len(), 2 * genus);

        let mut generators = Vec::with_capacity(leftover.len());
        for &e in &leftover {
            let [u, w] = s.edges()[e];
            // loop: u -> w along e, then w -> u through the tree
            let mut chain: BTreeMap<usize, i64> = BTreeMap::from([(e, 1)]);
            let (mut a, mut b) = (w, u);
            let mut down = Vec::new();
            while a != b {
                if depth[a] >= depth[b] {
                    let (p, te) = tree_parent[a].expect("non-root");
                    *chain.entry(te).or_default() += if a > p { -1 } else { 1 };
                    a = p;
                } else {
                    let (p, te) = tree_parent[b].expect("non-root");
                    down.push((p, b, te));
                    b = p;
                }
            }
            for (p, c, te) in down {
                *chain.entry(te).or_default() += if p < c { 1 } else { -1 };
            }
            generators.push(chain.into_iter().filter(|&(_, c)| c != 0).collect());
        }

        let mut omega = vec![vec![0i64; leftover.len()]; s.edge_count()];
        for (j, &e) in leftover.iter().enumerate() {
            // dual loop: cross e from its positive face, return along the cotree
            let [pos, neg] = s.edge_faces(e);
            let mut crossings = vec![(pos, e)];
            let (mut a, mut b) = (neg, pos);
            let mut back = Vec::new();
            while a != b {
                if face_depth[a] >= face_depth[b] {
                    let (p, ce) = face_parent[a].expect("non-root face");
                    crossings.push((a, ce));
                    a = p;
                } else {
                    let (p, ce) = face_parent[b].expect("non-root face");
                    back.push((p, ce));
                    b = p;
                }
            }
            crossings.extend(back.into_iter().rev());
            for (from, ce) in crossings {
                omega[ce][j] += if s.edge_faces(ce)[0] == from { 1 } else { -1 };
            }
        }
        let mut h = Self { genus, tree_parent, leftover, generators, omega };
        for j in 0..h.leftover.len() {
            let pairing = h.pair(j, &h.generators[j]);
            debug_assert!(pairing.abs() == 1);
            if pairing < 0 {
                for row in &mut h.omega {
                    row[j] = -row[j];
                }
            }
        }
        h
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Rank of `H_1(M)`: always `2g`.
    pub fn rank(&self) -> usize {
        self.leftover.len()
    }

    /// Edges outside both the primal tree and the dual tree.
    pub fn leftover_edges(&self) -> &[usize] {
        &self.leftover
    }

    pub fn tree_parent(&self) -> &[Option<(usize, usize)>] {
        &self.tree_parent
    }

    /// Basis loop `i` as a signed edge chain.
    pub fn generator(&self, i: usize) -> &[(usize, i64)] {
        &self.generators[i]
    }

    /// Edge set of basis loop `i`.
    pub fn generator_edges(&self, i: usize) -> Vec<usize> {
        self.generators[i].iter().map(|&(e, _)| e).collect()
    }

    fn pair(&self, j: usize, chain: &[(usize, i64)]) -> i64 {
        chain.iter().map(|&(e, c)| c * self.omega[e][j]).sum()
    }

    /// Cocycle values on an edge traversed from `from` to its other endpoint.
    pub fn edge_class(&self, s: &TriSurface, e: usize, from: usize) -> Vec<i64> {
        let sign = if s.edges()[e][0] == from { 1 } else { -1 };
        self.omega[e].iter().map(|x| sign * x).collect()
    }

    /// Coordinates of a closed chain in the generator basis.
    pub fn classify(&self, chain: &[(usize, i64)]) -> Vec<i64> {
        (0..self.rank()).map(|j| self.pair(j, chain)).collect()
    }

    /// Boundary map from edges to vertices, one column per edge.
    pub fn boundary1(s: &TriSurface) -> Vec<SparseColumn> {
        s.edges().iter().map(|&[u, w]| vec![(u, -1), (w, 1)]).collect()
    }

    /// Boundary map from faces to edges, one column per face.
    pub fn boundary2(s: &TriSurface) -> Vec<SparseColumn> {
        (0..s.face_count())
            .map(|f| {
                let [a, b, c] = s.faces()[f];
                [(a, b), (b, c), (c, a)]
                    .into_iter()
                    .map(|(u, w)| (s.edge_id(u, w).expect("face side"), if u < w { 1 } else { -1 }))
                    .collect()
            })
            .collect()
    }
}

/// Rank over the rationals of a matrix given by sparse integer columns.
pub fn sparse_rank(columns: &[SparseColumn]) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, Rational>> = BTreeMap::new();
    for col in columns {
        let mut v: BTreeMap<usize, Rational> = BTreeMap::new();
        for &(r, c) in col {
            *v.entry(r).or_insert_with(Rational::zero) += Rational::from_integer(c.into());
        }
        v.retain(|_, x| !x.is_zero());
        while let Some((&low, coef)) = v.iter().next() {
            let Some(p) = pivots.get(&low) else { break };
            let factor = coef.clone();
            for (r, x) in p {
                let entry = v.entry(*r).or_insert_with(Rational::zero);
                *entry -= &factor * x;
                if entry.is_zero() {
                    v.remove(r);
                }
            }
        }
        if let Some((&low, coef)) = v.iter().next() {
            let inv = coef.recip();
            let normalized = v.into_iter().map(|(r, x)| (r, x * &inv)).collect();
            pivots.insert(low, normalized);
        }
    }
    pivots.len()
}

/// Incremental rank of small integer vectors over the rationals.
#[derive(Default)]
pub(crate) struct Span {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl Span {
    /// Adds `v`; true when it was independent.
    pub(crate) fn insert(&mut self, v: &[i64]) -> bool {
        let mut v: Vec<Rational> = v.iter().map(|&x| Rational::from_integer(x.into())).collect();
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    *x -= &f * y;
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else { return false };
        let inv = v[p].recip();
        for x in &mut v {
            *x *= &inv;
        }
        for (_, row) in &mut self.rows {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (x, y) in row.iter_mut().zip(&v) {
                    *x -= &f * y;
                }
            }
        }
        self.rows.push((p, v));
        true
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaptureTest {
    /// Rank of the image of the subgraph's cycle space in `H_1(M)`.
    pub rank: usize,
    /// True iff the image is all of `H_1(M)`.
    pub captures: bool,
    pub betti: usize,
    pub components: usize,
    pub genus: usize,
}

/// Classes of a basis of the cycle space of the subgraph spanned by `edges`.
pub(crate) fn cycle_classes(s: &TriSurface, edges: &[usize]) -> (Vec<Vec<i64>>, usize, usize) {
    let h = s.homology();
    let mut adj: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    let mut uniq = edges.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    for &e in &uniq {
        let [u, w] = s.edges()[e];
        adj.entry(u).or_default().push((w, e));
        adj.entry(w).or_default().push((u, e));
    }
    let mut potential: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
    let mut used = vec![false; s.edge_count()];
    let mut components = 0;
    let roots: Vec<usize> = adj.keys().copied().collect();
    for root in roots {
        if potential.contains_key(&root) {
            continue;
        }
        components += 1;
        potential.insert(root, vec![0; h.rank()]);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(w, e) in &adj[&v] {
                if potential.contains_key(&w) {
                    continue;
                }
                used[e] = true;
                let step = h.edge_class(s, e, v);
                let pw = potential[&v].iter().zip(&step).map(|(a, b)| a + b).collect();
                potential.insert(w, pw);
                queue.push_back(w);
            }
        }
    }
    let mut classes = Vec::new();
    for &e in &uniq {
        if used[e] {
            continue;
        }
        let [u, w] = s.edges()[e];
        let step = h.edge_class(s, e, u);
        classes.push(potential[&u].iter().zip(&step).zip(&potential[&w]).map(|((a, b), c)| a + b - c).collect());
    }
    let betti = classes.len();
    (classes, betti, components)
}

/// Whether the subgraph on `edges` captures the topology of `s`.
pub fn capturing_test(s: &TriSurface, edges: &[usize]) -> CaptureTest {
    let genus = s.genus();
    let (classes, betti, components) = cycle_classes(s, edges);
    let mut span = Span::default();
    for c in &classes {
        if span.insert(c) && span.rank() == 2 * genus {
            break;
        }
    }
    let rank = span.rank();
    CaptureTest { rank, captures: rank == 2 * genus, betti, components, genus }
}

/// Greedy reduction of a connected capturing subgraph: longest edges first,
/// an edge is dropped whenever the rest stays connected and capturing. The
/// result has Betti number exactly `2g`.
pub fn prune_to_iso(s: &TriSurface, edges: &[usize]) -> Result<Vec<usize>, SurfaceError> {
    let mut current: Vec<usize> = edges.to_vec();
    current.sort_unstable();
    current.dedup();
    let start = capturing_test(s, &current);
    if !start.captures {
        return Err(SurfaceError::Precondition(format!(
            "subgraph has rank {} but genus {} needs {}",
            start.rank,
            start.genus,
            2 * start.genus
        )));
    }
    if start.components > 1 {
        return Err(SurfaceError::Precondition("subgraph is disconnected".into()));
    }
    let mut order = current.clone();
    order.sort_by(|&a, &b| s.length(b).cmp(s.length(a)).then(b.cmp(&a)));
    for e in order {
        let trial: Vec<usize> = current.iter().copied().filter(|&x| x != e).collect();
        if trial.is_empty() {
            continue;
        }
        let t = capturing_test(s, &trial);
        if t.captures && t.components == 1 {
            current = trial;
        }
    }
    let last = capturing_test(s, &current);
    if last.betti != 2 * last.genus {
        return Err(SurfaceError::Precondition(format!("pruning stopped at Betti {}", last.betti)));
    }
    Ok(current)
}

impl Homology {
    /// Sum of the boundary of every face: zero on a closed oriented surface.
    pub fn fundamental_class_boundary(s: &TriSurface) -> Vec<i64> {
        let mut total = vec![0i64; s.edge_count()];
        for col in Self::boundary2(s) {
            for (e, c) in col {
                total[e] += c;
            }
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{genus2, octahedron, subdivide, tetrahedron, torus7};

    #[test]
    fn generators_pair_to_identity() {
        for s in [torus7(), genus2(), subdivide(&torus7())] {
            let h = s.homology();
            assert_eq!(h.rank(), 2 * s.genus());
            for i in 0..h.rank() {
                let mut expected = vec![0; h.rank()];
                expected[i] = 1;
                assert_eq!(h.classify(h.generator(i)), expected);
            }
        }
    }

    #[test]
    fn boundaries_of_faces_are_null() {
        let s = genus2();
        let h = s.homology();
        for col in Homology::boundary2(&s) {
            assert!(h.classify(&col).iter().all(|&x| x == 0));
        }
        assert!(Homology::fundamental_class_boundary(&s).iter().all(|&x| x == 0));
    }

    #[test]
    fn spheres_have_no_homology() {
        for s in [tetrahedron(), octahedron()] {
            assert_eq!(s.homology().rank(), 0);
            let all: Vec<usize> = (0..s.edge_count()).collect();
            assert!(capturing_test(&s, &all).captures);
        }
    }

    #[test]
    fn sparse_rank_small() {
        assert_eq!(sparse_rank(&[vec![(0, 1), (1, 1)], vec![(0, 2), (1, 2)], vec![(2, 1)]]), 2);
        assert_eq!(sparse_rank(&[]), 0);
    }
}

use serde::Serialize;

use super::WitnessError;
use crate::graph::{DartIndex, EdgeId, VertexId};
use crate::scalar::{format_rational, serialize_exact};
use crate::{Graph, Rational};

/// Deepest subtree [`build_prop31_subtree`] will build.
pub const MAX_SUBTREE_DEPTH: usize = 14;

/// Node of the subtree, identified by its reduced walk from the root lift.
#[derive(Clone, Debug, Serialize)]
pub struct SubtreeNode {
    pub id: usize,
    pub parent: Option<usize>,
    /// Super-edges between this node and the root.
    pub depth: usize,
    /// Projection of the node to the graph.
    pub vertex: VertexId,
    /// Traversed edges from the root lift, with direction (true = first to second endpoint).
    pub walk: Vec<(EdgeId, bool)>,
    #[serde(serialize_with = "serialize_exact")]
    pub distance: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuperEdge {
    pub parent: usize,
    pub child: usize,
    pub graph_edges: usize,
    #[serde(serialize_with = "serialize_exact")]
    pub length: Rational,
}

/// Finite part of a trivalent subtree of the universal cover whose edges are
/// reduced paths of length in `[C', C' + c]`.
#[derive(Clone, Debug, Serialize)]
pub struct SubtreeWitness {
    pub root: VertexId,
    #[serde(serialize_with = "serialize_exact")]
    pub c: Rational,
    #[serde(serialize_with = "serialize_exact")]
    pub c_prime: Rational,
    pub nodes: Vec<SubtreeNode>,
    pub super_edges: Vec<SuperEdge>,
    #[serde(skip)]
    darts: Vec<Vec<usize>>,
    #[serde(skip)]
    dart_lengths: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BiLipschitzReport {
    pub pairs: usize,
    pub violations: Vec<(usize, usize, String)>,
}

/// Greedy construction from the smallest vertex of `g`: three reduced paths
/// from the root lift, then two from every frontier node, each stopped at the
/// first vertex where its length reaches `C'`.
///
/// At every cover vertex the smallest-id admissible darts are used, so the
/// underlying trivalent subtree of the cover is fixed by `g` alone.
pub fn build_prop31_subtree(
    g: &Graph,
    c: &Rational,
    c_prime: &Rational,
    depth: usize,
) -> Result<SubtreeWitness, WitnessError> {
    if depth > MAX_SUBTREE_DEPTH {
        return Err(WitnessError::Precondition(format!("depth {depth} exceeds {MAX_SUBTREE_DEPTH}")));
    }
    g.require_connected()?;
    if g.min_degree().is_none_or(|d| d < 3) {
        return Err(WitnessError::Precondition("graph must be at least trivalent".into()));
    }
    if let Some(e) = g.edges().find(|e| e.length > *c) {
        return Err(WitnessError::Precondition(format!(
            "edge {} has length {} > c = {}",
            e.id,
            format_rational(&e.length),
            format_rational(c)
        )));
    }
    if *c_prime <= Rational::from_integer(0.into()) {
        return Err(WitnessError::Precondition("C' must be positive".into()));
    }
    let idx = DartIndex::new(g);
    let root = g.vertices().next().expect("nonempty graph");
    let root_pos = idx.vertex_index(root).expect("root vertex");
    let dart_lengths: Vec<Rational> = (0..idx.dart_count()).map(|d| idx.length(d).clone()).collect();
    let mut tree = SubtreeWitness {
        root,
        c: c.clone(),
        c_prime: c_prime.clone(),
        nodes: vec![SubtreeNode {
            id: 0,
            parent: None,
            depth: 0,
            vertex: root,
            walk: Vec::new(),
            distance: Rational::from_integer(0.into()),
        }],
        super_edges: Vec::new(),
        darts: vec![Vec::new()],
        dart_lengths,
    };
    let mut frontier = vec![0usize];
    for level in 1..=depth {
        let mut next = Vec::new();
        for &node in &frontier {
            let starts: Vec<usize> = match tree.darts[node].last() {
                None => idx.out_darts(root_pos).iter().copied().take(3).collect(),
                Some(&inc) => idx.successors(inc).take(2).collect(),
            };
            for first in starts {
                let mut path = vec![first];
                let mut len = idx.length(first).clone();
                while len < *c_prime {
                    let step = idx.successors(*path.last().expect("nonempty")).next().expect("degree at least 3");
                    len += idx.length(step);
                    path.push(step);
                }
                let child = tree.nodes.len();
                let mut darts = tree.darts[node].clone();
                darts.extend(&path);
                let walk = darts.iter().map(|&d| (idx.edge_id(d), d % 2 == 0)).collect();
                tree.nodes.push(SubtreeNode {
                    id: child,
                    parent: Some(node),
                    depth: level,
                    vertex: idx.vertex_id(idx.head(*path.last().expect("nonempty"))),
                    walk,
                    distance: &tree.nodes[node].distance + &len,
                });
                tree.darts.push(darts);
                tree.super_edges.push(SuperEdge { parent: node, child, graph_edges: path.len(), length: len });
                next.push(child);
            }
        }
        frontier = next;
    }
    Ok(tree)
}

impl SubtreeWitness {
    /// Distance in the universal cover between the lifts of two nodes.
    ///
    /// Both walks are reduced, so the geodesic turns at their longest common prefix.
    pub fn cover_distance(&self, a: usize, b: usize) -> Rational {
        let (wa, wb) = (&self.darts[a], &self.darts[b]);
        let common = wa.iter().zip(wb).take_while(|(x, y)| x == y).count();
        let sum = |w: &[usize]| w.iter().fold(Rational::from_integer(0.into()), |acc, &d| acc + &self.dart_lengths[d]);
        sum(&wa[common..]) + sum(&wb[common..])
    }

    /// Number of super-edges on the subtree path between two nodes.
    pub fn tree_distance(&self, a: usize, b: usize) -> usize {
        let (mut x, mut y) = (a, b);
        let mut steps = 0;
        while x != y {
            if self.nodes[x].depth >= self.nodes[y].depth {
                x = self.nodes[x].parent.expect("non-root");
            } else {
                y = self.nodes[y].parent.expect("non-root");
            }
            steps += 1;
        }
        steps
    }

    /// Checks `C' k <= d <= (C' + c) k` for all node pairs up to `max_depth`.
    pub fn check_bilipschitz(&self, max_depth: usize) -> BiLipschitzReport {
        let ids: Vec<usize> = self.nodes.iter().filter(|n| n.depth <= max_depth).map(|n| n.id).collect();
        let upper = &self.c_prime + &self.c;
        let mut pairs = 0;
        let mut violations = Vec::new();
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                pairs += 1;
                let k = Rational::from_integer(self.tree_distance(a, b).into());
                let d = self.cover_distance(a, b);
                if d < &self.c_prime * &k || d > &upper * &k {
                    violations.push((a, b, format_rational(&d)));
                }
            }
        }
        BiLipschitzReport { pairs, violations }
    }
}

use std::collections::BTreeMap;

use serde::Serialize;

use super::{Edge, EdgeId, GraphError, MetricGraph, VertexId};
use crate::scalar::Scalar;

/// What a reduction removed, and where each surviving edge came from.
///
/// Vertex ids are never renamed by a reduction, so a surviving vertex is its
/// own preimage. Edges created by smoothing get fresh ids; `edge_origin` maps
/// every edge of the reduced graph to the original edges it replaces.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReductionTrace {
    pub removed_leaves: Vec<VertexId>,
    pub removed_edges: Vec<EdgeId>,
    pub smoothed: Vec<VertexId>,
    pub edge_origin: BTreeMap<EdgeId, Vec<EdgeId>>,
}

impl ReductionTrace {
    fn identity<T: Scalar>(g: &MetricGraph<T>) -> Self {
        Self { edge_origin: g.edges().map(|e| (e.id, vec![e.id])).collect(), ..Self::default() }
    }

    /// Maps a vertex of the reduced graph back to the original graph.
    pub fn original_vertex(&self, v: VertexId) -> VertexId {
        v
    }

    /// Composes `self` (original to intermediate) with `next` (intermediate to final).
    pub fn then(mut self, next: ReductionTrace) -> Self {
        self.removed_leaves.extend(next.removed_leaves);
        self.removed_edges.extend(next.removed_edges.iter().flat_map(|e| {
            self.edge_origin.get(e).cloned().unwrap_or_else(|| vec![*e])
        }));
        self.smoothed.extend(next.smoothed);
        let origin = next
            .edge_origin
            .into_iter()
            .map(|(e, parts)| {
                let flat = parts
                    .iter()
                    .flat_map(|p| self.edge_origin.get(p).cloned().unwrap_or_else(|| vec![*p]))
                    .collect();
                (e, flat)
            })
            .collect();
        self.edge_origin = origin;
        self
    }
}

/// Removes degree-one vertices and their edges until none remain.
///
/// A tree collapses to a single vertex.
pub fn prune_leaves<T: Scalar>(g: &MetricGraph<T>) -> Result<(MetricGraph<T>, ReductionTrace), GraphError> {
    g.require_connected()?;
    let mut out = g.clone();
    let mut trace = ReductionTrace::identity(g);
    loop {
        let leaves: Vec<VertexId> = out
            .degrees()
            .into_iter()
            .filter(|&(_, d)| d == 1)
            .map(|(v, _)| v)
            .collect();
        if leaves.is_empty() {
            break;
        }
        for v in leaves {
            // a two-vertex path loses both ends in one sweep; keep one of them
            if out.degree(v) != 1 {
                continue;
            }
            let e = out.incident(v).next().expect("leaf edge").id;
            out.remove_edge_unchecked(e);
            out.remove_vertex_unchecked(v);
            trace.removed_leaves.push(v);
            trace.removed_edges.push(e);
            trace.edge_origin.remove(&e);
        }
    }
    Ok((out, trace))
}

/// Replaces every degree-two vertex by a single edge carrying the summed length.
///
/// A bare cycle keeps one vertex carrying a loop.
pub fn smooth_degree2<T: Scalar>(g: &MetricGraph<T>) -> Result<(MetricGraph<T>, ReductionTrace), GraphError> {
    g.require_connected()?;
    let mut out = g.clone();
    let mut trace = ReductionTrace::identity(g);
    let candidates: Vec<VertexId> = g.vertices().collect();
    for v in candidates {
        if out.degree(v) != 2 {
            continue;
        }
        let incident: Vec<Edge<T>> = out.incident(v).cloned().collect();
        if incident.len() == 1 {
            // a loop at v is the whole cycle: nothing left to merge
            continue;
        }
        let (a, b) = (&incident[0], &incident[1]);
        let (left, right) = (a.other(v), b.other(v));
        let id = out.next_edge_id();
        let merged = Edge { id, ends: (left, right), length: a.length.clone() + b.length.clone() };
        let mut origin = trace.edge_origin.remove(&a.id).unwrap_or_default();
        origin.extend(trace.edge_origin.remove(&b.id).unwrap_or_default());
        out.remove_edge_unchecked(a.id);
        out.remove_edge_unchecked(b.id);
        out.remove_vertex_unchecked(v);
        out.insert_edge_unchecked(merged);
        trace.edge_origin.insert(id, origin);
        trace.smoothed.push(v);
    }
    Ok((out, trace))
}

/// Leaf pruning followed by smoothing.
pub fn reduce<T: Scalar>(g: &MetricGraph<T>) -> Result<(MetricGraph<T>, ReductionTrace), GraphError> {
    let (pruned, t1) = prune_leaves(g)?;
    let (smoothed, t2) = smooth_degree2(&pruned)?;
    Ok((smoothed, t1.then(t2)))
}

use std::collections::BTreeMap;

use super::{EdgeId, MetricGraph, VertexId};
use crate::scalar::Scalar;

/// Dense half-edge view of a [`MetricGraph`].
///
/// Edge `i` (in id order) owns darts `2i` (first endpoint to second) and
/// `2i + 1` (the reverse). A loop therefore contributes two distinct darts at
/// its vertex, and `reverse(d) == d ^ 1` always.
#[derive(Clone, Debug)]
pub struct DartIndex<T> {
    vertex_ids: Vec<VertexId>,
    vertex_pos: BTreeMap<VertexId, usize>,
    edge_ids: Vec<EdgeId>,
    tail: Vec<usize>,
    head: Vec<usize>,
    length: Vec<T>,
    out: Vec<Vec<usize>>,
}

impl<T: Scalar> DartIndex<T> {
    pub fn new(g: &MetricGraph<T>) -> Self {
        let vertex_ids: Vec<VertexId> = g.vertices().collect();
        let vertex_pos: BTreeMap<VertexId, usize> =
            vertex_ids.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut edge_ids = Vec::with_capacity(g.edge_count());
        let mut tail = Vec::with_capacity(2 * g.edge_count());
        let mut head = Vec::with_capacity(2 * g.edge_count());
        let mut length = Vec::with_capacity(2 * g.edge_count());
        let mut out = vec![Vec::new(); vertex_ids.len()];
        for e in g.edges() {
            let a = vertex_pos[&e.ends.0];
            let b = vertex_pos[&e.ends.1];
            let d = tail.len();
            edge_ids.push(e.id);
            tail.extend([a, b]);
            head.extend([b, a]);
            length.extend([e.length.clone(), e.length.clone()]);
            out[a].push(d);
            out[b].push(d + 1);
        }
        Self { vertex_ids, vertex_pos, edge_ids, tail, head, length, out }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn dart_count(&self) -> usize {
        self.tail.len()
    }

    pub fn vertex_index(&self, v: VertexId) -> Option<usize> {
        self.vertex_pos.get(&v).copied()
    }

    pub fn vertex_id(&self, i: usize) -> VertexId {
        self.vertex_ids[i]
    }

    pub fn edge_id(&self, dart: usize) -> EdgeId {
        self.edge_ids[dart / 2]
    }

    pub fn tail(&self, dart: usize) -> usize {
        self.tail[dart]
    }

    pub fn head(&self, dart: usize) -> usize {
        self.head[dart]
    }

    pub fn length(&self, dart: usize) -> &T {
        &self.length[dart]
    }

    pub fn reverse(dart: usize) -> usize {
        dart ^ 1
    }

    /// Darts leaving vertex `v`, in edge-id order.
    pub fn out_darts(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    /// Darts that may follow `dart` in a non-backtracking walk.
    pub fn successors(&self, dart: usize) -> impl Iterator<Item = usize> + '_ {
        let back = Self::reverse(dart);
        self.out[self.head[dart]].iter().copied().filter(move |&d| d != back)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use crate::Rational;

    #[test]
    fn loops_have_two_darts_and_allow_repetition() {
        let g: MetricGraph<Rational> = MetricGraph::from_parts([0], [(0, 0, 0, int(1))]).unwrap();
        let idx = DartIndex::new(&g);
        assert_eq!(idx.out_darts(0), &[0, 1]);
        assert_eq!(idx.successors(0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(idx.successors(1).collect::<Vec<_>>(), vec![1]);
    }
}

//! Shortest non-contractible loops in the 1-skeleton.
//!
//! A shortest non-contractible loop based at `x` is a tree path, one edge and
//! a tree path back, for the shortest-path tree of `x`. Candidates are tried in
//! order of length. A nonzero homology class settles non-contractibility; a
//! null-homologous candidate is reduced to its simple cycle, which is
//! contractible iff one of its two sides is an open disk.

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use super::{SurfaceError, TriSurface};
use crate::scalar::serialize_exact;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Systole {
    /// Base vertex of the loop.
    pub base: usize,
    #[serde(serialize_with = "serialize_exact")]
    pub length: Rational,
    pub ticks: u64,
    /// Closing edge outside the shortest-path tree.
    pub closing_edge: usize,
    /// Based loop: path from the base, closing edge, path back (may backtrack near the base).
    pub loop_edges: Vec<usize>,
    /// Simple cycle left after cancelling the common part of the two tree paths.
    pub cycle_edges: Vec<usize>,
    #[serde(serialize_with = "serialize_exact")]
    pub cycle_length: Rational,
    /// Homology class in the generator basis; all zero for separating loops.
    pub class: Vec<i64>,
    /// The loop was found under the assumption that a shortest one is simple.
    pub assumes_simple: bool,
}

/// Whether a simple cycle (given by its edges) bounds a disk.
///
/// Faces on either side are flooded in lockstep; the first side to finish is
/// classified by its Euler characteristic and the other by complement.
pub fn bounds_disk(s: &TriSurface, cycle: &[usize]) -> bool {
    let on_cycle: BTreeSet<usize> = cycle.iter().copied().collect();
    let Some(&e0) = cycle.first() else { return true };
    let [start_a, start_b] = s.edge_faces(e0);
    let mut side = vec![0u8; s.face_count()];
    side[start_a] = 1;
    side[start_b] = 2;
    let mut queues = [VecDeque::from([start_a]), VecDeque::from([start_b])];
    let mut members: [Vec<usize>; 2] = [vec![start_a], vec![start_b]];
    let finished = loop {
        let mut done = None;
        for k in 0..2 {
            let Some(f) = queues[k].pop_front() else {
                done = Some(k);
                break;
            };
            for e in s.face_edges(f) {
                if on_cycle.contains(&e) {
                    continue;
                }
                let [p, q] = s.edge_faces(e);
                let g = if p == f { q } else { p };
                match side[g] {
                    0 => {
                        side[g] = k as u8 + 1;
                        members[k].push(g);
                        queues[k].push_back(g);
                    }
                    x if x != k as u8 + 1 => return false, // one side: not separating
                    _ => {}
                }
            }
        }
        if let Some(k) = done {
            break k;
        }
    };
    let faces = &members[finished];
    let cycle_vertices: BTreeSet<usize> = cycle.iter().flat_map(|&e| s.edges()[e]).collect();
    let mut edges = BTreeSet::new();
    let mut vertices = BTreeSet::new();
    for &f in faces {
        edges.extend(s.face_edges(f).into_iter().filter(|e| !on_cycle.contains(e)));
        vertices.extend(s.faces()[f].into_iter().filter(|v| !cycle_vertices.contains(v)));
    }
    let chi = faces.len() as i64 - edges.len() as i64 + vertices.len() as i64;
    // the cycle itself has Euler characteristic zero
    chi == 1 || s.euler_characteristic() - chi == 1
}

/// Shortest non-contractible loop based at `x`.
pub fn systole_at(s: &TriSurface, x: usize) -> Result<Systole, SurfaceError> {
    if s.genus() == 0 {
        return Err(SurfaceError::Sphere);
    }
    if x >= s.vertex_count() {
        return Err(SurfaceError::Precondition(format!("vertex {x} out of range")));
    }
    let h = s.homology();
    let (dist, parent) = s.shortest_path_tree(x);
    // potentials along the tree, in order of distance
    let mut order: Vec<usize> = (0..s.vertex_count()).collect();
    order.sort_by_key(|&v| (dist[v], v));
    let mut potential = vec![vec![0i64; h.rank()]; s.vertex_count()];
    let mut depth = vec![0usize; s.vertex_count()];
    for &v in &order {
        if let Some((p, e)) = parent[v] {
            let step = h.edge_class(s, e, p);
            potential[v] = potential[p].iter().zip(&step).map(|(a, b)| a + b).collect();
            depth[v] = depth[p] + 1;
        }
    }
    let mut candidates: Vec<(u64, usize)> = (0..s.edge_count())
        .filter(|&e| {
            let [u, w] = s.edges()[e];
            parent[u].map(|(_, pe)| pe) != Some(e) && parent[w].map(|(_, pe)| pe) != Some(e)
        })
        .map(|e| {
            let [u, w] = s.edges()[e];
            (dist[u] + s.ticks(e) + dist[w], e)
        })
        .collect();
    candidates.sort_unstable();
    for (ticks, e) in candidates {
        let [u, w] = s.edges()[e];
        let step = h.edge_class(s, e, u);
        let class: Vec<i64> =
            potential[u].iter().zip(&step).zip(&potential[w]).map(|((a, b), c)| a + b - c).collect();
        // cancel the common part of the two tree paths
        let (mut a, mut b) = (u, w);
        let (mut up_a, mut up_b) = (Vec::new(), Vec::new());
        while a != b {
            if depth[a] >= depth[b] {
                let (p, pe) = parent[a].expect("below the meeting point");
                up_a.push(pe);
                a = p;
            } else {
                let (p, pe) = parent[b].expect("below the meeting point");
                up_b.push(pe);
                b = p;
            }
        }
        let mut cycle = up_a.clone();
        cycle.push(e);
        cycle.extend(up_b.iter().rev());
        let essential = class.iter().any(|&c| c != 0) || (s.genus() >= 2 && !bounds_disk(s, &cycle));
        if !essential {
            continue;
        }
        let tail = {
            let mut t = Vec::new();
            let mut v = a;
            while let Some((p, pe)) = parent[v] {
                t.push(pe);
                v = p;
            }
            t
        };
        let mut loop_edges: Vec<usize> = tail.iter().rev().copied().collect();
        loop_edges.extend(up_a.iter().rev());
        loop_edges.push(e);
        loop_edges.extend(&up_b);
        loop_edges.extend(&tail);
        let cycle_length = s.edges_length(&cycle);
        return Ok(Systole {
            base: x,
            length: s.to_rational(ticks),
            ticks,
            closing_edge: e,
            loop_edges,
            cycle_edges: cycle,
            cycle_length,
            class,
            assumes_simple: true,
        });
    }
    Err(SurfaceError::Precondition("every loop is contractible".into()))
}

/// Shortest non-contractible simple cycle: the minimum of [`systole_at`] over all vertices.
pub fn systole_simple(s: &TriSurface) -> Result<Systole, SurfaceError> {
    if s.genus() == 0 {
        return Err(SurfaceError::Sphere);
    }
    let all: Vec<Systole> = (0..s.vertex_count()).into_par_iter().map(|x| systole_at(s, x)).collect::<Result<_, _>>()?;
    Ok(all.into_iter().min_by(|a, b| a.ticks.cmp(&b.ticks).then(a.base.cmp(&b.base))).expect("nonempty surface"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};
    use crate::surface::{genus2, subdivide, tetrahedron, torus7};

    #[test]
    fn unit_torus_has_systole_three() {
        let s = torus7();
        let sys = systole_simple(&s).unwrap();
        assert_eq!(sys.length, int(3));
        assert_eq!(sys.cycle_edges.len(), 3);
    }

    #[test]
    fn faces_bound_disks() {
        let s = genus2();
        for f in 0..s.face_count() {
            assert!(bounds_disk(&s, &s.face_edges(f)));
        }
    }

    #[test]
    fn refinement_keeps_and_scaling_scales_the_systole() {
        let s = subdivide(&torus7());
        assert_eq!(systole_simple(&s).unwrap().length, int(3));
        let scaled = s.scaled(&ratio(1, 2)).unwrap();
        assert_eq!(systole_simple(&scaled).unwrap().length, ratio(3, 2));
    }

    #[test]
    fn sphere_is_rejected() {
        assert_eq!(systole_at(&tetrahedron(), 0).unwrap_err(), SurfaceError::Sphere);
    }
}

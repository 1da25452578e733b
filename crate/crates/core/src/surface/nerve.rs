//! Nerve graph of a maximal packing by small balls.
//!
//! Centers are chosen by farthest-point traversal so that they are pairwise
//! more than `2 r₀` apart (disjoint `r₀`-balls) and every vertex lies within
//! `2 r₀` of a center. Two centers are joined when their distance is at most
//! `4 r₀ + 2ε`; each nerve edge gets length 1/4 and maps to a shortest path
//! between its centers. The nerve is pruned to a connected graph of Betti
//! number `2g` that still captures the topology.

use std::collections::{BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use super::homology::Span;
use super::{BallSubcomplex, SurfaceError, TriSurface};
use crate::scalar::{int, ratio, rational_to_f64, serialize_exact};
use crate::Rational;

/// Packing radius as `(numerator, denominator)`.
pub const DEFAULT_R0: (i64, i64) = (1, 32);
/// Slack as `(numerator, denominator)`; `4 r₀ + 2ε = 5/32 < 1/4`.
pub const DEFAULT_EPS: (i64, i64) = (1, 64);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NerveEdge {
    pub id: usize,
    pub ends: (usize, usize),
    /// Distance between the two centers.
    #[serde(serialize_with = "serialize_exact")]
    pub distance: Rational,
    /// Skeleton edges of the shortest path `φ(edge)`.
    pub path: Vec<usize>,
    /// Homology class of the path from the first to the second center.
    pub class: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NerveReport {
    #[serde(serialize_with = "serialize_exact")]
    pub r0: Rational,
    #[serde(serialize_with = "serialize_exact")]
    pub eps: Rational,
    pub genus: usize,
    pub area: f64,
    pub centers: Vec<usize>,
    pub edges: Vec<NerveEdge>,
    /// Rank of the image of the nerve graph's cycles in `H_1(M)`.
    pub nerve_rank: usize,
    /// Nerve edge ids kept by pruning.
    pub pruned: Vec<usize>,
    pub pruned_betti: usize,
    #[serde(serialize_with = "serialize_exact")]
    pub pruned_length: Rational,
    /// `(v - 1 + 2g) / 4` with `v` the number of centers.
    #[serde(serialize_with = "serialize_exact")]
    pub pruned_length_bound: Rational,
    /// Skeleton edges of `φ(Γ′)`.
    pub image_edges: Vec<usize>,
    #[serde(serialize_with = "serialize_exact")]
    pub image_length: Rational,
    pub image_rank: usize,
    /// Smallest face-ball area among the `r₀`-balls around centers.
    pub min_ball_area: f64,
    /// Every `r₀`-ball has area at least `r₀²/4`.
    pub ball_area_precondition: bool,
    /// `2^12 · area(M)`.
    pub packing_bound: f64,
    pub packing_ok: bool,
    pub pruned_length_ok: bool,
    /// Longest `φ` path; must not exceed the nerve edge length 1/4.
    #[serde(serialize_with = "serialize_exact")]
    pub max_phi_length: Rational,
    pub phi_ok: bool,
    pub maximal_packing: bool,
    /// `area(M) <= (2g - 1) / 2^12`.
    pub area_hypothesis: bool,
    /// `sys(M) >= 1/2`, when the systole was supplied.
    pub systole_hypothesis: Option<bool>,
}

impl NerveReport {
    /// All constructive checks hold (hypotheses are reported separately).
    pub fn checks_pass(&self) -> bool {
        (self.packing_ok || !self.ball_area_precondition) && self.pruned_length_ok && self.phi_ok && self.maximal_packing
    }
}

pub fn nerve_graph(
    s: &TriSurface,
    r0: &Rational,
    eps: &Rational,
    systole: Option<&Rational>,
) -> Result<NerveReport, SurfaceError> {
    if *r0 <= int(0) || *eps <= int(0) {
        return Err(SurfaceError::Precondition("r0 and eps must be positive".into()));
    }
    let reach = int(4) * r0 + int(2) * eps;
    if reach >= ratio(1, 4) {
        return Err(SurfaceError::Precondition(format!(
            "4 r0 + 2 eps = {} must be below 1/4",
            crate::scalar::format_rational(&reach)
        )));
    }
    let n = s.vertex_count();
    // packing: farthest point first, strictly more than 2 r0 from every center
    let two_r0 = s.ticks_floor(&(int(2) * r0));
    let strictly_far = |d: u64| s.to_rational(d) > int(2) * r0;
    let mut centers = vec![0usize];
    let mut nearest = s.shortest_path_tree(0).0;
    loop {
        let far = (0..n).max_by(|&a, &b| nearest[a].cmp(&nearest[b]).then(b.cmp(&a))).expect("vertices");
        if !strictly_far(nearest[far]) {
            break;
        }
        centers.push(far);
        let d = s.shortest_path_tree(far).0;
        for (x, y) in nearest.iter_mut().zip(d) {
            *x = (*x).min(y);
        }
    }
    let maximal_packing = nearest.iter().all(|&d| d <= two_r0);

    let h = s.homology();
    let reach_ticks = s.ticks_floor(&reach);
    let index: Vec<Option<usize>> = {
        let mut idx = vec![None; n];
        for (i, &c) in centers.iter().enumerate() {
            idx[c] = Some(i);
        }
        idx
    };
    let local: Vec<Vec<NerveEdge>> = centers
        .par_iter()
        .enumerate()
        .map(|(i, &c)| {
            let (dist, parent) = s.shortest_path_tree_within(c, reach_ticks);
            let mut out = Vec::new();
            for v in 0..n {
                let Some(j) = index[v] else { continue };
                if j <= i || dist[v] > reach_ticks {
                    continue;
                }
                let mut path = Vec::new();
                let mut class = vec![0i64; h.rank()];
                let mut x = v;
                while let Some((p, e)) = parent[x] {
                    path.push(e);
                    for (acc, step) in class.iter_mut().zip(h.edge_class(s, e, p)) {
                        *acc += step;
                    }
                    x = p;
                }
                path.reverse();
                out.push(NerveEdge { id: 0, ends: (i, j), distance: s.to_rational(dist[v]), path, class });
            }
            out
        })
        .collect();
    let mut edges: Vec<NerveEdge> = local.into_iter().flatten().collect();
    edges.sort_by_key(|e| e.ends);
    for (k, e) in edges.iter_mut().enumerate() {
        e.id = k;
    }

    let all: Vec<usize> = (0..edges.len()).collect();
    let nerve_rank = nerve_stats(&edges, centers.len(), &all, h.rank()).0;
    let quarter = ratio(1, 4);
    let two_g = h.rank();
    let pruned = if nerve_rank == two_g && !edges.is_empty() {
        prune_nerve(&edges, centers.len(), two_g)
    } else if two_g == 0 {
        Vec::new()
    } else {
        all.clone()
    };
    let (_, pruned_betti, _) = nerve_stats(&edges, centers.len(), &pruned, two_g);
    let pruned_length = &quarter * int(pruned.len() as i64);
    let pruned_length_bound = &quarter * int(centers.len() as i64 - 1 + two_g as i64);
    let image: BTreeSet<usize> = pruned.iter().flat_map(|&k| edges[k].path.iter().copied()).collect();
    let image_edges: Vec<usize> = image.into_iter().collect();
    let image_length = s.edges_length(&image_edges);
    let image_rank = super::capturing_test(s, &image_edges).rank;

    let ball_areas: Vec<f64> = centers.par_iter().map(|&c| BallSubcomplex::new(s, c, r0).area(s)).collect();
    let min_ball_area = ball_areas.iter().copied().fold(f64::INFINITY, f64::min);
    let r0f = rational_to_f64(r0);
    let ball_area_precondition = ball_areas.iter().all(|&a| a >= r0f * r0f / 4.0);
    let area = s.total_area();
    let packing_bound = 4096.0 * area;
    let max_phi_length = edges.iter().map(|e| e.distance.clone()).max().unwrap_or_else(|| int(0));
    let genus = s.genus();
    Ok(NerveReport {
        r0: r0.clone(),
        eps: eps.clone(),
        genus,
        area,
        packing_ok: centers.len() as f64 <= packing_bound,
        pruned_length_ok: pruned_length <= pruned_length_bound,
        phi_ok: max_phi_length <= quarter,
        maximal_packing,
        area_hypothesis: area <= (2.0 * genus as f64 - 1.0) / 4096.0,
        systole_hypothesis: systole.map(|sys| *sys >= ratio(1, 2)),
        centers,
        edges,
        nerve_rank,
        pruned,
        pruned_betti,
        pruned_length,
        pruned_length_bound,
        image_edges,
        image_length,
        image_rank,
        min_ball_area,
        ball_area_precondition,
        packing_bound,
        max_phi_length,
    })
}

/// Rank of the image, Betti number and component count of the nerve subgraph on `keep`.
fn nerve_stats(edges: &[NerveEdge], n: usize, keep: &[usize], rank: usize) -> (usize, usize, usize) {
    let mut adj = vec![Vec::new(); n];
    let mut touched = vec![false; n];
    for &k in keep {
        let (a, b) = edges[k].ends;
        adj[a].push((b, k, 1i64));
        adj[b].push((a, k, -1i64));
        touched[a] = true;
        touched[b] = true;
    }
    let mut potential: Vec<Option<Vec<i64>>> = vec![None; n];
    let mut tree = vec![false; edges.len()];
    let mut components = 0;
    for root in 0..n {
        if !touched[root] || potential[root].is_some() {
            continue;
        }
        components += 1;
        potential[root] = Some(vec![0; rank]);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(w, k, sign) in &adj[v] {
                if potential[w].is_none() {
                    tree[k] = true;
                    let pv = potential[v].as_ref().expect("visited");
                    potential[w] = Some(pv.iter().zip(&edges[k].class).map(|(a, c)| a + sign * c).collect());
                    queue.push_back(w);
                }
            }
        }
    }
    let mut span = Span::default();
    let mut betti = 0;
    for &k in keep {
        if tree[k] {
            continue;
        }
        betti += 1;
        if span.rank() == rank {
            continue;
        }
        let (a, b) = edges[k].ends;
        let (pa, pb) = (potential[a].as_ref().expect("touched"), potential[b].as_ref().expect("touched"));
        let class: Vec<i64> = pa.iter().zip(&edges[k].class).zip(pb).map(|((x, c), y)| x + c - y).collect();
        span.insert(&class);
    }
    (span.rank(), betti, components)
}

/// Drops nerve edges, highest id first, while the rest stays connected with full rank.
fn prune_nerve(edges: &[NerveEdge], n: usize, two_g: usize) -> Vec<usize> {
    let mut keep: Vec<usize> = (0..edges.len()).collect();
    for k in (0..edges.len()).rev() {
        let trial: Vec<usize> = keep.iter().copied().filter(|&x| x != k).collect();
        if trial.is_empty() {
            continue;
        }
        let (rank, _, components) = nerve_stats(edges, n, &trial, two_g);
        if rank == two_g && components == 1 {
            keep = trial;
        }
    }
    keep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{tetrahedron, torus7};

    #[test]
    fn eps_constraint() {
        let s = torus7();
        assert!(nerve_graph(&s, &ratio(1, 32), &ratio(1, 16), None).is_err());
        assert!(nerve_graph(&s, &ratio(1, 32), &ratio(1, 64), None).is_ok());
    }

    #[test]
    fn one_ball_covers_a_small_tetrahedron() {
        let s = tetrahedron().scaled(&ratio(1, 100)).unwrap();
        let r = nerve_graph(&s, &ratio(1, 32), &ratio(1, 64), None).unwrap();
        assert_eq!(r.centers, vec![0]);
        assert!(r.edges.is_empty());
        assert!(r.maximal_packing);
    }
}

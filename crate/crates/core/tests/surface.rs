use std::collections::{BTreeMap, BTreeSet};

use covergrowth::scalar::{int, ratio};
use covergrowth::surface::{
    capture_length, capturing_test, fine_torus, genus2, height, nerve_graph, octahedron, prune_to_iso, refine,
    subdivide, systole_at, systole_simple, tetrahedron, torus7, BallSubcomplex, CaptureMode, TriSurface,
};
use covergrowth::Rational;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Dense rank over the rationals by plain Gaussian elimination.
fn dense_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = &rows[r][c] / &pivot;
                for k in c..cols {
                    let d = &f * &rows[rank][k];
                    rows[r][k] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Oriented face boundaries as columns over the edges.
fn d2_columns(s: &TriSurface) -> Vec<Vec<i64>> {
    s.faces()
        .iter()
        .map(|&[a, b, c]| {
            let mut col = vec![0i64; s.edge_count()];
            for (u, w) in [(a, b), (b, c), (c, a)] {
                col[s.edge_id(u, w).unwrap()] += if u < w { 1 } else { -1 };
            }
            col
        })
        .collect()
}

fn matrix(columns: &[Vec<i64>], rows: usize) -> Vec<Vec<Rational>> {
    (0..rows).map(|r| columns.iter().map(|c| Rational::from_integer(c[r].into())).collect()).collect()
}

/// Fundamental cycles of a spanning forest of the subgraph, as edge chains.
fn cycle_basis(s: &TriSurface, edges: &[usize]) -> Vec<Vec<i64>> {
    let mut parent: BTreeMap<usize, Option<(usize, usize)>> = BTreeMap::new();
    let mut depth: BTreeMap<usize, usize> = BTreeMap::new();
    let mut adj: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for &e in edges {
        let [u, w] = s.edges()[e];
        adj.entry(u).or_default().push((w, e));
        adj.entry(w).or_default().push((u, e));
    }
    let mut tree = BTreeSet::new();
    for &root in adj.keys() {
        if parent.contains_key(&root) {
            continue;
        }
        parent.insert(root, None);
        depth.insert(root, 0);
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &(w, e) in &adj[&v] {
                if !parent.contains_key(&w) {
                    parent.insert(w, Some((v, e)));
                    depth.insert(w, depth[&v] + 1);
                    tree.insert(e);
                    stack.push(w);
                }
            }
        }
    }
    let mut out = Vec::new();
    for &e in edges {
        if tree.contains(&e) {
            continue;
        }
        let [u, w] = s.edges()[e];
        let mut chain = vec![0i64; s.edge_count()];
        chain[e] += 1;
        // walk u <- ... and w -> ... up to the meeting point
        let (mut a, mut b) = (w, u);
        while a != b {
            if depth[&a] >= depth[&b] {
                let (p, pe) = parent[&a].unwrap();
                chain[pe] += if a < p { 1 } else { -1 };
                a = p;
            } else {
                let (p, pe) = parent[&b].unwrap();
                chain[pe] += if p < b { 1 } else { -1 };
                b = p;
            }
        }
        out.push(chain);
    }
    out
}

/// Rank of the image of the subgraph's cycles in H1, from boundary matrices alone.
fn oracle_rank(s: &TriSurface, edges: &[usize]) -> usize {
    let d2 = d2_columns(s);
    let base = dense_rank(matrix(&d2, s.edge_count()));
    let mut all = d2;
    all.extend(cycle_basis(s, edges));
    dense_rank(matrix(&all, s.edge_count())) - base
}

fn union_of(loops: &[Vec<usize>]) -> Vec<usize> {
    let set: BTreeSet<usize> = loops.iter().flatten().copied().collect();
    set.into_iter().collect()
}

#[test]
fn boundary_of_boundary_and_first_homology() {
    for s in [tetrahedron(), octahedron(), torus7(), genus2(), subdivide(&torus7())] {
        let d2 = d2_columns(&s);
        for col in &d2 {
            let mut at_vertices = vec![0i64; s.vertex_count()];
            for (e, &c) in col.iter().enumerate() {
                let [u, w] = s.edges()[e];
                at_vertices[w] += c;
                at_vertices[u] -= c;
            }
            assert!(at_vertices.iter().all(|&x| x == 0));
        }
        let d1: Vec<Vec<i64>> = s
            .edges()
            .iter()
            .map(|&[u, w]| {
                let mut col = vec![0i64; s.vertex_count()];
                col[u] = -1;
                col[w] = 1;
                col
            })
            .collect();
        let r1 = dense_rank(matrix(&d1, s.vertex_count()));
        let r2 = dense_rank(matrix(&d2, s.edge_count()));
        assert_eq!(s.edge_count() - r1 - r2, 2 * s.genus());
        assert_eq!(s.homology().rank(), 2 * s.genus());
    }
}

#[test]
fn canonical_loops_capture_exactly() {
    let t = torus7();
    let h = t.homology();
    let pair = union_of(&[h.generator_edges(0), h.generator_edges(1)]);
    let test = capturing_test(&t, &pair);
    assert!(test.captures);
    assert_eq!(test.rank, 2);
    assert_eq!(oracle_rank(&t, &pair), 2);

    let s = genus2();
    let h = s.homology();
    let loops: Vec<Vec<usize>> = (0..4).map(|i| h.generator_edges(i)).collect();
    let all = union_of(&loops);
    assert_eq!(capturing_test(&s, &all).rank, 4);
    assert!(capturing_test(&s, &all).captures);
    for skip in 0..4 {
        let three: Vec<Vec<usize>> = loops.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, l)| l.clone()).collect();
        let sub = union_of(&three);
        let test = capturing_test(&s, &sub);
        assert!(!test.captures);
        assert_eq!(test.rank, 3);
        assert_eq!(oracle_rank(&s, &sub), 3);
    }
    // a tree captures nothing
    let tree: Vec<usize> = h.tree_parent().iter().flatten().map(|&(_, e)| e).collect();
    assert_eq!(capturing_test(&s, &tree).rank, 0);
}

#[test]
fn pruning_drops_a_null_homotopic_triangle() {
    let t = torus7();
    let h = t.homology();
    let pair = union_of(&[h.generator_edges(0), h.generator_edges(1)]);
    let pruned_pair = prune_to_iso(&t, &pair).unwrap();
    let face = (0..t.face_count()).find(|&f| t.face_edges(f).iter().any(|e| pruned_pair.contains(e))).unwrap();
    let mut with_face = pruned_pair.clone();
    with_face.extend(t.face_edges(face));
    with_face.sort_unstable();
    with_face.dedup();
    let pruned = prune_to_iso(&t, &with_face).unwrap();
    let test = capturing_test(&t, &pruned);
    assert!(test.captures);
    assert_eq!(test.betti, 2);
    assert_eq!(prune_to_iso(&t, &pruned).unwrap(), pruned);

    let s = genus2();
    let all: Vec<usize> = (0..s.edge_count()).collect();
    let pruned = prune_to_iso(&s, &all).unwrap();
    assert_eq!(capturing_test(&s, &pruned).betti, 4);
    assert_eq!(oracle_rank(&s, &pruned), 4);
}

/// Every simple cycle of the complete graph on the torus's vertices.
fn simple_cycles(s: &TriSurface) -> Vec<Vec<usize>> {
    let n = s.vertex_count();
    let mut out = Vec::new();
    fn extend(s: &TriSurface, start: usize, path: &mut Vec<usize>, edges: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        for &(w, e) in s.neighbors(last) {
            if w == start && path.len() >= 3 && path[1] < last {
                let mut cyc = edges.clone();
                cyc.push(e);
                out.push(cyc);
            } else if w > start && !path.contains(&w) {
                path.push(w);
                edges.push(e);
                extend(s, start, path, edges, out);
                path.pop();
                edges.pop();
            }
        }
    }
    for start in 0..n {
        extend(s, start, &mut vec![start], &mut Vec::new(), &mut out);
    }
    out
}

#[test]
fn torus_systole_by_enumeration() {
    let s = torus7();
    let cycles = simple_cycles(&s);
    assert_eq!(cycles.len(), 1172);
    let d2 = d2_columns(&s);
    let base = dense_rank(matrix(&d2, s.edge_count()));
    let shortest = cycles
        .iter()
        .filter(|c| {
            let mut all = d2.clone();
            all.extend(cycle_basis(&s, c));
            dense_rank(matrix(&all, s.edge_count())) > base
        })
        .map(|c| c.len())
        .min()
        .unwrap();
    assert_eq!(int(shortest as i64), systole_simple(&s).unwrap().length);
    assert_eq!(systole_simple(&s).unwrap().length, int(3));
}

#[test]
fn simple_systole_is_below_every_based_systole() {
    for s in [genus2(), subdivide(&torus7())] {
        let min = systole_simple(&s).unwrap();
        for x in 0..s.vertex_count() {
            let at = systole_at(&s, x).unwrap();
            assert!(min.length <= at.length);
            assert!(at.cycle_length <= at.length);
        }
    }
}

#[test]
fn exact_capture_matches_exhaustion() {
    let s = torus7();
    let exact = capture_length(&s, CaptureMode::Exact, None).unwrap();
    assert!(exact.certified_optimal);
    // unit edges: the smallest capturing edge set, by brute force over sizes
    let m = s.edge_count();
    let mut best = None;
    'outer: for k in 1..=6 {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            if capturing_test(&s, &idx).captures && oracle_rank(&s, &idx) == 2 {
                best = Some(k);
                break 'outer;
            }
            let mut i = k;
            while i > 0 && idx[i - 1] == m - k + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    assert_eq!(Some(exact.edges.len()), best);
    assert_eq!(exact.length, int(best.unwrap() as i64));
}

#[test]
fn height_is_bounded_by_distance_to_the_minimal_graph() {
    let s = subdivide(&torus7());
    let min = capture_length(&s, CaptureMode::Exact, None).unwrap();
    let on = min.vertices(&s);
    for x in 0..s.vertex_count() {
        let h = height(&s, x, &min).unwrap();
        let d = on.iter().map(|&v| s.distances(x)[v].clone()).min().unwrap();
        assert_eq!(h.dist_to_min, d);
        assert!(h.height <= d);
        assert!(h.height >= Rational::zero());
        if on.contains(&x) {
            assert!(h.height.is_zero());
        }
    }
}

#[test]
fn unit_ball_is_a_filtered_star() {
    for s in [torus7(), subdivide(&torus7())] {
        for x in [0, 3] {
            let ball = BallSubcomplex::new(&s, x, &int(1));
            let d = s.distances(x);
            let expected: Vec<usize> =
                (0..s.face_count()).filter(|&f| s.faces()[f].iter().all(|&v| d[v] <= Rational::one())).collect();
            assert_eq!(ball.faces, expected);
            let area: f64 = expected.iter().map(|&f| s.area(f)).sum();
            assert!((ball.area(&s) - area).abs() < 1e-12);
        }
    }
}

#[test]
fn nerve_invariants_against_all_pairs_distances() {
    let s = refine(&torus7().scaled(&ratio(1, 4)).unwrap(), 2);
    let r0 = ratio(1, 32);
    let eps = ratio(1, 64);
    let report = nerve_graph(&s, &r0, &eps, None).unwrap();
    let dist: Vec<Vec<Rational>> = report.centers.iter().map(|&c| s.distances(c)).collect();
    for (i, di) in dist.iter().enumerate() {
        for (j, &cj) in report.centers.iter().enumerate() {
            if i < j {
                assert!(di[cj] > &int(2) * &r0);
                let joined = report.edges.iter().any(|e| e.ends == (i, j));
                assert_eq!(joined, di[cj] <= int(4) * &r0 + int(2) * &eps);
            }
        }
    }
    for v in 0..s.vertex_count() {
        assert!(dist.iter().any(|d| d[v] <= &int(2) * &r0));
    }
    assert!(report.checks_pass());
    assert_eq!(report.pruned_betti, 2);
}

#[test]
fn fine_torus_nerve_captures() {
    let s = fine_torus();
    assert_eq!(s.vertex_count(), 448);
    let report = nerve_graph(&s, &ratio(1, 32), &ratio(1, 64), None).unwrap();
    assert_eq!(report.nerve_rank, 2);
    assert_eq!(report.image_rank, 2);
    assert!(report.pruned_length <= report.pruned_length_bound);
}

fn subset(m: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::btree_set(0..m, 0..=m).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn capture_rank_matches_boundary_oracle(edges in subset(21)) {
        let s = torus7();
        prop_assert_eq!(capturing_test(&s, &edges).rank, oracle_rank(&s, &edges));
    }

    #[test]
    fn capture_rank_matches_boundary_oracle_genus2(edges in subset(39)) {
        let s = genus2();
        prop_assert_eq!(capturing_test(&s, &edges).rank, oracle_rank(&s, &edges));
    }

    #[test]
    fn pruning_lands_on_betti_2g(extra in subset(39)) {
        let s = genus2();
        let h = s.homology();
        let mut edges = union_of(&(0..4).map(|i| h.generator_edges(i)).collect::<Vec<_>>());
        edges.extend(extra);
        edges.sort_unstable();
        edges.dedup();
        let test = capturing_test(&s, &edges);
        prop_assume!(test.components == 1);
        let pruned = prune_to_iso(&s, &edges).unwrap();
        let after = capturing_test(&s, &pruned);
        prop_assert!(after.captures);
        prop_assert_eq!(after.betti, 4);
    }

    #[test]
    fn filling_never_shrinks(k in 0i64..=12, x in 0usize..28) {
        let s = subdivide(&torus7());
        let b = BallSubcomplex::new(&s, x, &ratio(k, 4));
        let f = b.fill_to_bplus(&s);
        prop_assert!(f.area(&s) >= b.area(&s));
        prop_assert!(f.boundary_components <= b.boundary_components);
        prop_assert!(b.faces.iter().all(|&face| s.faces()[face].iter().all(|v| b.vertices.contains(v))));
    }
}

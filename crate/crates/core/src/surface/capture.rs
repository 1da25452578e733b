//! Short capturing graphs, `L(M,h)`, `L(M,x)` and the height `H″`.
//!
//! Greedy mode works in any genus: a shortest homology basis of tree loops,
//! joined by shortest paths and pruned. Exact mode handles the torus: a
//! minimal capturing graph there is a theta or figure-eight graph, i.e. three
//! paths from a lift of `a` to lifts `b + t_i` of `b` in the `Z²` cover with
//! `t_1, t_2, t_3` not collinear. Cover distances are computed by Dijkstra on
//! `(vertex, translation)` states and the best triple is found by enumeration.

use std::collections::{BTreeSet, BinaryHeap, HashMap};

use rayon::prelude::*;
use serde::Serialize;

use super::homology::{capturing_test, Span};
use super::systole::systole_at;
use super::{polyhedral_ball_area, BallSubcomplex, SurfaceError, TriSurface};
use crate::graph::MinItem;
use crate::scalar::{rational_to_f64, serialize_exact};
use crate::Rational;

/// Largest vertex count accepted by exact mode.
pub const EXACT_VERTEX_LIMIT: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaptureMode {
    Exact,
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaptureResult {
    pub mode: CaptureMode,
    pub through: Option<usize>,
    #[serde(serialize_with = "serialize_exact")]
    pub length: Rational,
    pub ticks: u64,
    pub edges: Vec<usize>,
    pub rank: usize,
    pub betti: usize,
    /// Optimal among all subgraphs of the 1-skeleton (exact mode only).
    pub certified_optimal: bool,
}

impl CaptureResult {
    pub fn vertices(&self, s: &TriSurface) -> BTreeSet<usize> {
        self.edges.iter().flat_map(|&e| s.edges()[e]).collect()
    }
}

fn finish(s: &TriSurface, mode: CaptureMode, through: Option<usize>, mut edges: Vec<usize>, optimal: bool) -> CaptureResult {
    edges.sort_unstable();
    edges.dedup();
    let test = capturing_test(s, &edges);
    let length = s.edges_length(&edges);
    let ticks = edges.iter().map(|&e| s.ticks(e)).sum();
    CaptureResult { mode, through, length, ticks, edges, rank: test.rank, betti: test.betti, certified_optimal: optimal }
}

/// Shortest capturing graph found by `mode`, optionally required to pass through `x`.
pub fn capture_length(s: &TriSurface, mode: CaptureMode, through: Option<usize>) -> Result<CaptureResult, SurfaceError> {
    if let Some(x) = through {
        if x >= s.vertex_count() {
            return Err(SurfaceError::Precondition(format!("vertex {x} out of range")));
        }
    }
    match mode {
        CaptureMode::Greedy => greedy_capture(s, through),
        CaptureMode::Exact => exact_capture(s, through),
    }
}

/// Shortest homology basis of tree loops, connected and pruned.
pub fn greedy_capture(s: &TriSurface, through: Option<usize>) -> Result<CaptureResult, SurfaceError> {
    let h = s.homology();
    let two_g = h.rank();
    if two_g == 0 {
        // a sphere is captured by any single vertex
        return Ok(finish(s, CaptureMode::Greedy, through, Vec::new(), false));
    }
    // per root, the loops that are independent among that root's shorter loops
    let per_root: Vec<Vec<(u64, usize, Vec<usize>, Vec<i64>)>> = (0..s.vertex_count())
        .into_par_iter()
        .map(|r| root_basis(s, r))
        .collect();
    let mut all: Vec<(u64, usize, Vec<usize>, Vec<i64>)> = per_root.into_iter().flatten().collect();
    all.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut span = Span::default();
    let mut edges: BTreeSet<usize> = BTreeSet::new();
    for (_, _, cycle, class) in all {
        if span.insert(&class) {
            edges.extend(cycle);
            if span.rank() == two_g {
                break;
            }
        }
    }
    let mut edges: Vec<usize> = edges.into_iter().collect();
    connect_components(s, &mut edges);
    if let Some(x) = through {
        attach_vertex(s, &mut edges, x);
    }
    let pruned = prune_keeping(s, &edges, through)?;
    Ok(finish(s, CaptureMode::Greedy, through, pruned, false))
}

/// Tree loops at `r` (as simple cycles) that extend the span of shorter ones.
fn root_basis(s: &TriSurface, r: usize) -> Vec<(u64, usize, Vec<usize>, Vec<i64>)> {
    let h = s.homology();
    let (dist, parent) = s.shortest_path_tree(r);
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
    let mut cands: Vec<(u64, usize)> = (0..s.edge_count())
        .filter(|&e| {
            let [u, w] = s.edges()[e];
            parent[u].map(|p| p.1) != Some(e) && parent[w].map(|p| p.1) != Some(e)
        })
        .map(|e| {
            let [u, w] = s.edges()[e];
            (dist[u] + s.ticks(e) + dist[w], e)
        })
        .collect();
    cands.sort_unstable();
    let mut span = Span::default();
    let mut out = Vec::new();
    for (ticks, e) in cands {
        let [u, w] = s.edges()[e];
        let step = h.edge_class(s, e, u);
        let class: Vec<i64> = potential[u].iter().zip(&step).zip(&potential[w]).map(|((a, b), c)| a + b - c).collect();
        if class.iter().all(|&c| c == 0) || !span.insert(&class) {
            continue;
        }
        let (mut a, mut b) = (u, w);
        let mut cycle = vec![e];
        while a != b {
            if depth[a] >= depth[b] {
                let (p, pe) = parent[a].expect("below the meeting point");
                cycle.push(pe);
                a = p;
            } else {
                let (p, pe) = parent[b].expect("below the meeting point");
                cycle.push(pe);
                b = p;
            }
        }
        let cycle_ticks = cycle.iter().map(|&c| s.ticks(c)).sum::<u64>().min(ticks);
        cycle.sort_unstable();
        out.push((cycle_ticks, r, cycle, class));
        if span.rank() == h.rank() {
            break;
        }
    }
    out
}

/// Joins the components of the subgraph by shortest paths, nearest first.
fn connect_components(s: &TriSurface, edges: &mut Vec<usize>) {
    loop {
        let g = s.subgraph(edges);
        let comps = g.components();
        if comps.len() <= 1 {
            return;
        }
        let first: Vec<usize> = comps[0].iter().map(|v| v.0 as usize).collect();
        let mut others = vec![false; s.vertex_count()];
        for c in &comps[1..] {
            for v in c {
                others[v.0 as usize] = true;
            }
        }
        let (dist, parent) = multi_source_tree(s, &first);
        let target = (0..s.vertex_count()).filter(|&v| others[v]).min_by_key(|&v| (dist[v], v)).expect("another component");
        let mut v = target;
        while let Some((p, e)) = parent[v] {
            edges.push(e);
            v = p;
        }
        edges.sort_unstable();
        edges.dedup();
    }
}

/// Adds a shortest path from `x` to the subgraph unless `x` is already on it.
fn attach_vertex(s: &TriSurface, edges: &mut Vec<usize>, x: usize) {
    let on: BTreeSet<usize> = edges.iter().flat_map(|&e| s.edges()[e]).collect();
    if on.contains(&x) || on.is_empty() {
        return;
    }
    let sources: Vec<usize> = on.into_iter().collect();
    let (_, parent) = multi_source_tree(s, &sources);
    let mut v = x;
    while let Some((p, e)) = parent[v] {
        edges.push(e);
        v = p;
    }
    edges.sort_unstable();
    edges.dedup();
}

fn multi_source_tree(s: &TriSurface, sources: &[usize]) -> (Vec<u64>, Vec<Option<(usize, usize)>>) {
    let mut dist = vec![u64::MAX; s.vertex_count()];
    let mut parent = vec![None; s.vertex_count()];
    let mut heap = BinaryHeap::new();
    for &v in sources {
        dist[v] = 0;
        heap.push(MinItem(0u64, v));
    }
    while let Some(MinItem(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(w, e) in s.neighbors(v) {
            let nd = d + s.ticks(e);
            if nd < dist[w] {
                dist[w] = nd;
                parent[w] = Some((v, e));
                heap.push(MinItem(nd, w));
            }
        }
    }
    (dist, parent)
}

/// Longest-first pruning that keeps the subgraph connected, capturing and through `keep`.
pub(crate) fn prune_keeping(s: &TriSurface, edges: &[usize], keep: Option<usize>) -> Result<Vec<usize>, SurfaceError> {
    let mut current: Vec<usize> = edges.to_vec();
    current.sort_unstable();
    current.dedup();
    let start = capturing_test(s, &current);
    if !start.captures || start.components > 1 {
        return Err(SurfaceError::Precondition(format!(
            "subgraph must be connected and capturing (rank {}, {} components)",
            start.rank, start.components
        )));
    }
    let mut order = current.clone();
    order.sort_by(|&a, &b| s.length(b).cmp(s.length(a)).then(b.cmp(&a)));
    for e in order {
        let trial: Vec<usize> = current.iter().copied().filter(|&x| x != e).collect();
        if trial.is_empty() {
            continue;
        }
        if let Some(x) = keep {
            if !trial.iter().any(|&t| s.edges()[t].contains(&x)) {
                continue;
            }
        }
        let t = capturing_test(s, &trial);
        if t.captures && t.components == 1 {
            current = trial;
        }
    }
    Ok(current)
}

type State = (usize, [i64; 2]);

struct CoverTree {
    dist: HashMap<State, u64>,
    /// Predecessor state and edge; seeds have none.
    pred: HashMap<State, (State, usize)>,
}

fn add(t: [i64; 2], step: &[i64]) -> [i64; 2] {
    [t[0] + step[0], t[1] + step[1]]
}

fn cover_dijkstra(s: &TriSurface, seeds: &[(State, u64)], limit: u64) -> CoverTree {
    let h = s.homology();
    let mut dist: HashMap<State, u64> = HashMap::new();
    let mut pred = HashMap::new();
    let mut heap = BinaryHeap::new();
    for &(st, d) in seeds {
        if d <= limit && dist.get(&st).is_none_or(|&old| d < old) {
            dist.insert(st, d);
            heap.push(MinItem(d, st));
        }
    }
    while let Some(MinItem(d, (v, t))) = heap.pop() {
        if d > dist[&(v, t)] {
            continue;
        }
        for &(w, e) in s.neighbors(v) {
            let nd = d + s.ticks(e);
            if nd > limit {
                continue;
            }
            let next = (w, add(t, &h.edge_class(s, e, v)));
            if dist.get(&next).is_none_or(|&old| nd < old) {
                dist.insert(next, nd);
                pred.insert(next, ((v, t), e));
                heap.push(MinItem(nd, next));
            }
        }
    }
    CoverTree { dist, pred }
}

impl CoverTree {
    /// Edges back to the seed, and the seed reached.
    fn path(&self, mut st: State) -> (Vec<usize>, State) {
        let mut out = Vec::new();
        while let Some(&(p, e)) = self.pred.get(&st) {
            out.push(e);
            st = p;
        }
        (out, st)
    }

    fn by_vertex(&self, n: usize) -> Vec<Vec<(u64, [i64; 2])>> {
        let mut lists = vec![Vec::new(); n];
        for (&(v, t), &d) in &self.dist {
            lists[v].push((d, t));
        }
        for l in &mut lists {
            l.sort_unstable();
        }
        lists
    }
}

fn cross(a: [i64; 2], b: [i64; 2], c: [i64; 2]) -> i64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Best triple: `first` may differ from the other two lists (through-point case).
fn best_triple(first: &[(u64, [i64; 2])], rest: &[(u64, [i64; 2])], bound: u64, symmetric: bool) -> Option<(u64, [[i64; 2]; 3])> {
    let mut best: Option<(u64, [[i64; 2]; 3])> = None;
    let mut limit = bound;
    for (i, &(d1, t1)) in first.iter().enumerate() {
        if d1 > limit {
            break;
        }
        let start_j = if symmetric { i + 1 } else { 0 };
        for j in start_j..rest.len() {
            let (d2, t2) = rest[j];
            if d1 + d2 > limit {
                break;
            }
            for &(d3, t3) in &rest[j + 1..] {
                let total = d1 + d2 + d3;
                if total > limit {
                    break;
                }
                if cross(t1, t2, t3) != 0 && best.is_none_or(|(b, _)| total < b) {
                    best = Some((total, [t1, t2, t3]));
                    limit = total;
                }
            }
        }
    }
    best
}

fn exact_capture(s: &TriSurface, through: Option<usize>) -> Result<CaptureResult, SurfaceError> {
    if s.genus() != 1 {
        return Err(SurfaceError::Refused(format!("exact capture handles genus 1 only, found genus {}", s.genus())));
    }
    if s.vertex_count() > EXACT_VERTEX_LIMIT {
        return Err(SurfaceError::Refused(format!(
            "exact capture is limited to {EXACT_VERTEX_LIMIT} vertices, found {}",
            s.vertex_count()
        )));
    }
    let greedy = greedy_capture(s, through)?;
    let bound = greedy.ticks;
    let n = s.vertex_count();
    let x_tree = through.map(|x| multi_source_tree(s, &[x]));
    let per_a: Vec<Option<(u64, Vec<usize>)>> = (0..n)
        .into_par_iter()
        .map(|a| {
            let base = cover_dijkstra(s, &[((a, [0, 0]), 0)], bound);
            let lists = base.by_vertex(n);
            let detour = x_tree.as_ref().map(|(xd, _)| {
                let seeds: Vec<(State, u64)> = base.dist.iter().map(|(&st, &d)| (st, d + xd[st.0])).collect();
                cover_dijkstra(s, &seeds, bound)
            });
            let detour_lists = detour.as_ref().map(|d| d.by_vertex(n));
            let mut best: Option<(u64, usize, [[i64; 2]; 3])> = None;
            for b in 0..n {
                let limit = best.map_or(bound, |(t, _, _)| t.saturating_sub(1));
                let found = match &detour_lists {
                    None => best_triple(&lists[b], &lists[b], limit, true),
                    Some(dl) => best_triple(&dl[b], &lists[b], limit, false),
                };
                if let Some((t, ts)) = found {
                    best = Some((t, b, ts));
                }
            }
            best.map(|(total, b, ts)| {
                let mut edges = Vec::new();
                let (p2, _) = base.path((b, ts[1]));
                let (p3, _) = base.path((b, ts[2]));
                edges.extend(p2);
                edges.extend(p3);
                match (&detour, &x_tree) {
                    (Some(dt), Some((_, xp))) => {
                        let (p1, seed) = dt.path((b, ts[0]));
                        edges.extend(p1);
                        edges.extend(base.path(seed).0);
                        let mut v = seed.0;
                        while let Some((p, e)) = xp[v] {
                            edges.push(e);
                            v = p;
                        }
                    }
                    _ => edges.extend(base.path((b, ts[0])).0),
                }
                (total, edges)
            })
        })
        .collect();
    let best = per_a.into_iter().enumerate().filter_map(|(a, r)| r.map(|(t, e)| (t, a, e))).min_by_key(|(t, a, _)| (*t, *a));
    let Some((total, _, edges)) = best else {
        return Err(SurfaceError::Internal("no capturing triple within the greedy bound".into()));
    };
    let result = finish(s, CaptureMode::Exact, through, edges, true);
    // the union of the three paths is capturing and can only be shorter than their sum
    if result.rank != 2 || result.ticks != total {
        return Err(SurfaceError::Internal(format!(
            "exact capture produced rank {} with {} ticks against the optimum {}",
            result.rank, result.ticks, total
        )));
    }
    if let Some(x) = through {
        if !result.vertices(s).contains(&x) {
            return Err(SurfaceError::Internal(format!("exact capture through {x} misses it")));
        }
    }
    Ok(result)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeightReport {
    pub x: usize,
    pub mode: CaptureMode,
    #[serde(serialize_with = "serialize_exact")]
    pub l_min: Rational,
    #[serde(serialize_with = "serialize_exact")]
    pub l_x: Rational,
    /// `H″(x) = L(M,x) - L(M,h)`.
    #[serde(serialize_with = "serialize_exact")]
    pub height: Rational,
    /// Distance from `x` to the minimal graph, an upper bound for `H″(x)`.
    #[serde(serialize_with = "serialize_exact")]
    pub dist_to_min: Rational,
    pub bound_holds: bool,
    pub edges_x: Vec<usize>,
}

/// `H″(x)` relative to an already computed minimal graph.
pub fn height(s: &TriSurface, x: usize, minimal: &CaptureResult) -> Result<HeightReport, SurfaceError> {
    let through = capture_length(s, minimal.mode, Some(x))?;
    let on: Vec<usize> = minimal.vertices(s).into_iter().collect();
    let dist = if on.is_empty() { 0 } else { multi_source_tree(s, &on).0[x] };
    let dist_to_min = s.to_rational(dist);
    let h2 = &through.length - &minimal.length;
    Ok(HeightReport {
        x,
        mode: minimal.mode,
        l_min: minimal.length.clone(),
        l_x: through.length.clone(),
        bound_holds: h2 <= dist_to_min,
        height: h2,
        dist_to_min,
        edges_x: through.edges,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prop65Status {
    Pass,
    Fail,
    /// `R` lies outside `H″(x) < R < sys(M,x)/2`.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prop65Point {
    pub x: usize,
    #[serde(serialize_with = "serialize_exact")]
    pub radius: Rational,
    #[serde(serialize_with = "serialize_exact")]
    pub height: Rational,
    #[serde(serialize_with = "serialize_exact")]
    pub systole_at: Rational,
    /// Certified inner estimate of the flat-metric ball area.
    pub area: f64,
    /// Area of the faces with all vertices within `R`.
    pub face_area: f64,
    /// `½ (R - H″)²`.
    pub bound: f64,
    pub margin: f64,
    pub status: Prop65Status,
}

/// Checks `area B(x,R) >= ½ (R - H″(x))²`. Without explicit radii, seven
/// equally spaced radii inside the window are used.
pub fn prop65_check(s: &TriSurface, h: &HeightReport, radii: Option<&[Rational]>) -> Result<Vec<Prop65Point>, SurfaceError> {
    let sys = systole_at(s, h.x)?.length;
    let half = &sys / Rational::from_integer(2.into());
    let radii: Vec<Rational> = match radii {
        Some(r) => r.to_vec(),
        None if h.height < half => (1..=7)
            .map(|k| &h.height + (&half - &h.height) * Rational::new(k.into(), 8.into()))
            .collect(),
        None => vec![h.height.clone()],
    };
    Ok(radii
        .into_par_iter()
        .map(|r| {
            let inside = h.height < r && r < half;
            let rf = rational_to_f64(&r);
            let area = polyhedral_ball_area(s, h.x, rf);
            let face_area = BallSubcomplex::new(s, h.x, &r).area(s);
            let gap = rational_to_f64(&(&r - &h.height));
            let bound = 0.5 * gap * gap;
            let margin = area - bound;
            let status = match (inside, margin >= 0.0) {
                (false, _) => Prop65Status::Inconclusive,
                (true, true) => Prop65Status::Pass,
                (true, false) => Prop65Status::Fail,
            };
            Prop65Point { x: h.x, radius: r, height: h.height.clone(), systole_at: sys.clone(), area, face_area, bound, margin, status }
        })
        .collect())
}

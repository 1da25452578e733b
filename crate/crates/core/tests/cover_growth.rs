use covergrowth::cover::{
    ball_length, expand_ball, hyperbolic_ball_area, trivalent_tree_ball, v_prime, BasePoint, GrowthProfile,
    DEFAULT_BUDGET,
};
use covergrowth::graph::{random_connected, trivalent_reference, MetricGraph, VertexId};
use covergrowth::scalar::{int, ratio};
use covergrowth::{Graph, Rational};
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

/// Sums `min(len, R - d)` over every non-backtracking walk, by plain recursion.
fn naive_ball(g: &Graph, v: VertexId, r: &Rational) -> Rational {
    // a directed traversal is (edge index, forward?)
    let edges: Vec<_> = g.edges().cloned().collect();
    fn walk(edges: &[covergrowth::graph::Edge<Rational>], at: VertexId, came: Option<(usize, bool)>, d: &Rational, r: &Rational) -> Rational {
        let mut total = Rational::zero();
        for (i, e) in edges.iter().enumerate() {
            for forward in [true, false] {
                let (from, to) = if forward { e.ends } else { (e.ends.1, e.ends.0) };
                if from != at || came == Some((i, !forward)) {
                    continue;
                }
                let remaining = r - d;
                total += if e.length < remaining { e.length.clone() } else { remaining };
                let next = d + &e.length;
                if &next < r {
                    total += walk(edges, to, Some((i, forward)), &next, r);
                }
            }
        }
        total
    }
    if r.is_zero() {
        return Rational::zero();
    }
    walk(&edges, v, None, &Rational::zero(), r)
}

fn small_graph() -> impl Strategy<Value = Graph> {
    (2usize..=4, any::<u64>()).prop_map(|(b, seed)| random_connected(b, &ratio(1, 2), &int(1), seed).unwrap())
}

fn radius() -> impl Strategy<Value = Rational> {
    (0i64..=48).prop_map(|k| ratio(k, 24))
}

#[test]
fn documented_examples() {
    let theta = trivalent_reference(2).unwrap();
    let r = ball_length(&theta, &VertexId(0).into(), &int(1), DEFAULT_BUDGET).unwrap();
    assert_eq!(r.length, int(3));
    assert!(!r.truncated);
    assert_eq!(naive_ball(&theta, VertexId(1), &int(1)), int(3));

    let eight: Graph = MetricGraph::from_parts([0], [(0, 0, 0, int(1)), (1, 0, 0, int(1))]).unwrap();
    assert_eq!(naive_ball(&eight, VertexId(0), &ratio(1, 2)), int(2));
    assert_eq!(ball_length(&eight, &VertexId(0).into(), &ratio(1, 2), DEFAULT_BUDGET).unwrap().length, int(2));

    assert_eq!(trivalent_tree_ball(&int(1)), int(3));
    assert_eq!(trivalent_tree_ball(&int(2)), naive_ball(&theta, VertexId(0), &int(2)));
    assert_eq!(trivalent_tree_ball(&ratio(3, 2)), naive_ball(&theta, VertexId(0), &ratio(3, 2)));
    assert_eq!(trivalent_tree_ball(&ratio(3, 2)), int(6));
}

#[test]
fn reference_graphs_share_the_tree_cover() {
    for b in 2..=6 {
        let g = trivalent_reference(b).unwrap();
        let p = GrowthProfile::new(&g, &VertexId(0).into(), &int(12), DEFAULT_BUDGET).unwrap();
        for k in 0..=48 {
            let r = ratio(k, 4);
            assert_eq!(p.report(&r).length, trivalent_tree_ball(&r), "b={b} R={r}");
        }
    }
}

#[test]
fn tree_ball_dominates_sinh() {
    for k in 0..=400 {
        let r = ratio(k, 20);
        let lhs = trivalent_tree_ball(&r).to_f64().unwrap();
        let rhs = (r.to_f64().unwrap() * std::f64::consts::LN_2).sinh();
        assert!(lhs >= rhs - 1e-9, "R={r}: {lhs} < {rhs}");
    }
}

#[test]
fn hyperbolic_area_is_increasing() {
    assert_eq!(hyperbolic_ball_area(0.0), 0.0);
    let vals: Vec<f64> = (0..=100).map(|i| hyperbolic_ball_area(i as f64 / 10.0)).collect();
    assert!(vals.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn deep_balls_stay_exact() {
    // 3 * 2^200 cover edges: only the lattice engine can answer this
    let theta = trivalent_reference(2).unwrap();
    let r = ball_length(&theta, &VertexId(0).into(), &int(200), DEFAULT_BUDGET).unwrap();
    assert!(!r.truncated);
    assert_eq!(r.length, trivalent_tree_ball(&int(200)));
    assert_eq!(r.node_count, u64::MAX);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn engines_match_naive_enumeration(g in small_graph(), r in radius()) {
        let v = g.vertices().next().unwrap();
        let oracle = naive_ball(&g, v, &r);
        let a = expand_ball(&g, &v.into(), &r, DEFAULT_BUDGET).unwrap();
        let b = GrowthProfile::new(&g, &v.into(), &r, DEFAULT_BUDGET).unwrap().report(&r);
        prop_assert_eq!(&a.length, &oracle);
        prop_assert_eq!(&b.length, &oracle);
        prop_assert_eq!(a.node_count, b.node_count);
        prop_assert_eq!(a.length.is_zero(), r.is_zero());
    }

    #[test]
    fn scaling_is_exact(g in small_graph(), r in radius(), mu in prop::sample::select(vec![ratio(1, 3), int(2), ratio(7, 5)])) {
        let v = g.vertices().next().unwrap();
        let scaled = g.scale(&mu).unwrap();
        let lhs = ball_length(&scaled, &v.into(), &(&r * &mu), DEFAULT_BUDGET).unwrap().length;
        let rhs = ball_length(&g, &v.into(), &r, DEFAULT_BUDGET).unwrap().length * &mu;
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn projection_below_half_girth(g in small_graph(), k in 0i64..=24) {
        let girth = g.girth().unwrap();
        let r = &girth / int(2) * ratio(k, 24);
        for v in g.vertices() {
            let cover = ball_length(&g, &v.into(), &r, DEFAULT_BUDGET).unwrap().length;
            prop_assert_eq!(cover, g.graph_ball_length(v, &r));
        }
    }

    #[test]
    fn nondecreasing_in_radius(g in small_graph()) {
        let v = g.vertices().next().unwrap();
        let p = GrowthProfile::new(&g, &v.into(), &int(3), DEFAULT_BUDGET).unwrap();
        let vals: Vec<Rational> = (0..=72).map(|k| p.report(&ratio(k, 24)).length).collect();
        prop_assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn base_spelling_does_not_matter(g in small_graph(), r in radius()) {
        let e = g.edges().next().unwrap().clone();
        let at_end = BasePoint::Interior { edge: e.id, offset: e.length.clone() };
        let at_start = BasePoint::Interior { edge: e.id, offset: Rational::zero() };
        let end = ball_length(&g, &e.ends.1.into(), &r, DEFAULT_BUDGET).unwrap().length;
        let start = ball_length(&g, &e.ends.0.into(), &r, DEFAULT_BUDGET).unwrap().length;
        prop_assert_eq!(ball_length(&g, &at_end, &r, DEFAULT_BUDGET).unwrap().length, end);
        prop_assert_eq!(ball_length(&g, &at_start, &r, DEFAULT_BUDGET).unwrap().length, start);
        let mid = BasePoint::Interior { edge: e.id, offset: &e.length / int(3) };
        let x = expand_ball(&g, &mid, &r, DEFAULT_BUDGET).unwrap().length;
        let y = ball_length(&g, &mid, &r, DEFAULT_BUDGET).unwrap().length;
        prop_assert_eq!(x, y);
    }

    #[test]
    fn refinement_only_raises_v_prime(g in small_graph()) {
        let r = int(1);
        let coarse = v_prime(&g, &r, 0, DEFAULT_BUDGET).unwrap();
        let fine = v_prime(&g, &r, 4, DEFAULT_BUDGET).unwrap();
        prop_assert!(fine.value >= coarse.value);
    }

    #[test]
    fn float_engine_tracks_exact(g in small_graph(), r in radius()) {
        let v = g.vertices().next().unwrap();
        let exact = ball_length(&g, &v.into(), &r, DEFAULT_BUDGET).unwrap().length.to_f64().unwrap();
        let gf = g.map_lengths(|l| l.to_f64().unwrap());
        let approx = ball_length(&gf, &v.into(), &r.to_f64().unwrap(), DEFAULT_BUDGET).unwrap().length;
        prop_assert!((exact - approx).abs() <= 1e-9 * exact.max(1.0));
    }
}

//! End-to-end acceptance run: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use covergrowth::cover::{ball_length, trivalent_tree_ball, BasePoint, DEFAULT_BUDGET};
use covergrowth::graph::{emit_graph, parse_graph, random_connected, reduce, trivalent_reference};
use covergrowth::scalar::{int, ratio, rational_to_f64};
use covergrowth::surface::{
    capture_length, capturing_test, coarea_identity, emit_surface, fine_genus2, fine_torus, genus2, height,
    lemma91_grid_check, lemma91_shrink, nerve_graph, parse_surface, prop65_check, prune_to_iso, subdivide,
    theorem1_lambda_search, torus7, CaptureMode, Prop65Status, TriSurface,
};
use covergrowth::witness::{build_prop31_subtree, find_witness, params_from_lambda, verify_certificate, CheckStatus};
use covergrowth::{Graph, Rational};
use num_traits::Zero;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(t: Instant, limit: Duration) -> bool {
    t.elapsed() <= limit
}

fn lambdas() -> Vec<Rational> {
    vec![ratio(1, 20), ratio(1, 10), ratio(1, 6), ratio(1, 4), ratio(3, 10)]
}

/// Trivalent tree ball by generations: `3 · 2^d` edges start at depth `d`.
fn tree_ball_by_generations(r: &Rational) -> Rational {
    let mut total = Rational::zero();
    let mut d = 0i64;
    while int(d) < *r {
        let part = (r - int(d)).min(int(1));
        total += int(3) * int(1 << d) * part;
        d += 1;
    }
    total
}

fn c1_tree_oracle() -> Outcome {
    let t = Instant::now();
    let g = trivalent_reference(2).unwrap();
    let mut bad = Vec::new();
    for k in 0..=40 {
        let r = ratio(k, 4);
        let got = ball_length(&g, &BasePoint::Vertex(g.vertices().next().unwrap()), &r, DEFAULT_BUDGET).unwrap();
        let closed = trivalent_tree_ball(&r);
        let sinh = (rational_to_f64(&r) * std::f64::consts::LN_2).sinh();
        if got.truncated || got.length != closed || closed != tree_ball_by_generations(&r) || rational_to_f64(&closed) < sinh - 1e-9 {
            bad.push(k);
        }
    }
    let fast = within(t, Duration::from_secs(10));
    outcome(bad.is_empty() && fast, format!("41 radii, mismatches at k = {bad:?}, {:.2?}", t.elapsed()))
}

/// Rescales `g` so that its length is exactly `λ (3b - 3)`.
fn fit(g: &Graph, lambda: &Rational) -> Graph {
    let target = lambda * int(3 * g.betti() as i64 - 3);
    g.scale(&(target / g.total_length())).unwrap()
}

fn c2_randomized_witness() -> Outcome {
    let t = Instant::now();
    let (mut failures, mut inconclusive, mut checked, mut errors) = (0, 0, 0, 0);
    for seed in 0..200u64 {
        let b = 2 + (seed % 7) as usize;
        let lambda = &lambdas()[(seed / 7 % 5) as usize];
        let g = fit(&random_connected(b, &ratio(1, 4), &int(2), seed).unwrap(), lambda);
        let Ok(cert) = find_witness(&g, lambda) else {
            errors += 1;
            continue;
        };
        // C' + c is 1 in the input's units and μ after rescaling; the grid covers both readings
        let rmax = int(4) * &cert.params.mu;
        let radii: Vec<Rational> = (0..=64).map(|k| &rmax * ratio(k, 64)).collect();
        let rep = verify_certificate(&g, &cert, &radii, DEFAULT_BUDGET).unwrap();
        for p in &rep.points {
            match p.status {
                CheckStatus::Pass => checked += 1,
                CheckStatus::Fail => failures += 1,
                CheckStatus::PassLowerBound | CheckStatus::Inconclusive => inconclusive += 1,
            }
        }
    }
    let fast = within(t, Duration::from_secs(300));
    outcome(
        failures == 0 && errors == 0 && fast,
        format!(
            "200 graphs, {checked} exact passes, {failures} failures, {inconclusive} truncated points, {errors} errors, {:.2?}",
            t.elapsed()
        ),
    )
}

fn c3_subtree() -> Outcome {
    let mut bad = 0;
    let mut pairs = 0;
    for seed in 0..50u64 {
        let raw = random_connected(2 + (seed % 4) as usize, &ratio(1, 4), &int(2), 1000 + seed).unwrap();
        let (core, _) = reduce(&raw).unwrap();
        let longest = core.edges().map(|e| e.length.clone()).max().unwrap();
        let g = core.scale(&longest.recip()).unwrap();
        let p = params_from_lambda(&lambdas()[(seed % 5) as usize]).unwrap();
        let tree = build_prop31_subtree(&g, &p.c, &p.c_prime, 4).unwrap();
        let upper = &p.c_prime + &p.c;
        let bracketed = tree.super_edges.iter().all(|e| e.length >= p.c_prime && e.length <= upper);
        let report = tree.check_bilipschitz(4);
        pairs += report.pairs;
        if !bracketed || !report.violations.is_empty() || tree.nodes.len() != 46 {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("50 instances, {pairs} node pairs to depth 4, {bad} bad instances"))
}

fn c4_reduction() -> Outcome {
    let mut bad = Vec::new();
    for seed in 0..50u64 {
        let g = random_connected(2 + (seed % 6) as usize, &ratio(1, 4), &int(2), 2000 + seed).unwrap();
        let (h, _) = reduce(&g).unwrap();
        let mut ok = h.betti() == g.betti() && h.total_length() <= g.total_length();
        for v in h.vertices() {
            for r in [ratio(1, 2), int(1), int(2)] {
                let a = ball_length(&h, &BasePoint::Vertex(v), &r, DEFAULT_BUDGET).unwrap();
                let b = ball_length(&g, &BasePoint::Vertex(v), &r, DEFAULT_BUDGET).unwrap();
                ok &= !a.truncated && !b.truncated && a.length <= b.length;
            }
        }
        if !ok {
            bad.push(seed);
        }
    }
    outcome(bad.is_empty(), format!("50 graphs, failing seeds {bad:?}"))
}

fn c5_scaling_and_projection() -> Outcome {
    let mut bad = Vec::new();
    for seed in 0..20u64 {
        let g = random_connected(2 + (seed % 5) as usize, &ratio(1, 4), &int(2), 3000 + seed).unwrap();
        let v = g.vertices().next().unwrap();
        let at = |g: &Graph, r: &Rational| ball_length(g, &BasePoint::Vertex(v), r, DEFAULT_BUDGET).unwrap();
        let mut ok = true;
        for mu in [ratio(1, 3), int(2), ratio(7, 5)] {
            let scaled = g.scale(&mu).unwrap();
            for r in [ratio(1, 3), int(1), ratio(5, 2)] {
                let (lhs, rhs) = (at(&scaled, &(&r * &mu)), at(&g, &r));
                ok &= !lhs.truncated && !rhs.truncated && lhs.length == &mu * &rhs.length;
            }
        }
        let half_girth = g.girth().unwrap() / int(2);
        for k in 0..=8 {
            let r = &half_girth * ratio(k, 8);
            ok &= at(&g, &r).length == g.graph_ball_length(v, &r);
        }
        if !ok {
            bad.push(seed);
        }
    }
    outcome(bad.is_empty(), format!("20 graphs, 3 scale factors, projection below girth/2, failing seeds {bad:?}"))
}

fn union_of(loops: &[Vec<usize>]) -> Vec<usize> {
    loops.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

fn c6_capturing() -> Outcome {
    let mut notes = Vec::new();
    let t = torus7();
    let h = t.homology();
    let pair = capturing_test(&t, &union_of(&[h.generator_edges(0), h.generator_edges(1)]));
    let mut ok = pair.captures && pair.rank == 2;
    notes.push(format!("torus pair rank {}", pair.rank));

    let s = genus2();
    let h = s.homology();
    let loops: Vec<Vec<usize>> = (0..4).map(|i| h.generator_edges(i)).collect();
    let all = capturing_test(&s, &union_of(&loops));
    ok &= all.captures && all.rank == 4;
    notes.push(format!("genus-2 set rank {}", all.rank));
    let mut dropped = Vec::new();
    for skip in 0..4 {
        let rest: Vec<Vec<usize>> = loops.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, l)| l.clone()).collect();
        let test = capturing_test(&s, &union_of(&rest));
        ok &= !test.captures && test.rank == 3;
        dropped.push(test.rank);
    }
    notes.push(format!("drop-one ranks {dropped:?}"));

    let mut bettis = Vec::new();
    for surf in [torus7(), subdivide(&torus7()), genus2(), subdivide(&genus2())] {
        let every: Vec<usize> = (0..surf.edge_count()).collect();
        let pruned = prune_to_iso(&surf, &every).unwrap();
        let test = capturing_test(&surf, &pruned);
        ok &= test.captures && test.betti == 2 * surf.genus() && test.components == 1;
        bettis.push(test.betti);
    }
    notes.push(format!("pruned Betti {bettis:?}"));
    outcome(ok, notes.join(", "))
}

fn nerve_line(name: &str, s: &TriSurface) -> (bool, String) {
    let rep = nerve_graph(s, &ratio(1, 32), &ratio(1, 64), None).unwrap();
    let packing = !rep.ball_area_precondition || rep.packing_ok;
    let two_g = 2 * s.genus();
    let ok = packing && rep.pruned_length_ok && rep.phi_ok && rep.maximal_packing && rep.image_rank == two_g;
    (
        ok,
        format!(
            "{name}: {} centers (bound {:.0}, precondition {}), pruned {}/{} <= {}, max phi {}, image rank {}",
            rep.centers.len(),
            rep.packing_bound,
            rep.ball_area_precondition,
            rep.pruned.len(),
            rep.edges.len(),
            covergrowth::scalar::format_rational(&rep.pruned_length_bound),
            covergrowth::scalar::format_rational(&rep.max_phi_length),
            rep.image_rank
        ),
    )
}

fn c7_nerve() -> Outcome {
    let t = Instant::now();
    let (a, da) = nerve_line("torus", &fine_torus());
    let (b, db) = nerve_line("genus 2", &fine_genus2());
    let fast = within(t, Duration::from_secs(120));
    outcome(a && b && fast, format!("{da}; {db}; {:.2?}", t.elapsed()))
}

fn c8_area_window() -> Outcome {
    let s = subdivide(&torus7());
    let minimal = capture_length(&s, CaptureMode::Exact, None).unwrap();
    let (mut pass, mut fail, mut outside) = (0, 0, 0);
    let mut worst = f64::INFINITY;
    for x in 0..s.vertex_count() {
        let h = height(&s, x, &minimal).unwrap();
        for p in prop65_check(&s, &h, None).unwrap() {
            match p.status {
                Prop65Status::Pass => pass += 1,
                Prop65Status::Fail => fail += 1,
                Prop65Status::Inconclusive => outside += 1,
            }
            if p.status != Prop65Status::Inconclusive {
                worst = worst.min(p.margin);
            }
        }
    }
    outcome(
        fail == 0 && pass > 0,
        format!("{} vertices, {pass} pass, {fail} fail, {outside} outside the window, worst margin {worst:.4}", s.vertex_count()),
    )
}

fn c9_coarea() -> Outcome {
    let worst = (1..=10)
        .map(|r| {
            let (integral, closed) = coarea_identity(r as f64, 20_000);
            (integral - closed).abs()
        })
        .fold(0.0, f64::max);
    outcome(worst <= 1e-9, format!("R = 1..10, worst gap {worst:.3e}"))
}

fn c10_shrink_and_lambda() -> Outcome {
    let radii: Vec<f64> = (1..=2000).map(|k| k as f64 / 100.0).collect();
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for a in [0.1, 0.25, 0.5, 1.0, 4.0] {
        let c = lemma91_shrink(a).unwrap();
        ok &= (c - f64::min(a, 1.0).sqrt()).abs() < 1e-15;
        let (pass, w) = lemma91_grid_check(a, c, &radii, 1e-9);
        ok &= pass;
        worst = worst.min(w);
    }
    let lambdas: Vec<f64> = (1..=128).map(|k| k as f64 / 2.0).collect();
    let grid: Vec<f64> = (4..=400).map(|k| k as f64 / 4.0).collect();
    let found = theorem1_lambda_search(&lambdas, &grid);
    let mut with_small = grid.clone();
    with_small.insert(0, 0.01);
    let refused = theorem1_lambda_search(&lambdas, &with_small);
    ok &= found.minimal.is_some() && refused.minimal.is_none();
    outcome(
        ok,
        format!(
            "shrink worst slack {worst:.3e}, minimal lambda {:?} (delta {:.3e}), with R = 0.01: {:?}",
            found.minimal,
            found.delta.unwrap_or(f64::NAN),
            refused.minimal
        ),
    )
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_covergrowth")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn sweep(path: &Path) -> Vec<(String, i32)> {
    let p = path.to_str().unwrap();
    let runs: Vec<Vec<&str>> = if p.ends_with(".g") {
        vec![
            vec!["graph", "validate", "--graph", p],
            vec!["graph", "growth", "--graph", p, "--rmax", "2"],
            vec!["graph", "entropy", "--graph", p, "--rmax", "2"],
            vec!["graph", "reduce", "--graph", p],
            vec!["graph", "witness", "--graph", p],
            vec!["graph", "verify", "--graph", p],
        ]
    } else {
        vec![
            vec!["surface", "validate", "--surface", p],
            vec!["surface", "systole", "--surface", p],
            vec!["surface", "capture", "--surface", p, "--through", "1"],
            vec!["surface", "nerve", "--surface", p],
            vec!["surface", "pipeline", "--surface", p],
            vec!["surface", "pipeline", "--surface", p, "--diagnostic", "--grid", "4"],
        ]
    };
    runs.into_iter().map(|args| (args[..2].join(" "), cli(&args).0)).collect()
}

fn c11_cli() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir()).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    let mut stable = 0;
    for f in &files {
        let text = std::fs::read_to_string(f).unwrap();
        let again = if f.extension().is_some_and(|e| e == "g") {
            emit_graph(&parse_graph::<Rational>(&text).unwrap())
        } else {
            emit_surface(&parse_surface(&text).unwrap())
        };
        if again == text {
            stable += 1;
        } else {
            ok = false;
        }
    }
    notes.push(format!("{stable}/{} corpus files byte-stable", files.len()));

    let theta_sixth = corpus_dir().join("theta_sixth.g");
    let det = ["witness", "--graph", theta_sixth.to_str().unwrap(), "--seed", "5", "--grid", "8"];
    let gen = ["gen", "--kind", "random", "--b", "5", "--seed", "42"];
    let deterministic = cli(&det) == cli(&det) && cli(&gen) == cli(&gen);
    ok &= deterministic;
    notes.push(format!("deterministic {deterministic}"));

    let theta = corpus_dir().join("theta.g");
    let forced = cli(&["witness", "--graph", theta.to_str().unwrap(), "--lambda", "1/20"]).0;
    ok &= forced == 1;
    notes.push(format!("forced violation exit {forced}"));

    let mut codes = [0usize; 3];
    let mut internal = Vec::new();
    for f in &files {
        for (cmd, code) in sweep(f) {
            match code {
                0 | 1 => codes[code as usize] += 1,
                _ => internal.push(format!("{} {cmd} -> {code}", f.file_name().unwrap().to_string_lossy())),
            }
        }
    }
    ok &= internal.is_empty();
    notes.push(format!("sweep: {} exit 0, {} exit 1, other {internal:?}", codes[0], codes[1]));
    outcome(ok, notes.join(", "))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("tree-ball oracle equality", c1_tree_oracle),
        ("randomized witness verification", c2_randomized_witness),
        ("subtree structure", c3_subtree),
        ("reduction monotonicity", c4_reduction),
        ("scaling and projection identities", c5_scaling_and_projection),
        ("homology capture", c6_capturing),
        ("nerve construction", c7_nerve),
        ("area window", c8_area_window),
        ("coarea closed form", c9_coarea),
        ("shrink factor and lambda search", c10_shrink_and_lambda),
        ("command line contract", c11_cli),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        failed += usize::from(!o.pass);
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

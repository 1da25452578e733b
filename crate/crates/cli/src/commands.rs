use std::path::Path;

use covergrowth::cover::{ball_length, entropy_estimate, hyperbolic_ball_area, trivalent_tree_ball, BasePoint};
use covergrowth::graph::{emit_graph, parse_graph, random_connected, reduce as reduce_graph, trivalent_reference, validate, GraphKind, VertexId};
use covergrowth::scalar::{int, rational_to_f64};
use covergrowth::surface::{
    capture_length, emit_surface, fine_genus2, fine_torus, genus2, height, nerve_graph, octahedron, parse_surface,
    prop65_check, subdivide, systole_at, systole_simple, tetrahedron, theorem9_pipeline, torus7, CaptureMode,
    PipelineOptions, Prop65Status, TriSurface, EXACT_VERTEX_LIMIT,
};
use covergrowth::witness::{build_prop31_subtree, find_witness, verify_certificate, CheckStatus};
use covergrowth::{Graph, Rational};
use serde_json::json;

use crate::args::{
    CaptureArgs, CurvesArgs, GenArgs, GraphInput, GrowthArgs, Kind, Mode, NerveArgs, PipelineArgs, SurfaceInput,
    SystoleArgs, WitnessArgs,
};
use crate::report::{approx, exact, exact_json, float, to_value, Report, RunConfig, Table};
use crate::{rational_arg, read_input, CliError};

/// Depth of the subtree whose pairwise distances `graph verify` checks.
const SUBTREE_CHECK_DEPTH: usize = 4;

fn load_graph(config: &mut RunConfig, path: &Path) -> Result<Graph, CliError> {
    config.inputs.push(path.display().to_string());
    let text = read_input(path)?;
    Ok(parse_graph::<Rational>(&text)?)
}

fn load_surface(config: &mut RunConfig, path: &Path) -> Result<TriSurface, CliError> {
    config.inputs.push(path.display().to_string());
    let text = read_input(path)?;
    Ok(parse_surface(&text)?)
}

fn radius_grid(name: &str, rmax: &str, grid: usize, from: usize) -> Result<Vec<Rational>, CliError> {
    let r = rational_arg(name, rmax)?;
    if r < int(0) {
        return Err(CliError::Precondition(format!("--{name} must be nonnegative")));
    }
    if grid == 0 {
        return Err(CliError::Precondition("--grid must be at least 1".into()));
    }
    let n = Rational::from_integer((grid as i64).into());
    Ok((from..=grid).map(|k| &r * Rational::from_integer((k as i64).into()) / &n).collect())
}

fn center(g: &Graph, vertex: Option<u32>) -> Result<VertexId, CliError> {
    match vertex {
        Some(v) if g.has_vertex(VertexId(v)) => Ok(VertexId(v)),
        Some(v) => Err(CliError::Precondition(format!("vertex {v} is not in the graph"))),
        None => g.vertices().next().ok_or_else(|| CliError::Precondition("graph has no vertices".into())),
    }
}

fn graph_stats(g: &Graph) -> serde_json::Value {
    json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "betti": g.betti(),
        "total_length": exact_json(&g.total_length()),
    })
}

pub fn graph_validate(config: &mut RunConfig, a: &GraphInput) -> Result<Report, CliError> {
    config.command = "graph validate".into();
    let g = load_graph(config, &a.graph)?;
    let diag = validate(&g);
    let summary = json!({
        "valid": diag.issues.is_empty(),
        "diagnostics": to_value(&diag),
        "total_length": exact_json(&g.total_length()),
        "girth": g.girth().map(|x| exact_json(&x)),
    });
    Ok(Report { summary, ..Report::default() })
}

pub fn growth(config: &mut RunConfig, a: &GrowthArgs) -> Result<Report, CliError> {
    config.command = "graph growth".into();
    config.rmax = Some(a.rmax.clone());
    config.grid = Some(a.grid);
    let g = load_graph(config, &a.graph)?;
    let radii = radius_grid("rmax", &a.rmax, a.grid, 0)?;
    let v = center(&g, a.vertex)?;
    let mut table = Table::new("growth", &["radius", "radius_approx", "length", "length_approx", "truncated", "node_count"]);
    let mut truncated = 0;
    for r in &radii {
        let rep = ball_length(&g, &BasePoint::Vertex(v), r, config.budget)?;
        truncated += usize::from(rep.truncated);
        table.push(vec![
            exact(r),
            approx(r),
            exact(&rep.length),
            approx(&rep.length),
            rep.truncated.to_string(),
            rep.node_count.to_string(),
        ]);
    }
    let summary = json!({
        "graph": graph_stats(&g),
        "center": v.0,
        "rows": radii.len(),
        "truncated_rows": truncated,
    });
    Ok(Report { summary, tables: vec![table], ..Report::default() })
}

pub fn entropy(config: &mut RunConfig, a: &GrowthArgs) -> Result<Report, CliError> {
    config.command = "graph entropy".into();
    config.rmax = Some(a.rmax.clone());
    config.grid = Some(a.grid);
    let g = load_graph(config, &a.graph)?;
    let radii = radius_grid("rmax", &a.rmax, a.grid, 1)?;
    let v = center(&g, a.vertex)?;
    let points = entropy_estimate(&g, v, &radii, config.budget)?;
    let mut table = Table::new("entropy", &["radius", "ln_length", "estimate", "truncated"]);
    for p in &points {
        table.push(vec![float(p.radius), float(p.ln_length), float(p.estimate), p.truncated.to_string()]);
    }
    let summary = json!({
        "graph": graph_stats(&g),
        "center": v.0,
        "last_estimate": points.last().map(|p| p.estimate),
        "truncated_rows": points.iter().filter(|p| p.truncated).count(),
    });
    Ok(Report { summary, tables: vec![table], ..Report::default() })
}

pub fn reduce(config: &mut RunConfig, a: &GraphInput) -> Result<Report, CliError> {
    config.command = "graph reduce".into();
    let g = load_graph(config, &a.graph)?;
    let (h, trace) = reduce_graph(&g)?;
    let text = emit_graph(&h);
    let summary = json!({
        "original": graph_stats(&g),
        "reduced": graph_stats(&h),
        "trace": to_value(&trace),
    });
    Ok(Report { summary, files: vec![("reduced.g".into(), text)], ..Report::default() })
}

pub fn witness(config: &mut RunConfig, a: &WitnessArgs, strict: bool) -> Result<Report, CliError> {
    config.command = if strict { "graph verify" } else { "graph witness" }.into();
    config.lambda = Some(a.lambda.clone());
    // C' + c is the unit length of the input once c = 3λ
    let rmax = a.rmax.clone().unwrap_or_else(|| "4".into());
    config.rmax = Some(rmax.clone());
    config.grid = Some(a.grid);
    let g = load_graph(config, &a.graph)?;
    let lambda = rational_arg("lambda", &a.lambda)?;
    let radii = radius_grid("rmax", &rmax, a.grid, 0)?;
    let cert = find_witness(&g, &lambda)?;
    let rep = verify_certificate(&g, &cert, &radii, config.budget)?;
    let mut table = Table::new(
        "verification",
        &["radius", "radius_approx", "ball", "ball_approx", "bound", "bound_approx", "margin", "truncated", "status"],
    );
    for p in &rep.points {
        let status = match p.status {
            CheckStatus::Pass => "pass",
            CheckStatus::PassLowerBound => "pass-lower-bound",
            CheckStatus::Fail => "fail",
            CheckStatus::Inconclusive => "inconclusive",
        };
        table.push(vec![
            exact(&p.radius),
            approx(&p.radius),
            exact(&p.ball),
            approx(&p.ball),
            exact(&p.bound),
            approx(&p.bound),
            exact(&p.margin),
            p.truncated.to_string(),
            status.into(),
        ]);
    }
    let mut violation = (rep.failures > 0).then(|| format!("{} grid radii fall below the certified growth", rep.failures));
    let mut summary = json!({
        "graph": graph_stats(&g),
        "certificate": to_value(&cert),
        "verification": {
            "passed": rep.passed(),
            "failures": rep.failures,
            "inconclusive": rep.inconclusive,
        },
    });
    if strict {
        let p = &cert.params;
        let tree = build_prop31_subtree(&cert.core, &p.c, &p.c_prime, SUBTREE_CHECK_DEPTH)?;
        let upper = &p.c_prime + &p.c;
        let bracketed = tree.super_edges.iter().all(|e| e.length >= p.c_prime && e.length <= upper);
        let bl = tree.check_bilipschitz(SUBTREE_CHECK_DEPTH);
        summary["subtree"] = json!({
            "depth": SUBTREE_CHECK_DEPTH,
            "nodes": tree.nodes.len(),
            "super_edges_bracketed": bracketed,
            "pairs": bl.pairs,
            "violations": bl.violations.len(),
        });
        if violation.is_none() && (!bracketed || !bl.violations.is_empty()) {
            violation = Some("subtree distances leave [C' k, (C' + c) k]".into());
        }
    }
    Ok(Report { summary, tables: vec![table], violation, ..Report::default() })
}

fn surface_stats(s: &TriSurface) -> serde_json::Value {
    json!({
        "vertices": s.vertex_count(),
        "edges": s.edge_count(),
        "faces": s.face_count(),
        "euler_characteristic": s.euler_characteristic(),
        "genus": s.genus(),
        "area": s.total_area(),
        "total_length": exact_json(&s.total_length()),
        "lattice_unit": exact_json(s.unit()),
    })
}

fn edge_table(s: &TriSurface, name: &str, edges: &[usize]) -> Table {
    let mut t = Table::new(name, &["edge", "u", "w", "length"]);
    for &e in edges {
        let [u, w] = s.edges()[e];
        t.push(vec![e.to_string(), u.to_string(), w.to_string(), exact(s.length(e))]);
    }
    t
}

pub fn surface_validate(config: &mut RunConfig, a: &SurfaceInput) -> Result<Report, CliError> {
    config.command = "surface validate".into();
    let s = load_surface(config, &a.surface)?;
    let mut summary = json!({ "surface": surface_stats(&s) });
    if s.genus() > 0 {
        let sys = systole_simple(&s)?;
        summary["systole"] = exact_json(&sys.length);
        summary["systole_assumes_simple"] = json!(sys.assumes_simple);
    }
    Ok(Report { summary, ..Report::default() })
}

pub fn systole(config: &mut RunConfig, a: &SystoleArgs) -> Result<Report, CliError> {
    config.command = "surface systole".into();
    let s = load_surface(config, &a.surface)?;
    let sys = match a.vertex {
        Some(x) => systole_at(&s, x)?,
        None => systole_simple(&s)?,
    };
    let table = edge_table(&s, "systole", &sys.cycle_edges);
    let summary = json!({ "surface": surface_stats(&s), "systole": to_value(&sys) });
    Ok(Report { summary, tables: vec![table], ..Report::default() })
}

fn default_mode(s: &TriSurface, mode: Option<Mode>) -> CaptureMode {
    match mode {
        Some(Mode::Exact) => CaptureMode::Exact,
        Some(Mode::Greedy) => CaptureMode::Greedy,
        None if s.genus() == 1 && s.vertex_count() <= EXACT_VERTEX_LIMIT => CaptureMode::Exact,
        None => CaptureMode::Greedy,
    }
}

pub fn capture(config: &mut RunConfig, a: &CaptureArgs) -> Result<Report, CliError> {
    config.command = "surface capture".into();
    let s = load_surface(config, &a.surface)?;
    let mode = default_mode(&s, a.mode);
    let minimal = capture_length(&s, mode, None)?;
    let mut tables = vec![edge_table(&s, "capture", &minimal.edges)];
    let mut summary = json!({ "surface": surface_stats(&s), "capture": to_value(&minimal) });
    if let Some(x) = a.through {
        let h = height(&s, x, &minimal)?;
        let points = prop65_check(&s, &h, None)?;
        let mut t = Table::new(
            "area_window",
            &["x", "radius", "radius_approx", "height", "systole_at", "area", "face_area", "bound", "margin", "status"],
        );
        for p in &points {
            let status = match p.status {
                Prop65Status::Pass => "pass",
                Prop65Status::Fail => "fail",
                Prop65Status::Inconclusive => "inconclusive",
            };
            t.push(vec![
                p.x.to_string(),
                exact(&p.radius),
                approx(&p.radius),
                exact(&p.height),
                exact(&p.systole_at),
                float(p.area),
                float(p.face_area),
                float(p.bound),
                float(p.margin),
                status.into(),
            ]);
        }
        tables.push(t);
        summary["height"] = to_value(&h);
        summary["area_window"] = json!({
            "points": points.len(),
            "failures": points.iter().filter(|p| p.status == Prop65Status::Fail).count(),
            "worst_margin": points.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min),
        });
    }
    Ok(Report { summary, tables, ..Report::default() })
}

pub fn nerve(config: &mut RunConfig, a: &NerveArgs) -> Result<Report, CliError> {
    config.command = "surface nerve".into();
    config.r0 = Some(a.r0.clone());
    config.eps = Some(a.eps.clone());
    let s = load_surface(config, &a.surface)?;
    let r0 = rational_arg("r0", &a.r0)?;
    let eps = rational_arg("eps", &a.eps)?;
    let sys = if s.genus() > 0 { Some(systole_simple(&s)?.length) } else { None };
    let rep = nerve_graph(&s, &r0, &eps, sys.as_ref())?;
    let pruned: std::collections::BTreeSet<usize> = rep.pruned.iter().copied().collect();
    let mut table = Table::new("nerve_edges", &["id", "a", "b", "distance", "path_edges", "pruned_keeps"]);
    for e in &rep.edges {
        table.push(vec![
            e.id.to_string(),
            rep.centers[e.ends.0].to_string(),
            rep.centers[e.ends.1].to_string(),
            exact(&e.distance),
            e.path.len().to_string(),
            pruned.contains(&e.id).to_string(),
        ]);
    }
    let mut value = to_value(&rep);
    if let Some(obj) = value.as_object_mut() {
        obj.remove("edges");
        obj.insert("edge_count".into(), json!(rep.edges.len()));
        obj.insert("checks_pass".into(), json!(rep.checks_pass()));
    }
    let violation = (!rep.checks_pass()).then(|| "packing, pruned length, non-expansion or maximality check failed".to_string());
    Ok(Report { summary: json!({ "surface": surface_stats(&s), "nerve": value }), tables: vec![table], violation, ..Report::default() })
}

pub fn pipeline(config: &mut RunConfig, a: &PipelineArgs) -> Result<Report, CliError> {
    config.command = "surface pipeline".into();
    config.r0 = Some(a.r0.clone());
    config.eps = Some(a.eps.clone());
    config.grid = Some(a.grid);
    let s = load_surface(config, &a.surface)?;
    if a.grid == 0 {
        return Err(CliError::Precondition("--grid must be at least 1".into()));
    }
    let g = s.genus();
    if !a.diagnostic {
        let bound = (g as f64 - 1.0) / 2048.0;
        if s.total_area() > bound {
            return Err(CliError::Precondition(format!(
                "area {} exceeds (g - 1)/2048 = {bound}; pass --diagnostic to run anyway",
                s.total_area()
            )));
        }
        let sys = systole_simple(&s)?.length;
        if sys < Rational::new(1.into(), 2.into()) {
            return Err(CliError::Precondition(format!(
                "systole {} is below 1/2; pass --diagnostic to run anyway",
                rational_to_f64(&sys)
            )));
        }
    }
    let opts = PipelineOptions {
        r0: rational_arg("r0", &a.r0)?,
        eps: rational_arg("eps", &a.eps)?,
        grid: a.grid,
        budget: config.budget,
        extend: a.extend,
    };
    let rep = theorem9_pipeline(&s, &opts)?;
    let mut table = Table::new(
        "radii",
        &[
            "radius",
            "radius_approx",
            "boundary_length",
            "graph_in_ball",
            "graph_ball",
            "cover_ball",
            "tree_bound",
            "boundary_dominates",
            "graph_dominates",
            "projection_exact",
            "tree_dominates",
            "face_area",
            "polyhedral_area",
            "coarea_area",
            "closed_form",
            "coarea_margin",
        ],
    );
    for r in &rep.radii {
        table.push(vec![
            exact(&r.radius),
            approx(&r.radius),
            exact(&r.boundary_length),
            exact(&r.graph_in_ball),
            exact(&r.graph_ball),
            exact(&r.cover_ball),
            exact(&r.tree_bound),
            r.boundary_dominates.to_string(),
            r.graph_dominates.to_string(),
            r.projection_exact.map_or_else(String::new, |b| b.to_string()),
            r.tree_dominates.to_string(),
            float(r.face_area),
            float(r.polyhedral_area),
            float(r.coarea_area),
            float(r.closed_form),
            float(r.coarea_margin),
        ]);
    }
    let failures = rep.failures();
    let mut value = to_value(&rep);
    if let Some(obj) = value.as_object_mut() {
        obj.remove("radii");
        obj.insert("failures".into(), json!(failures));
    }
    let violation = (!rep.diagnostic && failures > 0).then(|| format!("{failures} radius checks failed"));
    Ok(Report { summary: json!({ "surface": surface_stats(&s), "pipeline": value }), tables: vec![table], violation, ..Report::default() })
}

pub fn curves(config: &mut RunConfig, a: &CurvesArgs) -> Result<Report, CliError> {
    config.command = "ref curves".into();
    config.rmax = Some(a.rmax.clone());
    let rmax = rational_arg("rmax", &a.rmax)?;
    let grid = a.grid.unwrap_or_else(|| {
        let steps = (rmax.clone() * int(4)).ceil().to_integer();
        steps.to_string().parse::<usize>().unwrap_or(1).max(1)
    });
    config.grid = Some(grid);
    let radii = radius_grid("rmax", &a.rmax, grid, 0)?;
    let mut table = Table::new(
        "curves",
        &["radius", "radius_approx", "trivalent_tree_ball", "trivalent_tree_ball_approx", "hyperbolic_ball_area"],
    );
    for r in &radii {
        let tree = trivalent_tree_ball(r);
        table.push(vec![exact(r), approx(r), exact(&tree), approx(&tree), float(hyperbolic_ball_area(rational_to_f64(r)))]);
    }
    Ok(Report { summary: json!({ "rows": radii.len() }), tables: vec![table], ..Report::default() })
}

pub fn gen(config: &mut RunConfig, a: &GenArgs) -> Result<Report, CliError> {
    config.command = "gen".into();
    let graph = |g: Graph, name: &str| -> Report {
        let summary = json!({ "kind": name, "graph": graph_stats(&g) });
        Report { summary, files: vec![(format!("{name}.g"), emit_graph(&g))], ..Report::default() }
    };
    let surface = |s: TriSurface, name: &str| -> Report {
        let summary = json!({ "kind": name, "surface": surface_stats(&s) });
        Report { summary, files: vec![(format!("{name}.surf"), emit_surface(&s))], ..Report::default() }
    };
    Ok(match a.kind {
        Kind::Theta => graph(covergrowth::graph::generate(&GraphKind::Theta, config.seed)?, "theta"),
        Kind::FigureEight => graph(covergrowth::graph::generate(&GraphKind::FigureEight, config.seed)?, "figure_eight"),
        Kind::Trivalent => graph(trivalent_reference(a.b)?, &format!("trivalent_b{}", a.b)),
        Kind::Random => {
            let (min, max) = (rational_arg("min", &a.min)?, rational_arg("max", &a.max)?);
            graph(random_connected(a.b, &min, &max, config.seed)?, &format!("random_b{}_seed{}", a.b, config.seed))
        }
        Kind::Tetrahedron => surface(tetrahedron(), "tetrahedron"),
        Kind::Octahedron => surface(octahedron(), "octahedron"),
        Kind::Torus7 => surface(torus7(), "torus7"),
        Kind::SubdividedTorus => surface(subdivide(&torus7()), "subdivided_torus"),
        Kind::Genus2 => surface(genus2(), "genus2"),
        Kind::FineTorus => surface(fine_torus(), "fine_torus"),
        Kind::FineGenus2 => surface(fine_genus2(), "fine_genus2"),
    })
}

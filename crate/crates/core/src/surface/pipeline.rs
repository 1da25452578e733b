//! End-to-end chain on a surface: short capturing graph, witness vertex,
//! boundary-length and coarea comparisons, plus the analytic side checks.

use std::collections::BTreeSet;
use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use super::{
    greedy_capture, nerve_graph, polyhedral_ball_area, prune_to_iso, systole_simple, BallSubcomplex, SurfaceError,
    TriSurface,
};
use crate::cover::{ball_length, hyperbolic_ball_area, ln_hyperbolic_ball_area, trivalent_tree_ball, DEFAULT_BUDGET};
use crate::scalar::{format_rational, int, ratio, rational_to_f64, serialize_exact};
use crate::witness::{find_witness, WitnessError};
use crate::Rational;

/// `½ ∫₀ᴿ sinh(r ln 2) dr` by composite Simpson with `n` (even) panels, and
/// the closed form `(1/(4π ln 2)) V(R ln 2)`.
pub fn coarea_identity(radius: f64, n: usize) -> (f64, f64) {
    let n = n.max(2) & !1;
    let f = |r: f64| 0.5 * (r * LN_2).sinh();
    let h = radius / n as f64;
    let mut sum = f(0.0) + f(radius);
    for k in 1..n {
        sum += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    let integral = sum * h / 3.0;
    let closed = hyperbolic_ball_area(radius * LN_2) / (4.0 * PI * LN_2);
    (integral, closed)
}

/// Shrink factor `c` with `a V(R) >= V(cR)` for all `R > 0`.
pub fn lemma91_shrink(a: f64) -> Result<f64, SurfaceError> {
    if a.is_nan() || a <= 0.0 || !a.is_finite() {
        return Err(SurfaceError::Precondition(format!("area ratio must be positive and finite, got {a}")));
    }
    Ok(a.min(1.0).sqrt())
}

/// Worst relative slack of `a V(R) >= V(cR)` over the radii; the check
/// passes when the slack is at least `-tol`.
pub fn lemma91_grid_check(a: f64, c: f64, radii: &[f64], tol: f64) -> (bool, f64) {
    let worst = radii
        .iter()
        .map(|&r| {
            let rhs = hyperbolic_ball_area(c * r);
            (a * hyperbolic_ball_area(r) - rhs) / rhs.max(1.0)
        })
        .fold(f64::INFINITY, f64::min);
    (worst >= -tol, worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaResult {
    pub lambda: f64,
    pub passes: bool,
    /// Smallest `ln LHS - ln RHS` over the radius grid.
    pub worst_log_margin: f64,
    pub worst_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaSearch {
    pub results: Vec<LambdaResult>,
    /// Smallest grid `λ` from which every larger grid value passes as well.
    pub minimal: Option<f64>,
    /// `δ = 1/(2^13 π λ²)` for the minimal `λ`.
    pub delta: Option<f64>,
}

/// Scans `λ` for `(1/(4πλ² ln 2)) V(λ R ln 2) >= V(R)` on every grid radius,
/// comparing logarithms so large radii do not overflow.
pub fn theorem1_lambda_search(lambdas: &[f64], radii: &[f64]) -> LambdaSearch {
    let results: Vec<LambdaResult> = lambdas
        .par_iter()
        .map(|&lambda| {
            let (worst_log_margin, worst_radius) = radii
                .iter()
                .map(|&r| {
                    let lhs = ln_hyperbolic_ball_area(lambda * r * LN_2) - (4.0 * PI * lambda * lambda * LN_2).ln();
                    (lhs - ln_hyperbolic_ball_area(r), r)
                })
                .fold((f64::INFINITY, f64::NAN), |acc, x| if x.0 < acc.0 { x } else { acc });
            LambdaResult { lambda, passes: worst_log_margin >= 0.0, worst_log_margin, worst_radius }
        })
        .collect();
    // every larger grid value is re-verified, never assumed
    let mut minimal = None;
    for r in results.iter().rev() {
        if r.passes {
            minimal = Some(r.lambda);
        } else {
            break;
        }
    }
    let delta = minimal.map(|l| 1.0 / (8192.0 * PI * l * l));
    LambdaSearch { results, minimal, delta }
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub r0: Rational,
    pub eps: Rational,
    /// Number of radii in `(0, sys/2]`.
    pub grid: usize,
    pub budget: usize,
    /// Extra radii beyond `sys/2` for the coarea comparison, as multiples of `sys/2`.
    pub extend: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { r0: ratio(1, 32), eps: ratio(1, 64), grid: 16, budget: DEFAULT_BUDGET, extend: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusCheck {
    #[serde(serialize_with = "serialize_exact")]
    pub radius: Rational,
    #[serde(serialize_with = "serialize_exact")]
    pub boundary_length: Rational,
    /// Length of the capturing graph inside the closure of `B⁺`.
    #[serde(serialize_with = "serialize_exact")]
    pub graph_in_ball: Rational,
    /// Ball of the capturing graph in its own metric.
    #[serde(serialize_with = "serialize_exact")]
    pub graph_ball: Rational,
    #[serde(serialize_with = "serialize_exact")]
    pub cover_ball: Rational,
    /// Witness factor times the trivalent-tree ball.
    #[serde(serialize_with = "serialize_exact")]
    pub tree_bound: Rational,
    pub boundary_dominates: bool,
    pub graph_dominates: bool,
    /// Graph ball equals cover ball; only asserted for `R <= sys/2`.
    pub projection_exact: Option<bool>,
    pub tree_dominates: bool,
    pub face_area: f64,
    pub polyhedral_area: f64,
    /// Trapezoid integral of boundary lengths up to this radius.
    pub coarea_area: f64,
    /// `(1/(4π ln 2)) V(R ln 2)`.
    pub closed_form: f64,
    pub coarea_margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    pub genus: usize,
    pub area: f64,
    /// `(g - 1) / 2^11`.
    pub area_bound: f64,
    pub area_hypothesis: bool,
    #[serde(serialize_with = "serialize_exact")]
    pub systole: Rational,
    pub systole_hypothesis: bool,
    /// Some hypothesis failed: every later stage is diagnostic only.
    pub diagnostic: bool,
    pub capture_source: String,
    pub capture_edges: Vec<usize>,
    #[serde(serialize_with = "serialize_exact")]
    pub capture_length: Rational,
    /// `½ (2g - 1)`.
    #[serde(serialize_with = "serialize_exact")]
    pub capture_length_bound: Rational,
    pub capture_length_ok: bool,
    pub nerve_rank: Option<usize>,
    #[serde(serialize_with = "serialize_exact")]
    pub lambda: Rational,
    pub witness: usize,
    pub witness_source: String,
    #[serde(serialize_with = "serialize_exact")]
    pub factor: Rational,
    pub radii: Vec<RadiusCheck>,
    pub stage_notes: Vec<String>,
}

impl PipelineReport {
    /// Number of failed inequality checks over the radius grid.
    pub fn failures(&self) -> usize {
        self.radii
            .iter()
            .map(|r| {
                [!r.boundary_dominates, !r.graph_dominates, r.projection_exact == Some(false), !r.tree_dominates]
                    .iter()
                    .filter(|&&b| b)
                    .count()
            })
            .sum()
    }
}

pub fn theorem9_pipeline(s: &TriSurface, opts: &PipelineOptions) -> Result<PipelineReport, SurfaceError> {
    let genus = s.genus();
    if genus == 0 {
        return Err(SurfaceError::Sphere);
    }
    if opts.grid == 0 {
        return Err(SurfaceError::Precondition("radius grid must be nonempty".into()));
    }
    let mut notes = Vec::new();
    let area = s.total_area();
    let area_bound = (genus as f64 - 1.0) / 2048.0;
    let area_hypothesis = area <= area_bound;
    let sys = systole_simple(s)?;
    let systole = sys.length.clone();
    let systole_hypothesis = systole >= ratio(1, 2);
    let diagnostic = !(area_hypothesis && systole_hypothesis);
    if !area_hypothesis {
        notes.push(format!("hypothesis failed: area {area:.6} exceeds (g-1)/2^11 = {area_bound:.6}"));
    }
    if !systole_hypothesis {
        notes.push(format!("hypothesis failed: systole {} is below 1/2", format_rational(&systole)));
    }

    // capturing graph: nerve image pruned in the skeleton, or greedy
    let greedy = greedy_capture(s, None)?;
    let mut capture_source = "greedy".to_string();
    let mut capture_edges = greedy.edges.clone();
    let mut nerve_rank = None;
    match nerve_graph(s, &opts.r0, &opts.eps, Some(&systole)) {
        Ok(nerve) => {
            nerve_rank = Some(nerve.nerve_rank);
            let image = super::capturing_test(s, &nerve.image_edges);
            if image.captures && image.components == 1 {
                let pruned = prune_to_iso(s, &nerve.image_edges)?;
                if s.edges_length(&pruned) < greedy.length {
                    capture_source = "nerve".into();
                    capture_edges = pruned;
                }
            } else {
                notes.push(format!("nerve image has rank {} of {}", image.rank, 2 * genus));
            }
        }
        Err(e) => notes.push(format!("nerve skipped: {e}")),
    }
    let capture_length = s.edges_length(&capture_edges);
    let capture_length_bound = ratio(2 * genus as i64 - 1, 2);
    let capture_length_ok = capture_length <= capture_length_bound;
    if !capture_length_ok {
        notes.push(format!(
            "capturing graph length {} exceeds (2g-1)/2",
            format_rational(&capture_length)
        ));
    }

    // witness on the capturing graph with its induced metric
    let gamma = s.subgraph(&capture_edges);
    let b = gamma.betti();
    let (lambda, witness, witness_source, factor) = if capture_length_ok {
        let l = ratio(1, 6);
        let cert = find_witness(&gamma, &l).map_err(internal)?;
        (l, cert.witness.0 as usize, "certificate".to_string(), cert.factor)
    } else {
        let l = &capture_length / int(3 * b as i64 - 3);
        if l < ratio(1, 3) {
            let cert = find_witness(&gamma, &l).map_err(internal)?;
            (l, cert.witness.0 as usize, "certificate with enlarged lambda".to_string(), cert.factor)
        } else {
            let v = gamma.vertices().next().expect("nonempty capturing graph").0 as usize;
            (l, v, "smallest vertex (no certificate)".to_string(), int(0))
        }
    };

    // radii in (0, sys/2], optionally extended
    let half = &systole / int(2);
    let steps = opts.grid * (1 + opts.extend);
    let radii: Vec<Rational> = (1..=steps).map(|k| &half * ratio(k as i64, opts.grid as i64)).collect();
    let wv = crate::surface::vid(witness);
    let gamma_set: BTreeSet<usize> = capture_edges.iter().copied().collect();
    let mut checks: Vec<RadiusCheck> = radii
        .par_iter()
        .map(|r| -> Result<RadiusCheck, SurfaceError> {
            let ball = BallSubcomplex::new(s, witness, r).fill_to_bplus(s);
            let boundary_length = ball.boundary_length(s);
            let closure: BTreeSet<usize> = ball.faces.iter().flat_map(|&f| s.face_edges(f)).collect();
            let graph_in_ball = s.edges_length(gamma_set.intersection(&closure));
            let graph_ball = gamma.graph_ball_length(wv, r);
            let cover = ball_length(&gamma, &wv.into(), r, opts.budget).map_err(|e| SurfaceError::Internal(e.to_string()))?;
            let tree_bound = &factor * trivalent_tree_ball(r);
            let rf = rational_to_f64(r);
            Ok(RadiusCheck {
                radius: r.clone(),
                boundary_dominates: boundary_length >= graph_in_ball,
                graph_dominates: graph_in_ball >= graph_ball,
                projection_exact: (*r <= half).then(|| graph_ball == cover.length),
                tree_dominates: cover.length >= tree_bound,
                boundary_length,
                graph_in_ball,
                graph_ball,
                cover_ball: cover.length,
                tree_bound,
                face_area: ball.area(s),
                polyhedral_area: polyhedral_ball_area(s, witness, rf),
                coarea_area: 0.0,
                closed_form: hyperbolic_ball_area(rf * LN_2) / (4.0 * PI * LN_2),
                coarea_margin: 0.0,
            })
        })
        .collect::<Result<_, _>>()?;
    let mut acc = 0.0;
    let mut prev = (0.0, 0.0);
    for c in &mut checks {
        let r = rational_to_f64(&c.radius);
        let l = rational_to_f64(&c.boundary_length);
        acc += 0.5 * (r - prev.0) * (l + prev.1);
        prev = (r, l);
        c.coarea_area = acc;
        c.coarea_margin = acc - c.closed_form;
    }
    Ok(PipelineReport {
        genus,
        area,
        area_bound,
        area_hypothesis,
        systole,
        systole_hypothesis,
        diagnostic,
        capture_source,
        capture_edges,
        capture_length,
        capture_length_bound,
        capture_length_ok,
        nerve_rank,
        lambda,
        witness,
        witness_source,
        factor,
        radii: checks,
        stage_notes: notes,
    })
}

fn internal(e: WitnessError) -> SurfaceError {
    match e {
        WitnessError::Internal(m) => SurfaceError::Internal(m),
        other => SurfaceError::Precondition(other.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_matches_closed_form() {
        for r in 1..=10 {
            let (lhs, rhs) = coarea_identity(r as f64, 20_000);
            assert!((lhs - rhs).abs() <= 1e-9 * rhs.max(1.0), "R={r}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn shrink_examples() {
        assert_eq!(lemma91_shrink(1.0).unwrap(), 1.0);
        assert_eq!(lemma91_shrink(0.25).unwrap(), 0.5);
        assert_eq!(lemma91_shrink(4.0).unwrap(), 1.0);
        assert!(lemma91_shrink(0.0).is_err());
    }

    #[test]
    fn small_radii_defeat_every_lambda() {
        let lambdas: Vec<f64> = (1..=128).map(|k| k as f64 / 2.0).collect();
        let search = theorem1_lambda_search(&lambdas, &[0.01, 1.0, 2.0]);
        assert!(search.minimal.is_none());
        let at50 = theorem1_lambda_search(&[2.0], &[50.0]);
        assert!(at50.results[0].passes);
    }
}

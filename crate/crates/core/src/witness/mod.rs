//! Witness vertices with guaranteed cover growth.
//!
//! A connected graph of Betti number `b >= 2` whose total length is at most
//! `λ (3b - 3)` has a vertex whose cover balls dominate `(1 - 3λ)` times the
//! balls of the unit trivalent tree. [`find_witness`] finds such a vertex by
//! the edge-removal recursion: scale so that `length <= c (b - 1)`, reduce to
//! an at-least-trivalent graph, and repeatedly delete the longest edge longer
//! than `c`, keeping the half that still satisfies the length bound after a
//! split. When no edge is longer than `c` any vertex works.

mod subtree;
mod verify;

use std::collections::BTreeSet;

use num_traits::{One, Signed};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{reduce, EdgeId, GraphError, VertexId};
use crate::scalar::{format_rational, int, serialize_exact};
use crate::{Graph, Rational};

pub use subtree::{build_prop31_subtree, BiLipschitzReport, SubtreeNode, SubtreeWitness, SuperEdge};
pub use verify::{verify_certificate, CheckStatus, VerificationPoint, VerificationReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("lambda must lie strictly between 0 and 1/3, got {0}")]
    LambdaOutOfRange(String),
    #[error("hypothesis violated: total length {length} exceeds lambda (3b - 3) = {bound}")]
    HypothesisViolated { length: String, bound: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Constants of the recursion, normalized to `c = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessParams {
    #[serde(serialize_with = "serialize_exact")]
    pub lambda: Rational,
    #[serde(serialize_with = "serialize_exact")]
    pub c: Rational,
    #[serde(serialize_with = "serialize_exact")]
    pub c_prime: Rational,
    /// Scale applied before the recursion; equals `c + c_prime`.
    #[serde(serialize_with = "serialize_exact")]
    pub mu: Rational,
}

impl WitnessParams {
    /// Guaranteed growth factor `1 - 3λ = C' / (C' + c)`.
    pub fn factor(&self) -> Rational {
        Rational::one() - int(3) * &self.lambda
    }
}

pub fn params_from_lambda(lambda: &Rational) -> Result<WitnessParams, WitnessError> {
    if !lambda.is_positive() || *lambda >= Rational::new(1.into(), 3.into()) {
        return Err(WitnessError::LambdaOutOfRange(format_rational(lambda)));
    }
    let c = Rational::one();
    let mu = (int(3) * lambda).recip();
    let c_prime = &mu - &c;
    Ok(WitnessParams { lambda: lambda.clone(), c, c_prime, mu })
}

/// One step of the recursion, in the order it was taken.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum Step {
    Reduce { betti: usize, edges: usize, vertices: usize },
    RemoveNonseparating { edge: EdgeId, original_edges: Vec<EdgeId>, length: String },
    SplitSeparating { edge: EdgeId, original_edges: Vec<EdgeId>, length: String, kept_betti: usize, kept_min_vertex: VertexId },
    BabyCase { vertex: VertexId },
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessCertificate {
    /// Vertex of the original input graph.
    pub witness: VertexId,
    #[serde(serialize_with = "serialize_exact")]
    pub factor: Rational,
    pub params: WitnessParams,
    #[serde(serialize_with = "serialize_exact")]
    pub total_length: Rational,
    pub betti: usize,
    pub trace: Vec<Step>,
    /// Scaled, reduced graph of the baby case: at least trivalent, edges at most `c`.
    #[serde(skip)]
    pub core: Graph,
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), WitnessError> {
    if cond {
        Ok(())
    } else {
        Err(WitnessError::Internal(what()))
    }
}

pub fn find_witness(g: &Graph, lambda: &Rational) -> Result<WitnessCertificate, WitnessError> {
    let params = params_from_lambda(lambda)?;
    g.require_connected()?;
    let b = g.betti();
    if b < 2 {
        return Err(GraphError::BettiTooSmall { found: b, required: 2 }.into());
    }
    let total = g.total_length();
    let bound = lambda * int(3 * b as i64 - 3);
    if total > bound {
        return Err(WitnessError::HypothesisViolated {
            length: format_rational(&total),
            bound: format_rational(&bound),
        });
    }
    let c = params.c.clone();
    let mut current = g.scale(&params.mu)?;
    let mut origin: std::collections::BTreeMap<EdgeId, Vec<EdgeId>> =
        current.edges().map(|e| (e.id, vec![e.id])).collect();
    let mut trace = Vec::new();
    loop {
        let (reduced, rt) = reduce(&current)?;
        origin = rt
            .edge_origin
            .iter()
            .map(|(e, parts)| (*e, parts.iter().flat_map(|p| origin[p].clone()).collect()))
            .collect();
        current = reduced;
        let betti = current.betti();
        trace.push(Step::Reduce { betti, edges: current.edge_count(), vertices: current.vertex_count() });
        check(betti >= 2, || format!("Betti number dropped to {betti}"))?;
        check(current.min_degree().is_some_and(|d| d >= 3), || "reduced graph is not trivalent".into())?;
        let limit = &c * int(betti as i64 - 1);
        check(current.total_length() <= limit, || "length bound lost after reduction".into())?;

        let longest = current
            .edges()
            .filter(|e| e.length > c)
            .max_by(|a, b| a.length.cmp(&b.length).then(b.id.cmp(&a.id)))
            .cloned();
        let Some(w) = longest else {
            let vertex = current.vertices().next().expect("nonempty reduced graph");
            trace.push(Step::BabyCase { vertex });
            return Ok(WitnessCertificate {
                witness: vertex,
                factor: params.factor(),
                params,
                total_length: total,
                betti: b,
                trace,
                core: current,
            });
        };
        let original_edges = origin.remove(&w.id).unwrap_or_default();
        let length = format_rational(&w.length);
        if !current.is_separating(w.id)? {
            current = current.without_edge(w.id)?;
            let b2 = current.betti();
            check(current.total_length() <= &c * int(b2 as i64 - 1), || {
                format!("non-separating removal of edge {} broke the length bound", w.id)
            })?;
            trace.push(Step::RemoveNonseparating { edge: w.id, original_edges, length });
        } else {
            let rest = current.without_edge(w.id)?;
            let sides: Vec<Graph> = rest.components().iter().map(|part| rest.induced(part)).collect();
            let mut good: Vec<(usize, VertexId, Graph)> = sides
                .into_iter()
                .filter_map(|side| {
                    let bs = side.betti();
                    let ok = bs >= 1 && side.total_length() <= &c * int(bs as i64 - 1);
                    let first = side.vertices().next().expect("nonempty side");
                    ok.then_some((bs, first, side))
                })
                .collect();
            good.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
            let Some((kept_betti, kept_min_vertex, side)) = good.into_iter().next() else {
                return Err(WitnessError::Internal(format!(
                    "neither side of separating edge {} satisfies the length bound",
                    w.id
                )));
            };
            let kept: BTreeSet<EdgeId> = side.edges().map(|e| e.id).collect();
            origin.retain(|e, _| kept.contains(e));
            current = side;
            trace.push(Step::SplitSeparating { edge: w.id, original_edges, length, kept_betti, kept_min_vertex });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::trivalent_reference;
    use crate::graph::MetricGraph;
    use crate::scalar::ratio;

    #[test]
    fn params_examples() {
        let p = params_from_lambda(&ratio(1, 6)).unwrap();
        assert_eq!((p.c.clone(), p.c_prime.clone()), (int(1), int(1)));
        assert_eq!(p.factor(), ratio(1, 2));
        assert_eq!(params_from_lambda(&ratio(1, 12)).unwrap().c_prime, int(3));
        assert_eq!(params_from_lambda(&ratio(3, 10)).unwrap().c_prime, ratio(1, 9));
        let p = params_from_lambda(&ratio(1, 20)).unwrap();
        assert_eq!(&p.c / (int(3) * (&p.c_prime + &p.c)), ratio(1, 20));
        assert!(params_from_lambda(&ratio(1, 3)).is_err());
        assert!(params_from_lambda(&int(0)).is_err());
    }

    #[test]
    fn theta_is_a_baby_case() {
        let g = trivalent_reference(2).unwrap().scale(&ratio(1, 6)).unwrap();
        let cert = find_witness(&g, &ratio(1, 6)).unwrap();
        assert_eq!(cert.witness, VertexId(0));
        assert!(matches!(cert.trace.last(), Some(Step::BabyCase { .. })));
        assert_eq!(cert.trace.len(), 2);
    }

    #[test]
    fn too_long_is_rejected() {
        let g = trivalent_reference(2).unwrap();
        assert!(matches!(find_witness(&g, &ratio(1, 6)), Err(WitnessError::HypothesisViolated { .. })));
        let loop1: Graph = MetricGraph::from_parts([0], [(0, 0, 0, ratio(1, 100))]).unwrap();
        assert!(matches!(find_witness(&loop1, &ratio(1, 6)), Err(WitnessError::Graph(GraphError::BettiTooSmall { .. }))));
    }
}

use rayon::prelude::*;
use serde::Serialize;

use super::{WitnessCertificate, WitnessError};
use crate::cover::{trivalent_tree_ball, GrowthProfile};
use crate::graph::VertexId;
use crate::scalar::serialize_exact;
use crate::{Graph, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    /// The ball was truncated but its certified lower bound already clears the target.
    PassLowerBound,
    Fail,
    /// Truncated and the lower bound falls short: nothing can be concluded.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationPoint {
    #[serde(serialize_with = "serialize_exact")]
    pub radius: Rational,
    #[serde(serialize_with = "serialize_exact")]
    pub ball: Rational,
    #[serde(serialize_with = "serialize_exact")]
    pub bound: Rational,
    #[serde(serialize_with = "serialize_exact")]
    pub margin: Rational,
    pub truncated: bool,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub witness: VertexId,
    #[serde(serialize_with = "serialize_exact")]
    pub factor: Rational,
    pub points: Vec<VerificationPoint>,
    pub failures: usize,
    pub inconclusive: usize,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Checks `ball(witness, R) >= factor * tree_ball(R)` exactly at every radius.
pub fn verify_certificate(
    g: &Graph,
    cert: &WitnessCertificate,
    radii: &[Rational],
    budget: usize,
) -> Result<VerificationReport, WitnessError> {
    if !g.has_vertex(cert.witness) {
        return Err(WitnessError::Precondition(format!("witness {} is not a vertex of the graph", cert.witness)));
    }
    let rmax = radii.iter().max().cloned().unwrap_or_else(|| Rational::from_integer(0.into()));
    let profile = GrowthProfile::new(g, &cert.witness.into(), &rmax, budget).map_err(|e| match e {
        crate::cover::CoverError::Graph(g) => WitnessError::Graph(g),
        other => WitnessError::Precondition(other.to_string()),
    })?;
    let points: Vec<VerificationPoint> = radii
        .par_iter()
        .map(|r| {
            let value = profile.report(r);
            let bound = &cert.factor * trivalent_tree_ball(r);
            let margin = &value.length - &bound;
            let clears = margin >= Rational::from_integer(0.into());
            let status = match (value.truncated, clears) {
                (false, true) => CheckStatus::Pass,
                (false, false) => CheckStatus::Fail,
                (true, true) => CheckStatus::PassLowerBound,
                (true, false) => CheckStatus::Inconclusive,
            };
            VerificationPoint { radius: r.clone(), ball: value.length, bound, margin, truncated: value.truncated, status }
        })
        .collect();
    let failures = points.iter().filter(|p| p.status == CheckStatus::Fail).count();
    let inconclusive = points.iter().filter(|p| p.status == CheckStatus::Inconclusive).count();
    Ok(VerificationReport { witness: cert.witness, factor: cert.factor.clone(), points, failures, inconclusive })
}

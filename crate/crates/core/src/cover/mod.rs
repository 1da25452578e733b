//! Ball lengths in universal covers of metric graphs.
//!
//! The universal cover of a graph is the tree of non-backtracking walks from
//! a base point. Two engines compute the length of a ball in that tree:
//!
//! * [`expand_ball`] walks the tree shortest-first, one cover edge at a time.
//!   It works for any [`Scalar`] and its budget counts cover edges.
//! * [`GrowthProfile`] exploits that rational lengths live on a lattice
//!   `s * Z`: it counts cover edges per lattice step with big integers, so its
//!   cost grows with `radius / s` instead of with the (exponential) ball size.
//!
//! [`ball_length`] picks the profile for exact scalars whenever its work fits
//! the budget and falls back to expansion otherwise.

mod profile;
mod reference;

use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{DartIndex, EdgeId, GraphError, MetricGraph, MinItem, VertexId};
use crate::scalar::Scalar;

pub use profile::GrowthProfile;
pub use reference::{
    hyperbolic_ball_area, ln_hyperbolic_ball_area, trivalent_tree_ball,
};

/// Default work budget (cover edges for expansion, lattice work units for profiles).
pub const DEFAULT_BUDGET: usize = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error("radius must be nonnegative")]
    NegativeRadius,
    #[error("radius must be positive for entropy estimates")]
    NonPositiveRadius,
    #[error("offset lies outside edge {0}")]
    BadOffset(EdgeId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Center of a ball: a vertex, or a point at `offset` from the first endpoint of an edge.
#[derive(Clone, Debug, PartialEq)]
pub enum BasePoint<T> {
    Vertex(VertexId),
    Interior { edge: EdgeId, offset: T },
}

impl<T> From<VertexId> for BasePoint<T> {
    fn from(v: VertexId) -> Self {
        BasePoint::Vertex(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport<T: Scalar> {
    pub base: String,
    #[serde(serialize_with = "crate::scalar::serialize_exact")]
    pub radius: T,
    /// Exact ball length, or a certified lower bound when `truncated`.
    #[serde(serialize_with = "crate::scalar::serialize_exact")]
    pub length: T,
    /// Cover edges meeting the ball (saturating).
    pub node_count: u64,
    pub truncated: bool,
}

/// Places the base point on a vertex, subdividing an edge if needed.
pub(crate) fn anchor<T: Scalar>(
    g: &MetricGraph<T>,
    base: &BasePoint<T>,
) -> Result<(MetricGraph<T>, VertexId), CoverError> {
    match base {
        BasePoint::Vertex(v) => {
            if !g.has_vertex(*v) {
                return Err(GraphError::MissingVertex(*v).into());
            }
            Ok((g.clone(), *v))
        }
        BasePoint::Interior { edge, offset } => {
            let e = g.edge(*edge).ok_or(GraphError::UnknownEdge(*edge))?;
            if offset.is_negative() || *offset > e.length {
                return Err(CoverError::BadOffset(*edge));
            }
            let mut h = g.clone();
            let v = h.subdivide(*edge, offset)?;
            Ok((h, v))
        }
    }
}

pub(crate) fn describe<T: Scalar>(base: &BasePoint<T>) -> String {
    match base {
        BasePoint::Vertex(v) => format!("vertex {v}"),
        BasePoint::Interior { edge, offset } => {
            format!("edge {edge} + {}", crate::scalar::format_rational(&offset.to_rational()))
        }
    }
}

/// Length of the radius-`radius` ball around a lift of `base` in the universal cover.
///
/// The value does not depend on the chosen lift. Exact scalars use a
/// [`GrowthProfile`] when its lattice work fits in `budget`.
pub fn ball_length<T: Scalar>(
    g: &MetricGraph<T>,
    base: &BasePoint<T>,
    radius: &T,
    budget: usize,
) -> Result<GrowthReport<T>, CoverError> {
    if radius.is_negative() {
        return Err(CoverError::NegativeRadius);
    }
    if T::is_exact() {
        let rg = g.map_lengths(|l| l.to_rational());
        let rbase = match base {
            BasePoint::Vertex(v) => BasePoint::Vertex(*v),
            BasePoint::Interior { edge, offset } => {
                BasePoint::Interior { edge: *edge, offset: offset.to_rational() }
            }
        };
        let r = radius.to_rational();
        if GrowthProfile::work_estimate(&rg, &rbase, &r)?.is_some_and(|w| w <= budget) {
            let profile = GrowthProfile::new(&rg, &rbase, &r, budget)?;
            let rep = profile.report(&r);
            return Ok(GrowthReport {
                base: describe(base),
                radius: radius.clone(),
                length: T::from_rational(&rep.length),
                node_count: rep.node_count,
                truncated: rep.truncated,
            });
        }
    }
    expand_ball(g, base, radius, budget)
}

/// Shortest-first expansion of the cover tree, one cover edge per step.
///
/// Each cover edge entered at distance `d < radius` contributes
/// `min(length, radius - d)`. When more than `budget` cover edges would be
/// needed the partial sum is returned as a certified lower bound.
pub fn expand_ball<T: Scalar>(
    g: &MetricGraph<T>,
    base: &BasePoint<T>,
    radius: &T,
    budget: usize,
) -> Result<GrowthReport<T>, CoverError> {
    if radius.is_negative() {
        return Err(CoverError::NegativeRadius);
    }
    let (h, center) = anchor(g, base)?;
    let idx = DartIndex::new(&h);
    let root = idx.vertex_index(center).expect("anchored vertex");
    let mut heap = BinaryHeap::new();
    if radius.is_positive() {
        for &d in idx.out_darts(root) {
            heap.push(MinItem(T::zero(), d));
        }
    }
    let mut total = T::zero();
    let mut nodes: u64 = 0;
    let mut truncated = false;
    while let Some(MinItem(dist, dart)) = heap.pop() {
        if nodes as usize >= budget {
            truncated = true;
            break;
        }
        nodes += 1;
        let len = idx.length(dart).clone();
        let remaining = radius.clone() - dist.clone();
        let end = dist + len.clone();
        total = total + T::min_of(len, remaining);
        if end < *radius {
            for next in idx.successors(dart) {
                heap.push(MinItem(end.clone(), next));
            }
        }
    }
    Ok(GrowthReport { base: describe(base), radius: radius.clone(), length: total, node_count: nodes, truncated })
}

/// Maximal ball length over centers at vertices and at `refinement` evenly
/// spaced interior points of every edge.
///
/// This is a certified lower bound for the supremum over all centers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VPrime<T: Scalar> {
    #[serde(serialize_with = "crate::scalar::serialize_exact")]
    pub value: T,
    pub argmax: String,
    pub truncated: bool,
}

pub fn v_prime<T: Scalar>(
    g: &MetricGraph<T>,
    radius: &T,
    refinement: usize,
    budget: usize,
) -> Result<VPrime<T>, CoverError> {
    let mut centers: Vec<BasePoint<T>> = g.vertices().map(BasePoint::Vertex).collect();
    let parts = T::from_usize(refinement + 1).expect("small integer");
    for e in g.edges() {
        for j in 1..=refinement {
            let offset = e.length.clone() * T::from_usize(j).expect("small integer") / parts.clone();
            centers.push(BasePoint::Interior { edge: e.id, offset });
        }
    }
    let reports: Vec<GrowthReport<T>> = centers
        .par_iter()
        .map(|c| ball_length(g, c, radius, budget))
        .collect::<Result<_, _>>()?;
    let truncated = reports.iter().any(|r| r.truncated);
    let best = reports
        .into_iter()
        .reduce(|a, b| if b.length > a.length { b } else { a })
        .map(|r| (r.length, r.base))
        .unwrap_or((T::zero(), String::new()));
    Ok(VPrime { value: best.0, argmax: best.1, truncated })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyPoint {
    pub radius: f64,
    pub ln_length: f64,
    pub estimate: f64,
    pub truncated: bool,
}

/// The sequence `ln(length(B(R))) / R` for each requested radius.
pub fn entropy_estimate<T: Scalar>(
    g: &MetricGraph<T>,
    base: VertexId,
    radii: &[T],
    budget: usize,
) -> Result<Vec<EntropyPoint>, CoverError> {
    if radii.iter().any(|r| !r.is_positive()) {
        return Err(CoverError::NonPositiveRadius);
    }
    radii
        .par_iter()
        .map(|r| {
            let rep = ball_length(g, &BasePoint::Vertex(base), r, budget)?;
            let ln_length = rep.length.ln();
            let radius = r.to_f64_lossy();
            Ok(EntropyPoint { radius, ln_length, estimate: ln_length / radius, truncated: rep.truncated })
        })
        .collect()
}

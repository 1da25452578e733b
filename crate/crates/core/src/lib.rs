//! Exact ball growth in universal covers of metric graphs, witness vertices
//! with guaranteed exponential growth, and the surface-side capture machinery.
//!
//! The combinatorial core is generic over [`Scalar`]; the aliases below fix the
//! exact big-rational instantiation used by the witness and surface modules.

pub mod cover;
pub mod graph;
pub mod scalar;
pub mod surface;
pub mod witness;

pub use scalar::Scalar;

/// Exact rational used for lengths and radii.
pub type Rational = num_rational::BigRational;

/// Metric graph with exact rational lengths.
pub type Graph = graph::MetricGraph<Rational>;

/// Metric graph with `f64` lengths.
pub type FloatGraph = graph::MetricGraph<f64>;

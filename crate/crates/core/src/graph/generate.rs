use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{GraphError, MetricGraph};
use crate::scalar::{int, ratio};
use crate::Rational;

/// Random edge lengths are multiples of this step (`1/24`).
pub const LENGTH_GRID: i64 = 24;

#[derive(Clone, Debug, PartialEq)]
pub enum GraphKind {
    Theta,
    FigureEight,
    TrivalentReference { b: usize },
    RandomConnected { b: usize, min: Rational, max: Rational },
}

pub fn generate(kind: &GraphKind, seed: u64) -> Result<MetricGraph<Rational>, GraphError> {
    match kind {
        GraphKind::Theta => trivalent_reference(2),
        GraphKind::FigureEight => MetricGraph::from_parts([0], [(0, 0, 0, int(1)), (1, 0, 0, int(1))]),
        GraphKind::TrivalentReference { b } => trivalent_reference(*b),
        GraphKind::RandomConnected { b, min, max } => random_connected(*b, min, max, seed),
    }
}

/// Connected trivalent graph with first Betti number `b` and unit edges.
///
/// A cycle on `2b - 2` vertices plus the antipodal chords; `b = 2` gives the theta graph.
pub fn trivalent_reference(b: usize) -> Result<MetricGraph<Rational>, GraphError> {
    if b < 2 {
        return Err(GraphError::Generator(format!("trivalent reference needs b >= 2, got {b}")));
    }
    let n = (2 * b - 2) as u32;
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((i, i, (i + 1) % n, int(1)));
    }
    for i in 0..n / 2 {
        edges.push((n + i, i, i + n / 2, int(1)));
    }
    MetricGraph::from_parts(0..n, edges)
}

/// Seeded random connected multigraph with first Betti number `b`.
///
/// A random tree on up to `2b + 1` vertices plus `b` extra edges (loops and
/// parallel edges allowed). Lengths are drawn uniformly from the multiples of
/// `1/24` inside `[min, max]`.
pub fn random_connected(
    b: usize,
    min: &Rational,
    max: &Rational,
    seed: u64,
) -> Result<MetricGraph<Rational>, GraphError> {
    if b < 2 {
        return Err(GraphError::Generator(format!("random graph needs b >= 2, got {b}")));
    }
    if min > max || *min <= int(0) {
        return Err(GraphError::Generator("length range must satisfy 0 < min <= max".into()));
    }
    let grid = BigRational::from_integer(BigInt::from(LENGTH_GRID));
    let lo = (min * &grid).ceil().to_integer().to_i64().unwrap_or(1).max(1);
    let hi = (max * &grid).floor().to_integer().to_i64().unwrap_or(lo);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let length = |rng: &mut ChaCha8Rng| {
        if lo > hi {
            min.clone()
        } else {
            ratio(rng.gen_range(lo..=hi), LENGTH_GRID)
        }
    };
    let n = rng.gen_range(1..=(2 * b as u32 + 1));
    let mut edges = Vec::new();
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        edges.push((edges.len() as u32, parent, v, length(&mut rng)));
    }
    for _ in 0..b {
        let u = rng.gen_range(0..n);
        let w = rng.gen_range(0..n);
        edges.push((edges.len() as u32, u, w, length(&mut rng)));
    }
    MetricGraph::from_parts(0..n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_graphs_have_expected_size() {
        for b in 2..=12 {
            let g = trivalent_reference(b).unwrap();
            assert_eq!(g.betti(), b);
            assert_eq!(g.total_length(), int(3 * b as i64 - 3));
            assert_eq!(g.min_degree(), Some(3));
            assert!(g.degrees().values().all(|&d| d == 3));
        }
        assert_eq!(trivalent_reference(2).unwrap().total_length(), int(3));
        assert_eq!(trivalent_reference(4).unwrap().total_length(), int(9));
        assert!(trivalent_reference(1).is_err());
    }

    #[test]
    fn random_graphs_are_deterministic() {
        let a = random_connected(3, &ratio(1, 4), &int(1), 7).unwrap();
        let b = random_connected(3, &ratio(1, 4), &int(1), 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.betti(), 3);
        assert!(a.is_connected());
        assert!(a.edges().all(|e| e.length >= ratio(1, 4) && e.length <= int(1)));
    }
}

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use super::{anchor, BasePoint, CoverError};
use crate::graph::{DartIndex, MetricGraph};
use crate::scalar::rational_gcd;
use crate::Rational;

/// Exact ball lengths for every radius up to a horizon, from one pass.
///
/// With all lengths multiples of a unit `s`, every cover edge starts and ends
/// at a multiple of `s`. The profile records, per lattice step, how many cover
/// edges are in flight; the ball length at `R = (k + f) s` is then
/// `s * (in_flight[0] + ... + in_flight[k-1] + f * in_flight[k])`.
///
/// Counts are big integers so exponential growth costs only digits. The
/// budget counts dart visits; when it runs out the profile stops at the last
/// complete lattice step and larger radii get certified lower bounds.
#[derive(Clone, Debug)]
pub struct GrowthProfile {
    unit: Rational,
    horizon: u64,
    truncated: bool,
    segments: Vec<Segment>,
}

/// In-flight count is constant from `start` until the next segment.
#[derive(Clone, Debug)]
struct Segment {
    start: u64,
    active: BigUint,
    /// Sum of in-flight counts over the steps before `start`.
    before: BigUint,
    /// Cover edges entered at or before `start`.
    entered: BigUint,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileValue {
    pub length: Rational,
    pub node_count: u64,
    pub truncated: bool,
}

fn lattice(g: &MetricGraph<Rational>) -> Rational {
    let lengths: Vec<Rational> = g.edges().map(|e| e.length.clone()).collect();
    rational_gcd(lengths.iter()).unwrap_or_else(|| Rational::from_integer(1.into()))
}

fn steps(x: &Rational) -> Option<u64> {
    x.ceil().to_integer().to_u64()
}

impl GrowthProfile {
    /// Upper bound on the dart visits needed to reach `radius`, if it fits in a `usize`.
    pub fn work_estimate(
        g: &MetricGraph<Rational>,
        base: &BasePoint<Rational>,
        radius: &Rational,
    ) -> Result<Option<usize>, CoverError> {
        let (h, _) = anchor(g, base)?;
        let darts = 2 * h.edge_count() as u64 + 1;
        Ok(steps(&(radius / lattice(&h)))
            .and_then(|k| k.checked_add(1))
            .and_then(|k| k.checked_mul(darts))
            .and_then(|w| usize::try_from(w).ok()))
    }

    pub fn new(
        g: &MetricGraph<Rational>,
        base: &BasePoint<Rational>,
        max_radius: &Rational,
        budget: usize,
    ) -> Result<Self, CoverError> {
        if max_radius < &Rational::zero() {
            return Err(CoverError::NegativeRadius);
        }
        let (h, center) = anchor(g, base)?;
        let unit = lattice(&h);
        let horizon = steps(&(max_radius / &unit)).unwrap_or(u64::MAX);
        let idx = DartIndex::new(&h);
        let root = idx.vertex_index(center).expect("anchored vertex");
        let span: Vec<u64> = (0..idx.dart_count())
            .map(|d| (idx.length(d) / &unit).to_integer().to_u64().expect("lattice multiple"))
            .collect();

        let mut arrivals: BTreeMap<u64, BTreeMap<usize, BigUint>> = BTreeMap::new();
        let mut endings: BTreeMap<u64, BigUint> = BTreeMap::new();
        let mut segments = Vec::new();
        let mut active = BigUint::zero();
        let mut before = BigUint::zero();
        let mut entered = BigUint::zero();
        let mut last = 0u64;
        let mut work = 0usize;
        let mut reached = horizon;
        let mut truncated = false;

        let mut t = 0u64;
        loop {
            if t >= horizon {
                break;
            }
            before += &active * BigUint::from(t - last);
            last = t;
            if let Some(done) = endings.remove(&t) {
                active -= done;
            }
            let incoming = arrivals.remove(&t).unwrap_or_default();
            let mut at_vertex: BTreeMap<usize, BigUint> = BTreeMap::new();
            for (d, n) in &incoming {
                *at_vertex.entry(idx.head(*d)).or_default() += n;
            }
            if t == 0 {
                *at_vertex.entry(root).or_default() += 1u32;
            }
            let visits: usize = at_vertex.keys().map(|&v| idx.out_darts(v).len()).sum();
            if work.saturating_add(visits) > budget {
                reached = t;
                truncated = true;
                break;
            }
            work += visits;
            for (v, total) in &at_vertex {
                for &d in idx.out_darts(*v) {
                    let back = incoming.get(&DartIndex::<Rational>::reverse(d));
                    let count = match back {
                        Some(b) => total - b,
                        None => total.clone(),
                    };
                    if count.is_zero() {
                        continue;
                    }
                    let end = t + span[d];
                    active += &count;
                    entered += &count;
                    if end < horizon {
                        *endings.entry(end).or_default() += &count;
                        *arrivals.entry(end).or_default().entry(d).or_default() += count;
                    }
                }
            }
            segments.push(Segment { start: t, active: active.clone(), before: before.clone(), entered: entered.clone() });
            let next_arrival = arrivals.keys().next().copied();
            let next_ending = endings.keys().next().copied();
            match next_arrival.into_iter().chain(next_ending).min() {
                Some(n) => t = n,
                None => break,
            }
        }
        if segments.is_empty() {
            segments.push(Segment {
                start: 0,
                active: BigUint::zero(),
                before: BigUint::zero(),
                entered: BigUint::zero(),
            });
        }
        Ok(Self { unit, horizon: reached, truncated, segments })
    }

    /// Lattice unit: every edge length is an integer multiple of it.
    pub fn unit(&self) -> &Rational {
        &self.unit
    }

    /// Largest radius with an exact value.
    pub fn exact_radius(&self) -> Rational {
        &self.unit * Rational::from_integer(self.horizon.into())
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    fn segment(&self, step: u64) -> &Segment {
        let i = self.segments.partition_point(|s| s.start <= step);
        &self.segments[i.saturating_sub(1)]
    }

    /// Ball length at `radius`, or the value at [`Self::exact_radius`] when
    /// `radius` lies beyond it (then flagged `truncated`).
    pub fn report(&self, radius: &Rational) -> ProfileValue {
        let limit = self.exact_radius();
        let (r, truncated) = if *radius > limit { (limit, true) } else { (radius.clone(), false) };
        let x = &r / &self.unit;
        let k = x.floor().to_integer().to_u64().expect("step fits u64");
        let frac = &x - Rational::from_integer(k.into());
        let seg = self.segment(k);
        let whole = &seg.before + &seg.active * BigUint::from(k - seg.start);
        let length = &self.unit
            * (Rational::from_integer(BigInt::from(whole)) + frac * Rational::from_integer(BigInt::from(seg.active.clone())));
        let node_count = match steps(&x) {
            Some(0) | None => 0,
            Some(c) => self.segment(c - 1).entered.to_u64().unwrap_or(u64::MAX),
        };
        ProfileValue { length, node_count, truncated }
    }
}

//! Scalar abstraction shared by the graph and cover code.
//!
//! Every combinatorial routine is written against [`Scalar`] so the same code
//! runs over exact big rationals (the default, see [`crate::Rational`]),
//! fixed-width rationals, or plain floats.

use std::fmt::Debug;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeStruct, Serializer};

/// Number type usable as an edge length or a radius.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// Converts from an exact rational. Exact for rational types, nearest for floats.
    fn from_rational(r: &BigRational) -> Self;

    /// Exact rational value. Floats convert through their binary expansion.
    fn to_rational(&self) -> BigRational;

    fn to_f64_lossy(&self) -> f64;

    fn floor(&self) -> Self;

    /// Natural logarithm, usable even when the value does not fit in an `f64`.
    fn ln(&self) -> f64 {
        self.to_f64_lossy().ln()
    }

    /// True when comparisons and sums are exact.
    fn is_exact() -> bool;

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_rational(r: &BigRational) -> Self {
                rational_to_f64(r) as $t
            }

            fn to_rational(&self) -> BigRational {
                BigRational::from_float(*self).expect("finite float")
            }

            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }

            fn floor(&self) -> Self {
                <$t>::floor(*self)
            }

            fn is_exact() -> bool {
                false
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_rational(&self) -> BigRational {
        self.clone()
    }

    fn to_f64_lossy(&self) -> f64 {
        rational_to_f64(self)
    }

    fn floor(&self) -> Self {
        num_rational::Ratio::floor(self)
    }

    fn ln(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        if self.is_negative() {
            return f64::NAN;
        }
        ln_bigint(self.numer()) - ln_bigint(self.denom())
    }

    fn is_exact() -> bool {
        true
    }
}

impl Scalar for Rational64 {
    fn from_rational(r: &BigRational) -> Self {
        let n = r.numer().to_i64().expect("numerator fits in i64");
        let d = r.denom().to_i64().expect("denominator fits in i64");
        Rational64::new(n, d)
    }

    fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }

    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn floor(&self) -> Self {
        num_rational::Ratio::floor(self)
    }

    fn is_exact() -> bool {
        true
    }
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("64-bit mantissa");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Float approximation of a rational that survives huge numerators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let sign = if r.numer().sign() == Sign::Minus { -1.0 } else { 1.0 };
    sign * r.abs().ln().exp()
}

/// Exact rational from a numerator and a nonzero denominator.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Largest rational `s` such that every input is an integer multiple of `s`.
///
/// Returns `None` for an empty slice or when any value is not positive.
pub fn rational_gcd<'a, I>(values: I) -> Option<BigRational>
where
    I: IntoIterator<Item = &'a BigRational>,
{
    let mut acc: Option<BigRational> = None;
    for v in values {
        if !v.is_positive() {
            return None;
        }
        acc = Some(match acc {
            None => v.clone(),
            Some(a) => {
                // gcd(a/b, c/d) = gcd(ad, cb) / bd
                let num = (a.numer() * v.denom()).gcd(&(v.numer() * a.denom()));
                BigRational::new(num, a.denom() * v.denom())
            }
        });
    }
    acc
}

/// Parses `p/q`, an integer, or a finite decimal into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer = BigInt::from_str_radix(if digits.is_empty() { "0" } else { &digits }, 10).ok()?;
    if neg {
        numer = -numer;
    }
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Some(BigRational::new(numer, denom))
}

/// Canonical `p/q` rendering, always with an explicit denominator.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `2^n` in any scalar type, by repeated doubling.
pub fn pow2<T: Scalar>(n: u64) -> T {
    let two = T::one() + T::one();
    let mut acc = T::one();
    let mut base = two;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base.clone();
        }
        base = base.clone() * base;
        e >>= 1;
    }
    acc
}

pub(crate) fn floor_u64<T: Scalar>(x: &T) -> u64 {
    x.floor().to_rational().to_integer().to_u64().expect("nonnegative radius")
}

pub(crate) fn from_u64<T: Scalar>(n: u64) -> T {
    T::from_u64(n).unwrap_or_else(|| T::from_rational(&BigRational::from_integer(n.into())))
}

/// Exact value serialized as `{"exact": "p/q", "approx": <float>}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Exact(pub BigRational);

impl Exact {
    pub fn of<T: Scalar>(x: &T) -> Self {
        Exact(x.to_rational())
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Exact", 2)?;
        s.serialize_field("exact", &format_rational(&self.0))?;
        s.serialize_field("approx", &rational_to_f64(&self.0))?;
        s.end()
    }
}

/// `serialize_with` helper writing any scalar as an [`Exact`] object.
pub fn serialize_exact<T: Scalar, S: Serializer>(x: &T, serializer: S) -> Result<S::Ok, S::Error> {
    Exact::of(x).serialize(serializer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/6"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("0.125"), Some(ratio(1, 8)));
        assert_eq!(parse_rational("-2.5"), Some(ratio(-5, 2)));
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational(".5"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn gcd_of_rationals() {
        let v = [ratio(1, 6), ratio(1, 4)];
        assert_eq!(rational_gcd(v.iter()), Some(ratio(1, 12)));
        let w = [ratio(2, 5), ratio(6, 5)];
        assert_eq!(rational_gcd(w.iter()), Some(ratio(2, 5)));
        assert_eq!(rational_gcd([ratio(0, 1)].iter()), None);
    }

    #[test]
    fn huge_rationals_still_have_logs() {
        let big: BigRational = pow2::<BigRational>(4000) / int(3);
        let expect = 4000.0 * std::f64::consts::LN_2 - 3f64.ln();
        assert!((Scalar::ln(&big) - expect).abs() < 1e-9);
        assert!(rational_to_f64(&big).is_infinite());
    }

    #[test]
    fn float_round_trip_is_exact() {
        let x = 0.375f64;
        assert_eq!(x.to_rational(), ratio(3, 8));
        assert_eq!(<f64 as Scalar>::from_rational(&ratio(3, 8)), 0.375);
    }
}

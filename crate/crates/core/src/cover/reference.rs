use std::f64::consts::{LN_2, PI};

use crate::scalar::{floor_u64, from_u64, pow2, Scalar};

/// Ball length in the trivalent tree with unit edges, centered at a vertex.
///
/// `3 (2^n - 1) + 3 (R - n) 2^n` with `n = floor(R)`.
pub fn trivalent_tree_ball<T: Scalar>(radius: &T) -> T {
    if !radius.is_positive() {
        return T::zero();
    }
    let n = floor_u64(radius);
    let three: T = from_u64(3);
    let p: T = pow2(n);
    let frac = radius.clone() - from_u64::<T>(n);
    three.clone() * (p.clone() - T::one()) + three * frac * p
}

/// Area of a hyperbolic disk of radius `r` (curvature -1): `2 pi (cosh r - 1)`.
pub fn hyperbolic_ball_area(r: f64) -> f64 {
    2.0 * PI * (r.cosh() - 1.0)
}

/// `ln` of [`hyperbolic_ball_area`], finite for radii where `cosh` overflows.
pub fn ln_hyperbolic_ball_area(r: f64) -> f64 {
    // cosh r - 1 = 2 sinh^2(r / 2)
    let x = r / 2.0;
    let ln_sinh = if x < 20.0 { x.sinh().ln() } else { x - LN_2 + (-(-2.0 * x).exp()).ln_1p() };
    (4.0 * PI).ln() + 2.0 * ln_sinh
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn tree_ball_values() {
        assert_eq!(trivalent_tree_ball(&int(2)), int(9));
        assert_eq!(trivalent_tree_ball(&ratio(3, 2)), int(6));
        assert_eq!(trivalent_tree_ball(&int(0)), int(0));
        assert_eq!(trivalent_tree_ball(&ratio(1, 2)), ratio(3, 2));
        assert_eq!(trivalent_tree_ball(&2.5f64), 15.0);
    }

    #[test]
    fn hyperbolic_area_forms_agree() {
        for r in [0.1, 1.0, 5.0, 30.0, 200.0] {
            let direct = hyperbolic_ball_area(r).ln();
            assert!((direct - ln_hyperbolic_ball_area(r)).abs() < 1e-9 * direct.abs().max(1.0));
        }
        assert!(ln_hyperbolic_ball_area(2000.0).is_finite());
        assert!((hyperbolic_ball_area(1.0) - 2.0 * PI * (1f64.cosh() - 1.0)).abs() < 1e-15);
    }
}

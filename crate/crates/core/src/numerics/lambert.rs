//! Real branches of the Lambert W function.
//!
//! Both branches start from a branch-point series or an asymptotic guess and
//! refine with Halley (or Newton on the logarithmic form far from the branch
//! point). Every iterate is kept inside a bracket on which the defining
//! equation is monotone; a step that leaves the bracket is replaced by
//! bisection.

use std::f64::consts::E;

use crate::error::{Error, Result};

const INV_E: f64 = 1.0 / E;
/// Arguments this far below -1/e are treated as rounding noise and clamped.
const DOMAIN_SLACK: f64 = 1e-15;
/// Below this value of p = sqrt(2(1 + e x)) the branch-point series is exact
/// to machine precision and beats any iteration on w e^w.
const SERIES_CUTOFF: f64 = 1e-3;
const MAX_ITER: usize = 100;

/// Series of W about the branch point in p = ±sqrt(2(1 + e x)).
/// The principal branch takes p ≥ 0, the lower branch p ≤ 0.
fn branch_point_series(p: f64) -> f64 {
    const C: [f64; 7] = [
        -1.0,
        1.0,
        -1.0 / 3.0,
        11.0 / 72.0,
        -43.0 / 540.0,
        769.0 / 17280.0,
        -221.0 / 8505.0,
    ];
    C.iter().rev().fold(0.0, |acc, &c| acc * p + c)
}

/// p = sqrt(2(1 + e x)). Arguments within a few ulps of -1/e cannot be told
/// apart from the branch point in f64 and map to p = 0.
fn branch_distance(x: f64) -> f64 {
    let d = x.mul_add(E, 1.0);
    if d <= 4.0 * f64::EPSILON {
        0.0
    } else {
        (2.0 * d).sqrt()
    }
}

/// Safeguarded iteration on a function monotone in w over [lo, hi].
///
/// `eval` returns the residual and the proposed update (new iterate).
fn refine<F>(mut w: f64, mut lo: f64, mut hi: f64, increasing: bool, eval: F) -> f64
where
    F: Fn(f64) -> (f64, f64),
{
    if !(w > lo && w < hi) {
        w = 0.5 * (lo + hi);
    }
    for _ in 0..MAX_ITER {
        let (residual, proposal) = eval(w);
        if residual == 0.0 {
            return w;
        }
        if (residual > 0.0) == increasing {
            hi = w;
        } else {
            lo = w;
        }
        let next = if proposal.is_finite() && proposal > lo && proposal < hi {
            proposal
        } else {
            0.5 * (lo + hi)
        };
        let done = (next - w).abs() <= 4.0 * f64::EPSILON * w.abs().max(1.0);
        w = next;
        if done || hi - lo <= 4.0 * f64::EPSILON * w.abs().max(1.0) {
            break;
        }
    }
    w
}

fn halley(w: f64, x: f64) -> (f64, f64) {
    let ew = w.exp();
    let f = w * ew - x;
    let wp1 = w + 1.0;
    let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    (f, w - f / denom)
}

fn check_lower_domain(function: &'static str, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::NonFinite {
            context: function,
            value: x,
        });
    }
    if x < -INV_E - DOMAIN_SLACK {
        return Err(Error::Domain {
            function,
            value: x,
            domain: "x >= -1/e",
        });
    }
    Ok(x.max(-INV_E))
}

/// Principal branch W₀ on [-1/e, ∞): the solution of w eʷ = x with w ≥ -1.
pub fn lambert_w0(x: f64) -> Result<f64> {
    let x = check_lower_domain("lambert_w0", x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let p = branch_distance(x);
    if p < SERIES_CUTOFF {
        return Ok(branch_point_series(p));
    }

    if x > 1.0 {
        // w + ln w = ln x, Newton; W₀(1) ≈ 0.567 so the bracket starts at 1/2.
        let lx = x.ln();
        let guess = if x < 3.0 {
            winitzki(x)
        } else {
            let l2 = lx.ln();
            lx - l2 + l2 / lx
        };
        let w = refine(guess, 0.5, x.ln_1p(), true, |w| {
            let h = w + w.ln() - lx;
            (h, w - h / (1.0 + 1.0 / w))
        });
        return Ok(w);
    }

    let guess = if p < 0.5 {
        branch_point_series(p)
    } else {
        winitzki(x)
    };
    let (lo, hi) = if x < 0.0 { (-1.0, x) } else { (0.0, x.ln_1p()) };
    Ok(refine(guess, lo, hi, true, |w| halley(w, x)))
}

/// Lower branch W₋₁ on [-1/e, 0): the solution of w eʷ = x with w ≤ -1.
pub fn lambert_wm1(x: f64) -> Result<f64> {
    let x = check_lower_domain("lambert_wm1", x)?;
    if x >= 0.0 {
        return Err(Error::Domain {
            function: "lambert_wm1",
            value: x,
            domain: "-1/e <= x < 0",
        });
    }
    let p = branch_distance(x);
    if p < SERIES_CUTOFF {
        return Ok(branch_point_series(-p));
    }

    // Bounds from u = -1 - ln(-x):  -1 - sqrt(2u) - u < W₋₁ < -1 - sqrt(2u) - 2u/3.
    let u = (-1.0 - (-x).ln()).max(0.0);
    let lo = -2.0 - (2.0 * u).sqrt() - u;
    let hi = -1.0;

    if x > -0.25 {
        // (-w) eʷ = -x  ⇔  w + ln(-w) - ln(-x) = 0, increasing in w below -1.
        let lx = (-x).ln();
        let l2 = (-lx).ln();
        let guess = lx - l2 + l2 / lx;
        let w = refine(guess, lo, hi, true, |w| {
            let h = w + (-w).ln() - lx;
            (h, w - h / (1.0 + 1.0 / w))
        });
        return Ok(w);
    }

    let guess = branch_point_series(-p);
    // w eʷ - x is decreasing for w < -1.
    Ok(refine(guess, lo, hi, false, |w| halley(w, x)))
}

/// Winitzki's closed-form approximation of W₀, good to a few percent.
fn winitzki(x: f64) -> f64 {
    let l = x.ln_1p();
    l * (1.0 - (1.0 + l).ln() / (2.0 + l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Plain bisection on w eʷ = x over a bracket where it is monotone.
    fn bisect(x: f64, mut lo: f64, mut hi: f64, increasing: bool) -> f64 {
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            let f = mid * mid.exp() - x;
            if (f > 0.0) == increasing {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn w0_reference_values() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert_relative_eq!(lambert_w0(-INV_E).unwrap(), -1.0, epsilon = 1e-12);
        // bisection oracle on w eʷ = 1
        let oracle = bisect(1.0, 0.0, 1.0, true);
        assert_relative_eq!(oracle, 0.5671432904, epsilon = 1e-10);
        assert_relative_eq!(lambert_w0(1.0).unwrap(), oracle, epsilon = 1e-14);
    }

    #[test]
    fn wm1_reference_values() {
        assert_relative_eq!(lambert_wm1(-INV_E).unwrap(), -1.0, epsilon = 1e-12);
        let o1 = bisect(-0.2, -10.0, -1.0, false);
        assert_relative_eq!(o1, -2.5426413578, epsilon = 1e-10);
        assert_relative_eq!(lambert_wm1(-0.2).unwrap(), o1, epsilon = 1e-13);
        let o2 = bisect(-0.05, -10.0, -1.0, false);
        assert_relative_eq!(o2, -4.4997552885, epsilon = 1e-10);
        assert_relative_eq!(lambert_wm1(-0.05).unwrap(), o2, epsilon = 1e-13);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(lambert_w0(-0.5), Err(Error::Domain { .. })));
        assert!(matches!(lambert_wm1(-0.5), Err(Error::Domain { .. })));
        assert!(matches!(lambert_wm1(0.0), Err(Error::Domain { .. })));
        assert!(matches!(lambert_wm1(0.3), Err(Error::Domain { .. })));
        assert!(lambert_w0(f64::NAN).is_err());
        // rounding noise just below -1/e is clamped onto the branch point
        assert_relative_eq!(lambert_w0(-INV_E - 1e-17).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn near_branch_point_both_branches() {
        for k in 1..=12 {
            let d = 10f64.powi(-k);
            let x = -INV_E + d;
            let w0 = lambert_w0(x).unwrap();
            let wm = lambert_wm1(x).unwrap();
            assert!(w0 >= -1.0 && wm <= -1.0, "x = {x}: {w0}, {wm}");
            assert!(w0 > wm);
            let r0 = (w0 * w0.exp() - x).abs();
            let rm = (wm * wm.exp() - x).abs();
            assert!(r0 <= 1e-15 && rm <= 1e-15, "residuals {r0} {rm} at d = {d}");
        }
    }

    #[test]
    fn large_and_tiny_arguments() {
        for &x in &[10.0, 1e3, 1e6, 1e12, 1e100, 1e300] {
            let w = lambert_w0(x).unwrap();
            assert_relative_eq!(w + w.ln(), x.ln(), max_relative = 1e-14);
        }
        for &x in &[-1e-3, -1e-8, -1e-20, -1e-300] {
            let w = lambert_wm1(x).unwrap();
            assert_relative_eq!(w + (-w).ln(), (-x).ln(), max_relative = 1e-14);
        }
    }

    proptest! {
        #[test]
        fn w0_identity(x in -INV_E..1e6f64) {
            let w = lambert_w0(x).unwrap();
            prop_assert!(w >= -1.0);
            let back = w * w.exp();
            prop_assert!((back - x).abs() <= 1e-9 * x.abs().max(1e-300) + 1e-15,
                "x = {}, w = {}, back = {}", x, w, back);
        }

        #[test]
        fn wm1_identity(x in -INV_E..-1e-8f64) {
            let w = lambert_wm1(x).unwrap();
            prop_assert!(w <= -1.0);
            let back = w * w.exp();
            prop_assert!((back - x).abs() <= 1e-9 * x.abs(), "x = {}, w = {}", x, w);
        }
    }
}

//! Brent's method: inverse quadratic interpolation and secant steps, falling
//! back to bisection whenever the interpolated step is not safely inside the
//! current bracket.

use super::{Bracket, ToleranceConfig};
use crate::error::{Error, Result};

/// Root of `f` inside `bracket`.
///
/// Terminates when `f` vanishes, when `|f(x)| ≤ abs_tol / 1000`, or when the
/// bracket half-width drops below `max(abs_tol, rel_tol·|x|)/2 + 2ε|x|`.
pub fn find_root<F>(f: F, bracket: Bracket, tol: &ToleranceConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    tol.validate()?;
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if !fa.is_finite() {
        return Err(Error::NonFinite {
            context: "find_root f(lo)",
            value: fa,
        });
    }
    if !fb.is_finite() {
        return Err(Error::NonFinite {
            context: "find_root f(hi)",
            value: fb,
        });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let f_floor = tol.abs_tol * 1e-3;
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol.abs_tol.max(tol.rel_tol * b.abs());
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 || fb.abs() <= f_floor {
            return Ok(b);
        }

        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }

        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NonFinite {
                context: "find_root iterate",
                value: fb,
            });
        }
    }

    Err(Error::MaxIterations {
        iterations: tol.max_iter,
        lo: b.min(c),
        hi: b.max(c),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::lambert_wm1;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn tight() -> ToleranceConfig {
        ToleranceConfig::tight()
    }

    #[test]
    fn sqrt_two() {
        let x = find_root(|x| x * x - 2.0, Bracket::new(1.0, 2.0).unwrap(), &tight()).unwrap();
        assert_relative_eq!(x, std::f64::consts::SQRT_2, epsilon = 1e-13);
    }

    #[test]
    fn cross_oracle_with_lower_lambert_branch() {
        let x = find_root(
            |t| t * (-t).exp() - 0.2,
            Bracket::new(1.0, 10.0).unwrap(),
            &tight(),
        )
        .unwrap();
        assert_relative_eq!(x, -lambert_wm1(-0.2).unwrap(), epsilon = 1e-12);
        assert_relative_eq!(x, 2.5426413578, epsilon = 1e-9);
    }

    #[test]
    fn root_at_midpoint_and_endpoints() {
        let cfg = ToleranceConfig::default();
        let x = find_root(|x| x, Bracket::new(-1.0, 1.0).unwrap(), &cfg).unwrap();
        assert!(x.abs() <= 1e-10);
        assert_eq!(find_root(|x| x - 1.0, Bracket::new(0.0, 1.0).unwrap(), &cfg).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        let cfg = ToleranceConfig::default();
        assert!(matches!(
            find_root(|x| x * x + 1.0, Bracket::new(-1.0, 1.0).unwrap(), &cfg),
            Err(Error::NoSignChange { .. })
        ));
        let one = ToleranceConfig::new(1e-300, 1e-300, 1).unwrap();
        assert!(matches!(
            find_root(|x| x.powi(3) - 0.3, Bracket::new(0.0, 1.0).unwrap(), &one),
            Err(Error::MaxIterations { .. })
        ));
    }

    proptest! {
        #[test]
        fn residual_within_tolerance(root in -5.0..5.0f64, k in 0.1..10.0f64, shift in 0.0..2.0f64) {
            let f = |x: f64| k * (x - root) + shift * (x - root).powi(3);
            let cfg = ToleranceConfig::default();
            let x = find_root(f, Bracket::new(-6.0, 6.0).unwrap(), &cfg).unwrap();
            prop_assert!(f(x).abs() <= 10.0 * cfg.abs_tol * k.max(1.0), "f(x) = {}", f(x));
        }
    }
}

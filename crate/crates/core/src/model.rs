//! Model primitives, prior beliefs of the two-stage Poisson state process and
//! the four cost-benefit cutoffs that partition κ-space.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{find_root, Bracket, ToleranceConfig};

/// Primitives of one project. κ is always derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectParams {
    /// Poisson rate of each stage.
    pub lambda: f64,
    /// Flow cost of funding.
    pub c: f64,
    /// Completion profit.
    pub v: f64,
    /// Completion deadline; `f64::INFINITY` for the open-ended project.
    #[serde(rename = "T", with = "horizon")]
    pub t_max: f64,
    /// Discount rate.
    #[serde(default)]
    pub r: f64,
    /// Principal's share of the completion profit.
    #[serde(default = "one")]
    pub alpha: f64,
    /// Weight of the agent's flow benefit from funding.
    #[serde(default = "one")]
    pub beta: f64,
}

fn one() -> f64 {
    1.0
}

/// `T` is written as a number, or as the string `"inf"` when unbounded.
mod horizon {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(t: &f64, s: S) -> Result<S::Ok, S::Error> {
        if t.is_infinite() && *t > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*t)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Text(s) => match s.to_ascii_lowercase().as_str() {
                "inf" | "infinity" | "+inf" => Ok(f64::INFINITY),
                other => Err(de::Error::custom(format!("T must be a number or \"inf\", got {other:?}"))),
            },
        }
    }
}

impl ProjectParams {
    /// Baseline project (r = 0, α = 1, β = 1).
    pub fn new(lambda: f64, c: f64, v: f64, t_max: f64) -> Result<Self> {
        let p = Self {
            lambda,
            c,
            v,
            t_max,
            r: 0.0,
            alpha: 1.0,
            beta: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Baseline project with `c` chosen so that κ takes the given value.
    pub fn from_kappa(lambda: f64, kappa: f64, v: f64, t_max: f64) -> Result<Self> {
        Self::new(lambda, kappa * v * lambda, v, t_max)
    }

    pub fn with_preferences(mut self, r: f64, alpha: f64, beta: f64) -> Result<Self> {
        self.r = r;
        self.alpha = alpha;
        self.beta = beta;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{name} must be positive and finite, got {x}")))
            }
        };
        positive("lambda", self.lambda)?;
        positive("c", self.c)?;
        positive("v", self.v)?;
        if !(self.t_max > 0.0) {
            return Err(Error::InvalidParams(format!("T must be positive, got {}", self.t_max)));
        }
        if !(self.r.is_finite() && self.r >= 0.0) {
            return Err(Error::InvalidParams(format!("r must be finite and >= 0, got {}", self.r)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParams(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::InvalidParams(format!("beta must be finite and >= 0, got {}", self.beta)));
        }
        Ok(())
    }

    /// κ = c / (v λ).
    pub fn kappa(&self) -> f64 {
        self.c / (self.v * self.lambda)
    }

    pub fn is_baseline(&self) -> bool {
        self.r == 0.0 && self.alpha == 1.0 && self.beta == 1.0
    }

    pub fn is_infinite_horizon(&self) -> bool {
        self.t_max.is_infinite()
    }

    /// λT; errors on an unbounded horizon.
    pub fn lambda_t(&self) -> Result<f64> {
        self.finite_horizon()?;
        Ok(self.lambda * self.t_max)
    }

    pub fn finite_horizon(&self) -> Result<f64> {
        if self.is_infinite_horizon() {
            Err(Error::InfiniteHorizon)
        } else {
            Ok(self.t_max)
        }
    }
}

/// Unconditional distribution of the number of completed stages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeliefState {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

/// P(Gamma(2, 1) ≤ x) = 1 − e⁻ˣ(1 + x), accurate for small x.
pub(crate) fn gamma2_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    if x < 0.1 {
        // Σ_{k≥2} (−1)ᵏ (k−1) xᵏ / k!
        let mut term = -x; // (−1)ᵏ xᵏ/k! at k = 1
        let mut sum = 0.0;
        for k in 2..=14 {
            term *= -x / k as f64;
            sum += (k - 1) as f64 * term;
        }
        return sum;
    }
    -(-x).exp_m1() - x * (-x).exp()
}

/// e⁻ˣ(1 + x), the probability that stage two is still open.
pub(crate) fn gamma2_sf(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        (-x).exp() * (1.0 + x)
    }
}

pub fn prior_beliefs(params: &ProjectParams, t: f64) -> BeliefState {
    debug_assert!(t >= 0.0, "prior_beliefs at negative time {t}");
    let x = params.lambda * t.max(0.0);
    if x.is_infinite() {
        return BeliefState { p0: 0.0, p1: 0.0, p2: 1.0 };
    }
    let e = (-x).exp();
    BeliefState {
        p0: e,
        p1: x * e,
        p2: gamma2_cdf(x),
    }
}

/// Belief in state 1 given that stage two is still open.
pub fn posterior_q1_no_stop(params: &ProjectParams, t: f64) -> f64 {
    let x = params.lambda * t.max(0.0);
    if x.is_infinite() {
        1.0
    } else {
        x / (1.0 + x)
    }
}

/// ∫ₐᵇ p₁(z) dz.
pub(crate) fn integral_p1(lambda: f64, a: f64, b: f64) -> f64 {
    (gamma2_sf(lambda * a) - gamma2_sf(lambda * b)) / lambda
}

/// ∫ₐᵇ (p₀ + p₁)(z) dz.
pub(crate) fn integral_open(lambda: f64, a: f64, b: f64) -> f64 {
    let q = |z: f64| {
        let x = lambda * z;
        if x.is_infinite() {
            0.0
        } else {
            (-x).exp() * (2.0 + x)
        }
    };
    (q(a) - q(b)) / lambda
}

/// Root y₀ > 0 of 1 − e⁻ʸ(1 + y + y²) and κ₀ = y₀ e^{−y₀}.
fn kappa_zero_pair() -> (f64, f64) {
    static CELL: OnceLock<(f64, f64)> = OnceLock::new();
    *CELL.get_or_init(|| {
        let y0 = find_root(
            |y| gamma2_cdf(y) - y * y * (-y).exp(),
            Bracket { lo: 1.0, hi: 3.0 },
            &ToleranceConfig::tight(),
        )
        .expect("y0 is bracketed by [1, 3]");
        let k0 = y0 * (-y0).exp();
        assert!((k0 - 0.298426).abs() < 1e-5, "kappa_0 = {k0}");
        (y0, k0)
    })
}

/// λT at which the no-disclosure and no-information cutoffs coincide.
pub fn y_zero() -> f64 {
    kappa_zero_pair().0
}

/// Highest κ at which an uninformed principal invests on a long horizon.
pub fn kappa_zero() -> f64 {
    kappa_zero_pair().1
}

/// Cost-benefit cutoffs for a (λ, T) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSet {
    pub kappa_nd: f64,
    pub kappa_ni: f64,
    pub kappa_tilde: f64,
    pub kappa_fi: f64,
    /// e^{λT} > λT(λT + 1) + 1. When false, `kappa_nd` is set to `kappa_ni`.
    pub long_horizon: bool,
}

/// e^{x} > x(x+1) + 1, evaluated without overflow.
pub fn long_horizon_condition(x: f64) -> bool {
    // equivalent to e^{-x}(1 + x + x²) < 1
    x > 0.0 && (-x).exp() * (1.0 + x + x * x) < 1.0
}

pub fn cutoffs(params: &ProjectParams) -> Result<CutoffSet> {
    let x = params.lambda_t()?;
    let e = (-x).exp();
    let p2 = gamma2_cdf(x);
    let one_minus_e = -(-x).exp_m1();
    let long_horizon = long_horizon_condition(x);

    let kappa_ni = if x >= y_zero() { kappa_zero() } else { p2 / x };
    let kappa_nd = if long_horizon { x * e } else { kappa_ni };
    let kappa_tilde = p2 / (one_minus_e + p2);
    let kappa_fi = one_minus_e / (1.0 + one_minus_e);

    Ok(CutoffSet {
        kappa_nd,
        kappa_ni,
        kappa_tilde,
        kappa_fi,
        long_horizon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    #[serde(rename = "non-disclosure")]
    NonDisclosureInvestToT,
    PostponedDisclosure,
    InterimDeadline,
    Reject,
}

impl Regime {
    /// Position along the κ axis.
    pub fn index(self) -> usize {
        match self {
            Regime::NonDisclosureInvestToT => 0,
            Regime::PostponedDisclosure => 1,
            Regime::InterimDeadline => 2,
            Regime::Reject => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Regime::NonDisclosureInvestToT => "non-disclosure",
            Regime::PostponedDisclosure => "postponed-disclosure",
            Regime::InterimDeadline => "interim-deadline",
            Regime::Reject => "reject",
        }
    }
}

impl CutoffSet {
    /// Intervals: (0, κ^ND], (κ^ND, κ̃], (κ̃, κ^FI), [κ^FI, ∞).
    pub fn regime_of(&self, kappa: f64) -> Regime {
        if kappa <= self.kappa_nd {
            Regime::NonDisclosureInvestToT
        } else if kappa <= self.kappa_tilde {
            Regime::PostponedDisclosure
        } else if kappa < self.kappa_fi {
            Regime::InterimDeadline
        } else {
            Regime::Reject
        }
    }
}

pub fn classify(params: &ProjectParams) -> Result<Regime> {
    Ok(cutoffs(params)?.regime_of(params.kappa()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn base(lambda: f64, t: f64) -> ProjectParams {
        ProjectParams::new(lambda, 0.3, 1.0, t).unwrap()
    }

    #[test]
    fn beliefs_at_reference_dates() {
        let p = base(1.0, 2.0);
        let b0 = prior_beliefs(&p, 0.0);
        assert_eq!((b0.p0, b0.p1, b0.p2), (1.0, 0.0, 0.0));
        let b = prior_beliefs(&p, 2.0);
        assert_relative_eq!(b.p0, 0.13533528, epsilon = 1e-8);
        assert_relative_eq!(b.p1, 0.27067057, epsilon = 1e-8);
        assert_relative_eq!(b.p2, 0.59399415, epsilon = 1e-8);
        let inf = prior_beliefs(&p, f64::INFINITY);
        assert_eq!((inf.p0, inf.p1, inf.p2), (0.0, 0.0, 1.0));
        let far = prior_beliefs(&p, 800.0);
        assert_eq!(far.p2, 1.0);
    }

    #[test]
    fn small_time_completion_probability_has_full_precision() {
        // direct series x²/2 − x³/3 at x = 1e-4
        let x: f64 = 1e-4;
        assert_relative_eq!(gamma2_cdf(x), x * x / 2.0 - x.powi(3) / 3.0 + x.powi(4) / 8.0, max_relative = 1e-12);
        for &x in &[0.05f64, 0.0999, 0.1, 0.1001, 0.5] {
            let naive = 1.0 - (-x).exp() * (1.0 + x);
            assert_relative_eq!(gamma2_cdf(x), naive, max_relative = 1e-12);
        }
    }

    #[test]
    fn posterior_examples() {
        assert_eq!(posterior_q1_no_stop(&base(1.0, 2.0), 0.0), 0.0);
        assert_eq!(posterior_q1_no_stop(&base(1.0, 2.0), 1.0), 0.5);
        let p = base(2.0, 2.0);
        let b = prior_beliefs(&p, 3.0);
        assert_relative_eq!(posterior_q1_no_stop(&p, 3.0), b.p1 / (b.p0 + b.p1), epsilon = 1e-15);
        assert_relative_eq!(posterior_q1_no_stop(&p, 3.0), 6.0 / 7.0, epsilon = 1e-15);
    }

    #[test]
    fn kappa_zero_matches_printed_constant() {
        assert!((y_zero() - 1.79328).abs() < 1e-5);
        assert!((kappa_zero() - 0.298426).abs() < 1e-5);
        assert_relative_eq!(y_zero(), 1.79328213290, epsilon = 1e-10);
    }

    #[test]
    fn cutoffs_at_reference_point() {
        let k = cutoffs(&base(1.0, 2.0)).unwrap();
        assert!(k.long_horizon);
        assert_relative_eq!(k.kappa_nd, 0.27067057, epsilon = 1e-8);
        assert_relative_eq!(k.kappa_ni, 0.2984256, epsilon = 1e-7);
        assert_relative_eq!(k.kappa_tilde, 0.40722, epsilon = 1e-5);
        assert_relative_eq!(k.kappa_fi, 0.46372, epsilon = 1e-5);
        // printed form, evaluated where it does not overflow
        let x: f64 = 2.0;
        let printed = (1.0 - x.exp() + x) / (2.0 - 2.0 * x.exp() + x);
        assert_relative_eq!(k.kappa_tilde, printed, epsilon = 1e-14);
    }

    #[test]
    fn cutoffs_limits() {
        let k = cutoffs(&base(1.0, 50.0)).unwrap();
        assert!((k.kappa_fi - 0.5).abs() < 1e-12);
        let k = cutoffs(&base(1.0, 800.0)).unwrap();
        assert!(k.kappa_tilde.is_finite() && (k.kappa_tilde - 0.5).abs() < 1e-12);
        assert!(matches!(cutoffs(&base(1.0, f64::INFINITY)), Err(Error::InfiniteHorizon)));
    }

    #[test]
    fn short_horizon_uses_the_degenerate_cutoff() {
        // e^{1.5} = 4.48 < 1.5·2.5 + 1 = 4.75
        let p = base(1.0, 1.5);
        let k = cutoffs(&p).unwrap();
        assert!(!k.long_horizon);
        assert_eq!(k.kappa_nd, k.kappa_ni);
        assert_relative_eq!(k.kappa_ni, gamma2_cdf(1.5) / 1.5, epsilon = 1e-15);
        assert!(k.kappa_ni < k.kappa_tilde && k.kappa_tilde < k.kappa_fi);
    }

    #[test]
    fn classify_examples() {
        let r = |kappa| classify(&ProjectParams::from_kappa(1.0, kappa, 1.0, 2.0).unwrap()).unwrap();
        assert_eq!(r(0.2), Regime::NonDisclosureInvestToT);
        assert_eq!(r(0.35), Regime::PostponedDisclosure);
        assert_eq!(r(0.44), Regime::InterimDeadline);
        assert_eq!(r(0.6), Regime::Reject);
        let k = cutoffs(&base(1.0, 2.0)).unwrap();
        assert_eq!(k.regime_of(k.kappa_nd), Regime::NonDisclosureInvestToT);
        assert_eq!(k.regime_of(k.kappa_tilde), Regime::PostponedDisclosure);
        assert_eq!(k.regime_of(k.kappa_fi), Regime::Reject);
    }

    #[test]
    fn params_validation_and_serde() {
        assert!(ProjectParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(ProjectParams::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(ProjectParams::new(1.0, 1.0, f64::NAN, 1.0).is_err());
        assert!(ProjectParams::new(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(ProjectParams::new(1.0, 1.0, 1.0, 1.0).unwrap().with_preferences(0.0, 0.0, 1.0).is_err());
        assert!(ProjectParams::new(1.0, 1.0, 1.0, 1.0).unwrap().with_preferences(-0.1, 1.0, 1.0).is_err());

        let p: ProjectParams = serde_json::from_str(r#"{"lambda":1,"c":0.44,"v":1,"T":2}"#).unwrap();
        assert!(p.is_baseline());
        assert_relative_eq!(p.kappa(), 0.44);
        let back: ProjectParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(p, back);

        let inf: ProjectParams = serde_json::from_str(r#"{"lambda":1,"c":0.3,"v":1,"T":"inf"}"#).unwrap();
        assert!(inf.is_infinite_horizon());
        assert!(serde_json::to_string(&inf).unwrap().contains(r#""T":"inf""#));

        assert!(serde_json::from_str::<ProjectParams>(r#"{"lambda":1,"c":1,"v":1,"T":2,"kappa":1}"#).is_err());
    }

    #[test]
    fn p1_peaks_at_one_over_lambda() {
        let p = base(2.0, 5.0);
        let peak = prior_beliefs(&p, 0.5).p1;
        assert_relative_eq!(peak, (-1.0f64).exp(), epsilon = 1e-15);
        for i in 0..=1000 {
            let t = 5.0 * i as f64 / 1000.0;
            assert!(prior_beliefs(&p, t).p1 <= peak + 1e-16);
        }
    }

    proptest! {
        #[test]
        fn beliefs_normalized_and_monotone(lambda in 0.1..5.0f64, t in 0.0..20.0f64, dt in 0.0..1.0f64) {
            let p = base(lambda, 1.0);
            let b = prior_beliefs(&p, t);
            prop_assert!(b.p0 >= 0.0 && b.p1 >= 0.0 && b.p2 >= 0.0);
            prop_assert!((b.p0 + b.p1 + b.p2 - 1.0).abs() <= 1e-12);
            prop_assert!(prior_beliefs(&p, t + dt).p2 >= b.p2);
        }

        #[test]
        fn cutoff_ordering(lambda in 0.2..5.0f64, t in 0.2..6.0f64) {
            // beyond λT ≈ 35 the upper cutoffs agree with 1/2 to the last bit
            let k = cutoffs(&base(lambda, t)).unwrap();
            prop_assert!(k.kappa_ni < k.kappa_tilde);
            prop_assert!(k.kappa_tilde < k.kappa_fi);
            prop_assert!(k.kappa_fi < 0.5);
            prop_assert!(k.kappa_nd <= k.kappa_ni);
            if k.long_horizon && lambda * t > y_zero() + 1e-9 {
                prop_assert!(k.kappa_nd > 0.0 && k.kappa_nd < k.kappa_ni);
            }
        }

        #[test]
        fn classify_monotone_in_kappa(lambda in 0.2..4.0f64, t in 0.5..8.0f64, k1 in 0.0..0.7f64, k2 in 0.0..0.7f64) {
            let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
            let k = cutoffs(&base(lambda, t)).unwrap();
            prop_assert!(k.regime_of(lo).index() <= k.regime_of(hi).index());
        }
    }
}

use super::Policy;
use crate::benchmarks::{s_bar_ni, solve_full_info, value_until_completion};
use crate::error::{Error, Result};
use crate::model::{cutoffs, integral_open, integral_p1, Regime, ProjectParams};
use crate::numerics::{find_root, lambert_w0, lambert_wm1, Bracket, ToleranceConfig};

/// F(S) = ∫_L^S (p₁ − κ) + ∫_S^T (p₁ − κ(p₀ + p₁)); strictly decreasing in S.
fn postponed_balance(params: &ProjectParams, lower: f64, s: f64) -> f64 {
    let (l, kappa, t_max) = (params.lambda, params.kappa(), params.t_max);
    integral_p1(l, lower, t_max) - kappa * (s - lower) - kappa * integral_open(l, s, t_max)
}

/// Start date of disclosure for κ ∈ (κ^ND, κ̃].
///
/// The balance is anchored at S̄^NI while an uninformed principal would still
/// invest (κ ≤ κ^NI) and at 0 above that.
pub fn solve_postponed_start(params: &ProjectParams) -> Result<Policy> {
    let t_max = params.finite_horizon()?;
    let k = cutoffs(params)?;
    let kappa = params.kappa();
    if !(kappa > k.kappa_nd && kappa <= k.kappa_tilde) {
        return Err(Error::Regime {
            regime: Regime::PostponedDisclosure.label(),
            kappa,
            lo: k.kappa_nd,
            hi: k.kappa_tilde,
        });
    }
    let lower = if kappa <= k.kappa_ni {
        s_bar_ni(params).filter(|&s| s < t_max).ok_or(Error::Domain {
            function: "solve_postponed_start",
            value: kappa,
            domain: "S_bar < T",
        })?
    } else {
        0.0
    };
    let f = |s| postponed_balance(params, lower, s);
    if f(lower) <= 0.0 {
        // κ = κ̃: nothing left to postpone
        return Ok(Policy::PostponedDisclosure { s_star: lower });
    }
    let s_star = find_root(f, Bracket::new(lower, t_max)?, &ToleranceConfig::tight())?;
    Ok(Policy::PostponedDisclosure { s_star })
}

fn interim_bounds(params: &ProjectParams) -> Result<f64> {
    params.finite_horizon()?;
    let k = cutoffs(params)?;
    let kappa = params.kappa();
    if !(kappa > k.kappa_tilde && kappa < k.kappa_fi) {
        return Err(Error::Regime {
            regime: Regime::InterimDeadline.label(),
            kappa,
            lo: k.kappa_tilde,
            hi: k.kappa_fi,
        });
    }
    Ok(kappa)
}

/// Agent-preferred interim deadline, from the Lambert W closed form
/// λ S = γ + W₀(−γ e^{−γ}) with γ = e^{λT}(1 − 2κ)/(1 − κ).
pub fn solve_interim_deadline(params: &ProjectParams) -> Result<Policy> {
    let kappa = interim_bounds(params)?;
    let t_max = params.t_max;
    // ln γ = λ S₀^P before clamping
    let ln_gamma = params.lambda * t_max + (-kappa / (1.0 - kappa)).ln_1p();
    if !(ln_gamma > 0.0) {
        return Err(Error::Domain {
            function: "solve_interim_deadline",
            value: ln_gamma.exp(),
            domain: "gamma > 1",
        });
    }
    let gamma = ln_gamma.exp();
    let w = lambert_w0(-gamma * (-gamma).exp())?;
    let s0_a = ((gamma + w) / params.lambda).clamp(0.0, t_max);
    Ok(Policy::InterimDeadline { s0_a })
}

/// The same deadline as the root of the binding participation constraint
///
/// (c/λ)e^{−λT}[2(e^{λ(T−S)} − 1) − λ(T−S)] − v e^{−λT}[(e^{λ(T−S)} − 1) − λ(T−S)] = −V(τ₂),
///
/// searched on [S₀^P, T] where the left side minus the right is the
/// principal's value of deadline S.
pub fn interim_deadline_by_root(params: &ProjectParams) -> Result<f64> {
    interim_bounds(params)?;
    let (l, c, v, t_max) = (params.lambda, params.c, params.v, params.t_max);
    let v_tau2 = value_until_completion(params)?;
    let e_t = (-l * t_max).exp();
    let g = |s: f64| {
        let x = l * (t_max - s);
        let g1 = x.exp_m1();
        (c / l) * e_t * (2.0 * g1 - x) - v * e_t * (g1 - x) + v_tau2
    };
    let s0_p = solve_full_info(params)?.s0_p;
    find_root(g, Bracket::new(s0_p, t_max)?, &ToleranceConfig::tight())
}

/// Delayed disclosure starts at S̄^NI; needs κ ≤ κ^NI and S̄^NI < T.
pub fn solve_delayed_disclosure(params: &ProjectParams) -> Result<Policy> {
    let t_max = params.finite_horizon()?;
    let k = cutoffs(params)?;
    let kappa = params.kappa();
    if kappa > k.kappa_ni {
        return Err(Error::Regime {
            regime: "delayed-disclosure",
            kappa,
            lo: 0.0,
            hi: k.kappa_ni,
        });
    }
    match s_bar_ni(params) {
        Some(start) if start < t_max => Ok(Policy::DelayedDisclosure { start }),
        _ => Err(Error::Domain {
            function: "solve_delayed_disclosure",
            value: kappa,
            domain: "S_bar < T",
        }),
    }
}

/// π(t): the completion date disclosed at t. Solves
/// e^{−λ(t−π)} λt / (1 + λπ) = κ for π ∈ [0, t].
pub fn delayed_disclosure_schedule(params: &ProjectParams, t: f64) -> Result<f64> {
    let s_bar = s_bar_ni(params).ok_or(Error::Domain {
        function: "delayed_disclosure_schedule",
        value: params.kappa(),
        domain: "kappa <= 1/e",
    })?;
    if !(t >= s_bar * (1.0 - 1e-12)) {
        return Err(Error::Domain {
            function: "delayed_disclosure_schedule",
            value: t,
            domain: "t >= S_bar",
        });
    }
    let x = params.lambda * t.max(s_bar);
    let arg = -(x / params.kappa()) * (-x - 1.0).exp();
    let u = -lambert_wm1(arg)?;
    Ok(((u - 1.0) / params.lambda).max(0.0))
}

/// Date at which a completion at `tau2` is disclosed, capped at T.
pub fn delayed_stop_date(params: &ProjectParams, tau2: f64) -> Result<f64> {
    let t_max = params.finite_horizon()?;
    let y = params.lambda * tau2;
    let arg = -params.kappa() * (1.0 + y) * (-y).exp();
    if arg == 0.0 {
        return Ok(t_max);
    }
    Ok((-lambert_wm1(arg)? / params.lambda).min(t_max))
}

/// Agent-optimal mechanism for the regime of `params`; `None` when the
/// project is rejected.
pub fn optimal_policy(params: &ProjectParams) -> Result<Option<Policy>> {
    let k = cutoffs(params)?;
    Ok(match k.regime_of(params.kappa()) {
        Regime::NonDisclosureInvestToT => Some(Policy::NonDisclosure),
        Regime::PostponedDisclosure => Some(solve_postponed_start(params)?),
        Regime::InterimDeadline => Some(solve_interim_deadline(params)?),
        Regime::Reject => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::solve_no_info;
    use crate::numerics::integrate;
    use approx::assert_relative_eq;

    fn at(kappa: f64, t: f64) -> ProjectParams {
        ProjectParams::from_kappa(1.0, kappa, 1.0, t).unwrap()
    }

    fn s_star(p: &ProjectParams) -> f64 {
        match solve_postponed_start(p).unwrap() {
            Policy::PostponedDisclosure { s_star } => s_star,
            other => panic!("{other:?}"),
        }
    }

    fn s0_a(p: &ProjectParams) -> f64 {
        match solve_interim_deadline(p).unwrap() {
            Policy::InterimDeadline { s0_a } => s0_a,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn postponed_start_balances_by_quadrature() {
        let p = at(0.35, 2.0);
        let s = s_star(&p);
        assert!(s > 0.0 && s < 2.0);
        let cfg = ToleranceConfig::tight();
        let before = integrate(|z| z * (-z).exp() - 0.35, 0.0, s, &cfg).unwrap();
        let after = integrate(|z: f64| (-z).exp() * (z - 0.35 * (1.0 + z)), s, 2.0, &cfg).unwrap();
        assert!((before + after).abs() < 1e-12, "{}", before + after);
    }

    #[test]
    fn postponed_start_after_s_bar_on_long_horizon() {
        let p = at(0.28, 10.0);
        let k = cutoffs(&p).unwrap();
        assert!(0.28 > k.kappa_nd && 0.28 <= k.kappa_ni);
        let s_bar = solve_no_info(&p).unwrap().s_bar_ni.unwrap();
        let s = s_star(&p);
        assert!(s > s_bar);
        let cfg = ToleranceConfig::tight();
        let before = integrate(|z| 0.28 - z * (-z).exp(), s_bar, s, &cfg).unwrap();
        let after = integrate(|z: f64| (-z).exp() * (z - 0.28 * (1.0 + z)), s, 10.0, &cfg).unwrap();
        assert_relative_eq!(before, after, epsilon = 1e-12);
    }

    #[test]
    fn postponed_start_vanishes_at_upper_cutoff() {
        let k = cutoffs(&at(0.3, 2.0)).unwrap();
        assert!(s_star(&at(k.kappa_tilde, 2.0)) < 1e-6);
        assert!(matches!(solve_postponed_start(&at(0.2, 2.0)), Err(Error::Regime { .. })));
        assert!(matches!(solve_postponed_start(&at(0.44, 2.0)), Err(Error::Regime { .. })));
    }

    #[test]
    fn interim_deadline_reference_point() {
        let p = at(0.44, 2.0);
        let gamma = 2f64.exp() * 0.12 / 0.56;
        assert_relative_eq!(gamma, 1.5833691640, epsilon = 1e-9);
        let s = s0_a(&p);
        // γ(1 − e^{−y}) = y at y = λS
        assert_relative_eq!(gamma * (1.0 - (-s).exp()), s, epsilon = 1e-13);
        assert_relative_eq!(s, 1.0021051205, epsilon = 1e-9);
        assert_relative_eq!(interim_deadline_by_root(&p).unwrap(), s, epsilon = 1e-10);
        assert!(s >= solve_full_info(&p).unwrap().s0_p);
    }

    #[test]
    fn interim_deadline_edges() {
        let k = cutoffs(&at(0.3, 2.0)).unwrap();
        let near_fi = s0_a(&at(k.kappa_fi - 1e-9, 2.0));
        assert!(near_fi < 1e-3, "{near_fi}");
        let near_tilde = s0_a(&at(k.kappa_tilde + 1e-9, 2.0));
        assert!(near_tilde > 1.9, "{near_tilde}");
        assert!(matches!(solve_interim_deadline(&at(0.35, 2.0)), Err(Error::Regime { .. })));
        assert!(matches!(solve_interim_deadline(&at(0.5, 2.0)), Err(Error::Regime { .. })));
    }

    #[test]
    fn schedule_defining_relation() {
        let p = at(0.2, 10.0);
        let s_bar = s_bar_ni(&p).unwrap();
        assert!(delayed_disclosure_schedule(&p, s_bar).unwrap().abs() < 1e-7);
        // find_root oracle on e^{−(4−π)}·4/(1+π) = 0.2
        let oracle = find_root(
            |q: f64| (-(4.0 - q)).exp() * 4.0 / (1.0 + q) - 0.2,
            Bracket::new(0.0, 4.0).unwrap(),
            &ToleranceConfig::tight(),
        )
        .unwrap();
        assert_relative_eq!(delayed_disclosure_schedule(&p, 4.0).unwrap(), oracle, epsilon = 1e-12);
        assert!(delayed_disclosure_schedule(&p, s_bar - 0.1).is_err());

        let mut prev_pi = -1.0;
        let mut prev_delay = f64::INFINITY;
        for i in 1..=200 {
            let t = s_bar + (10.0 - s_bar) * i as f64 / 200.0;
            let pi = delayed_disclosure_schedule(&p, t).unwrap();
            assert!(pi < t && pi > prev_pi);
            assert!(t - pi < prev_delay);
            prev_pi = pi;
            prev_delay = t - pi;
            assert_relative_eq!(delayed_stop_date(&p, pi).unwrap(), t, epsilon = 1e-9);
        }
    }

    #[test]
    fn schedule_at_other_rates() {
        let p = ProjectParams::from_kappa(2.5, 0.15, 1.0, 6.0).unwrap();
        let t = 3.0;
        let pi = delayed_disclosure_schedule(&p, t).unwrap();
        let l = p.lambda;
        let q1 = (-l * (t - pi)).exp() * l * t / (1.0 + l * pi);
        assert_relative_eq!(q1, 0.15, epsilon = 1e-12);
    }

    #[test]
    fn optimal_policy_by_regime() {
        assert_eq!(optimal_policy(&at(0.2, 2.0)).unwrap(), Some(Policy::NonDisclosure));
        assert!(matches!(optimal_policy(&at(0.35, 2.0)).unwrap(), Some(Policy::PostponedDisclosure { .. })));
        assert!(matches!(optimal_policy(&at(0.44, 2.0)).unwrap(), Some(Policy::InterimDeadline { .. })));
        assert_eq!(optimal_policy(&at(0.6, 2.0)).unwrap(), None);
    }
}

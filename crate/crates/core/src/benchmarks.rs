//! The two benchmarks: a principal who never learns the state and one who
//! observes it directly, plus the conditional expectations that the policy
//! module builds on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{cutoffs, gamma2_cdf, prior_beliefs, ProjectParams};
use crate::numerics::lambert_wm1;

/// Uninformed principal: funds until a deterministic date.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoInfoSolution {
    /// Stopping date; 0 when the principal does not invest.
    pub s_ni: f64,
    /// Later root of p₁(t) = κ; `None` for κ > 1/e.
    pub s_bar_ni: Option<f64>,
    /// Principal's value.
    pub v_ni: f64,
    pub invests: bool,
}

/// Later root of λt e^{−λt} = κ, where funding an uninformed project stops
/// paying off.
pub fn s_bar_ni(params: &ProjectParams) -> Option<f64> {
    let kappa = params.kappa();
    if kappa > (-1.0f64).exp() {
        return None;
    }
    lambert_wm1(-kappa).ok().map(|w| -w / params.lambda)
}

/// Gain v·p₂(s) − c·s of funding blind over [0, s].
fn blind_gain(params: &ProjectParams, s: f64) -> f64 {
    params.v * gamma2_cdf(params.lambda * s) - params.c * s
}

pub fn solve_no_info(params: &ProjectParams) -> Result<NoInfoSolution> {
    let t_max = params.finite_horizon()?;
    let k = cutoffs(params)?;
    let s_bar = s_bar_ni(params);
    let invests = params.kappa() <= k.kappa_ni;
    let s_ni = match (invests, s_bar) {
        (false, _) => 0.0,
        (true, Some(s)) if s < t_max => s,
        (true, _) => t_max,
    };
    let v_ni = if invests { blind_gain(params, s_ni).max(0.0) } else { 0.0 };
    Ok(NoInfoSolution {
        s_ni,
        s_bar_ni: s_bar,
        v_ni,
        invests,
    })
}

/// T ∧ S̄^NI, the last date an uninformed principal wants to fund.
pub fn no_info_horizon(params: &ProjectParams) -> Result<f64> {
    let t_max = params.finite_horizon()?;
    let s_bar = s_bar_ni(params).ok_or(Error::Domain {
        function: "no_info_horizon",
        value: params.kappa(),
        domain: "kappa <= 1/e",
    })?;
    Ok(t_max.min(s_bar))
}

/// Value at t of funding blind until T ∧ S̄^NI.
pub fn no_info_continuation(params: &ProjectParams, t: f64) -> Result<f64> {
    let end = no_info_horizon(params)?;
    if !(t >= 0.0 && t <= end * (1.0 + 1e-12)) {
        return Err(Error::Domain {
            function: "no_info_continuation",
            value: t,
            domain: "0 <= t <= min(T, S_bar)",
        });
    }
    let t = t.min(end);
    let b_end = prior_beliefs(params, end);
    let b_t = prior_beliefs(params, t);
    Ok((b_end.p2 - b_t.p2) * params.v - (end - t) * params.c)
}

/// Fully informed principal: stops at `s0_p` if stage one is still open,
/// otherwise at τ₂ ∧ T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullInfoSolution {
    pub s0_p: f64,
    pub invests: bool,
}

pub fn solve_full_info(params: &ProjectParams) -> Result<FullInfoSolution> {
    let t_max = params.finite_horizon()?;
    let kappa = params.kappa();
    let invests = kappa <= cutoffs(params)?.kappa_fi;
    let s0_p = if invests && kappa < 0.5 {
        // ln((1 − 2κ)/(1 − κ)) = ln(1 − κ/(1 − κ))
        (t_max + (-kappa / (1.0 - kappa)).ln_1p() / params.lambda).clamp(0.0, t_max)
    } else {
        0.0
    };
    Ok(FullInfoSolution { s0_p, invests })
}

/// e^{−λ(T−t)} and λ(T−t), with the unbounded horizon mapped to (0, ∞).
fn remaining(params: &ProjectParams, t: f64) -> (f64, f64) {
    let x = params.lambda * (params.t_max - t).max(0.0);
    if x.is_infinite() {
        (0.0, f64::INFINITY)
    } else {
        ((-x).exp(), x)
    }
}

/// Informed principal's value in state 1: (v − c/λ)(1 − e^{−λ(T−t)}).
pub fn full_info_value_state1(params: &ProjectParams, t: f64) -> f64 {
    let (e, _) = remaining(params, t);
    (params.v - params.c / params.lambda) * (1.0 - e)
}

/// E[τ₂ ∧ T − t | x_t = 1].
pub fn exp_stop_given_state1(params: &ProjectParams, t: f64) -> f64 {
    let (e, _) = remaining(params, t);
    (1.0 - e) / params.lambda
}

/// E[τ₂ ∧ T − t | x_t = 0].
pub fn exp_stop_given_state0(params: &ProjectParams, t: f64) -> f64 {
    let (e, x) = remaining(params, t);
    let tail = if x.is_infinite() { 0.0 } else { e * x / params.lambda };
    2.0 / params.lambda * (1.0 - e) - tail
}

/// v · P(τ₂ ≤ T | x_t = 0).
pub fn surplus_given_state0(params: &ProjectParams, t: f64) -> f64 {
    let (_, x) = remaining(params, t);
    params.v * gamma2_cdf(x)
}

/// Principal's value when funding runs until τ₂ ∧ T.
pub fn value_until_completion(params: &ProjectParams) -> Result<f64> {
    params.finite_horizon()?;
    Ok(surplus_given_state0(params, 0.0) - params.c * exp_stop_given_state0(params, 0.0))
}

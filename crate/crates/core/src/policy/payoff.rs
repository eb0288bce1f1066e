use serde::{Deserialize, Serialize};

use super::{phases, PhaseKind, Policy};
use crate::benchmarks::{exp_stop_given_state0, solve_full_info, solve_no_info, surplus_given_state0};
use crate::error::Result;
use crate::model::{gamma2_cdf, integral_open, ProjectParams};
use crate::numerics::{integrate, ToleranceConfig};

/// Closed-form payoffs under the baseline preferences (r = 0, α = β = 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticPayoffs {
    /// c · E[τ].
    pub w_agent: f64,
    /// v · P(x_τ = 2) − c · E[τ].
    pub v_principal: f64,
    pub e_tau: f64,
    pub p_complete: f64,
}

/// E[τ] and P(x_τ = 2) under a deterministic interim deadline `s0`.
fn deadline_moments(params: &ProjectParams, s0: f64) -> (f64, f64) {
    let drop = (-params.lambda * s0).exp();
    let e_tau = exp_stop_given_state0(params, 0.0) - drop * exp_stop_given_state0(params, s0);
    let p = (surplus_given_state0(params, 0.0) - drop * surplus_given_state0(params, s0)) / params.v;
    (e_tau, p)
}

pub fn analytic_payoffs(params: &ProjectParams, policy: &Policy) -> Result<AnalyticPayoffs> {
    let t_max = params.finite_horizon()?;
    let l = params.lambda;
    let (e_tau, p_complete) = match *policy {
        Policy::NonDisclosure => {
            let s = solve_no_info(params)?.s_ni;
            (s, gamma2_cdf(l * s))
        }
        Policy::PostponedDisclosure { s_star } => {
            phases(params, policy)?;
            (s_star + integral_open(l, s_star, t_max), gamma2_cdf(l * t_max))
        }
        Policy::InterimDeadline { s0_a } => {
            phases(params, policy)?;
            deadline_moments(params, s0_a)
        }
        Policy::FullInformation => {
            let fi = solve_full_info(params)?;
            deadline_moments(params, if fi.invests { fi.s0_p } else { 0.0 })
        }
        Policy::DelayedDisclosure { start } => {
            phases(params, policy)?;
            let tail = integrate(
                |s| PhaseKind::Delayed.survival(params, s).unwrap_or(f64::NAN),
                start,
                t_max,
                &ToleranceConfig::tight(),
            )?;
            (start + tail, gamma2_cdf(l * t_max))
        }
    };
    Ok(AnalyticPayoffs {
        w_agent: params.c * e_tau,
        v_principal: params.v * p_complete - params.c * e_tau,
        e_tau,
        p_complete,
    })
}

/// Agent's payoff c · E[τ].
pub fn agent_payoff(params: &ProjectParams, policy: &Policy) -> Result<f64> {
    Ok(analytic_payoffs(params, policy)?.w_agent)
}

/// Funding the agent gives up to a deadline at `s`: c · P(x_s = 0) · E[τ₂ ∧ T − s | x_s = 0].
pub fn deadline_agent_loss(params: &ProjectParams, s: f64) -> f64 {
    params.c * (-params.lambda * s).exp() * exp_stop_given_state0(params, s)
}

use serde::{Deserialize, Serialize};

use crate::benchmarks::{exp_stop_given_state0, exp_stop_given_state1, surplus_given_state0};
use crate::error::{Error, Result};
use crate::model::{gamma2_sf, posterior_q1_no_stop, ProjectParams};
use crate::numerics::{integrate, ToleranceConfig};

/// Both sides of the surplus and value decompositions under a deterministic
/// interim deadline `s`, viewed from date `t ≤ s`:
///
/// ```text
/// SV_t(τ) = SV_t(τ₂) − P(x_s = 0 | t < τ) · SV_{s|0}(τ₂)
///  V_t(τ) =  V_t(τ₂) − P(x_s = 0 | t < τ) ·  V_{s|0}(τ₂)
/// ```
///
/// The left sides integrate over the stage-one arrival date directly; the
/// right sides use the benchmark conditional expectations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionCheck {
    pub surplus_lhs: f64,
    pub surplus_rhs: f64,
    pub value_lhs: f64,
    pub value_rhs: f64,
}

impl DecompositionCheck {
    pub fn max_abs_gap(&self) -> f64 {
        (self.surplus_lhs - self.surplus_rhs)
            .abs()
            .max((self.value_lhs - self.value_rhs).abs())
    }
}

pub fn decomposition_check(params: &ProjectParams, s: f64, t: f64) -> Result<DecompositionCheck> {
    let t_max = params.finite_horizon()?;
    if !(0.0 <= t && t <= s && s <= t_max) {
        return Err(Error::InvalidParams(format!("need 0 <= t <= s <= T, got t = {t}, s = {s}")));
    }
    let (l, v, c) = (params.lambda, params.v, params.c);
    let cfg = ToleranceConfig::tight();
    let open = gamma2_sf(l * t);

    // Direct expansion over τ₁ = u.
    let density = |u: f64| l * (-l * u).exp();
    let completes = |u: f64| (-l * (t - u).max(0.0)).exp() - (-l * (t_max - u)).exp();
    let remaining = |u: f64| {
        if u <= t {
            (-l * (t - u)).exp() * (1.0 - (-l * (t_max - t)).exp()) / l
        } else {
            (u - t) + (1.0 - (-l * (t_max - u)).exp()) / l
        }
    };
    let piecewise = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
        Ok(integrate(f, 0.0, t, &cfg)? + integrate(f, t, s, &cfg)?)
    };
    let completion_mass = piecewise(&|u| density(u) * completes(u))?;
    let time_mass = (-l * s).exp() * (s - t) + piecewise(&|u| density(u) * remaining(u))?;
    let surplus_lhs = v * completion_mass / open;
    let value_lhs = surplus_lhs - c * time_mass / open;

    // Benchmark building blocks.
    let q1 = posterior_q1_no_stop(params, t);
    let q0 = 1.0 - q1;
    let surplus_tau2 = q0 * surplus_given_state0(params, t) + q1 * v * (1.0 - (-l * (t_max - t)).exp());
    let time_tau2 = q0 * exp_stop_given_state0(params, t) + q1 * exp_stop_given_state1(params, t);
    let value_tau2 = surplus_tau2 - c * time_tau2;
    let p_state0 = (-l * s).exp() / open;
    let surplus_s0 = surplus_given_state0(params, s);
    let value_s0 = surplus_s0 - c * exp_stop_given_state0(params, s);

    Ok(DecompositionCheck {
        surplus_lhs,
        surplus_rhs: surplus_tau2 - p_state0 * surplus_s0,
        value_lhs,
        value_rhs: value_tau2 - p_state0 * value_s0,
    })
}

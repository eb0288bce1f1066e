//! Agent-optimal disclosure mechanisms and the checks that certify them.
//!
//! A policy is a recommendation rule for when the principal should stop
//! funding. Every mechanism here is described, for valuation purposes, by a
//! sequence of phases on which the survival function of the stopping date,
//! `Surv(s) = P(τ > s)`, and the joint mass `J(s) = P(x_s = 1, τ > s)` have
//! simple closed forms. The principal's continuation value is then
//!
//! ```text
//! V_t · Surv(t) = v λ ∫_t^T (J(s) − κ Surv(s)) ds
//! ```
//!
//! Values at a phase boundary are left limits.

mod decompose;
mod obedience;
mod payoff;
mod solve;
mod value;

pub use decompose::{decomposition_check, DecompositionCheck};
pub use obedience::{verify_obedience, ObedienceReport, OBEDIENCE_TOL};
pub use payoff::{agent_payoff, analytic_payoffs, deadline_agent_loss, AnalyticPayoffs};
pub use solve::{
    delayed_disclosure_schedule, delayed_stop_date, interim_deadline_by_root, optimal_policy,
    solve_delayed_disclosure, solve_interim_deadline, solve_postponed_start,
};
pub use value::{continuation_value, continuation_value_ode, continuation_values_ode, posterior_q1};

use serde::{Deserialize, Serialize};

use crate::benchmarks::{s_bar_ni, solve_full_info, solve_no_info};
use crate::error::{Error, Result};
use crate::model::{gamma2_sf, ProjectParams};

/// Disclosure mechanisms. Payload-free variants take their dates from the
/// project parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Policy {
    /// No information; the principal funds until the uninformed stopping date.
    NonDisclosure,
    /// Silence until `s_star`; afterwards stop as soon as stage two is done.
    PostponedDisclosure { s_star: f64 },
    /// Stop at `s0_a` if stage one is still open, else at completion.
    InterimDeadline { s0_a: f64 },
    /// Silence until `start`; afterwards completion at date π(t) is
    /// disclosed at t.
    DelayedDisclosure { start: f64 },
    /// The principal observes the state.
    FullInformation,
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::NonDisclosure => "non-disclosure",
            Policy::PostponedDisclosure { .. } => "postponed-disclosure",
            Policy::InterimDeadline { .. } => "interim-deadline",
            Policy::DelayedDisclosure { .. } => "delayed-disclosure",
            Policy::FullInformation => "full-information",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum PhaseKind {
    /// No stop before the phase ends: Surv = 1, J = p₁.
    Blind,
    /// Stop at τ₂: Surv = p₀ + p₁, J = p₁.
    Exposed,
    /// Past a deadline `s0` that stopped every state-0 path:
    /// Surv = J = λ s0 e^{−λs}.
    AfterDeadline { s0: f64 },
    /// Completion at π(s) disclosed at s: Surv = (p₀ + p₁)(π(s)), J = p₁.
    Delayed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Phase {
    pub start: f64,
    pub end: f64,
    pub kind: PhaseKind,
}

fn check_date(name: &str, s: f64, t_max: f64) -> Result<()> {
    if s.is_finite() && (0.0..=t_max).contains(&s) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} = {s} must lie in [0, {t_max}]")))
    }
}

/// Phases of `policy`, in time order, covering [0, last funded date].
/// Empty when the principal never funds.
pub(crate) fn phases(params: &ProjectParams, policy: &Policy) -> Result<Vec<Phase>> {
    let t_max = params.finite_horizon()?;
    let mut out = Vec::with_capacity(2);
    let mut push = |start: f64, end: f64, kind| {
        if end > start {
            out.push(Phase { start, end, kind });
        }
    };
    let deadline = |s0: f64, push: &mut dyn FnMut(f64, f64, PhaseKind)| {
        if s0 > 0.0 {
            push(0.0, s0, PhaseKind::Exposed);
            push(s0, t_max, PhaseKind::AfterDeadline { s0 });
        }
    };
    match *policy {
        Policy::NonDisclosure => {
            let s = solve_no_info(params)?.s_ni;
            push(0.0, s, PhaseKind::Blind);
        }
        Policy::PostponedDisclosure { s_star } => {
            check_date("s_star", s_star, t_max)?;
            push(0.0, s_star, PhaseKind::Blind);
            push(s_star, t_max, PhaseKind::Exposed);
        }
        Policy::InterimDeadline { s0_a } => {
            check_date("s0_a", s0_a, t_max)?;
            deadline(s0_a, &mut push);
        }
        Policy::FullInformation => {
            let fi = solve_full_info(params)?;
            deadline(if fi.invests { fi.s0_p } else { 0.0 }, &mut push);
        }
        Policy::DelayedDisclosure { start } => {
            check_date("start", start, t_max)?;
            let s_bar = s_bar_ni(params).ok_or_else(|| {
                Error::InvalidParams("delayed disclosure needs kappa <= 1/e".into())
            })?;
            if (start - s_bar).abs() > 1e-9 * s_bar.max(1.0) {
                return Err(Error::InvalidParams(format!(
                    "delayed disclosure starts at S_bar = {s_bar}, got {start}"
                )));
            }
            push(0.0, start, PhaseKind::Blind);
            push(start, t_max, PhaseKind::Delayed);
        }
    }
    Ok(out)
}

/// Dates within a few ulps past the last funded date are taken as that date.
pub(crate) fn snap_to_end(phases: &[Phase], t: f64) -> f64 {
    match phases.last() {
        Some(p) if t > p.end && t <= p.end + 4.0 * f64::EPSILON * p.end.max(1.0) => p.end,
        _ => t,
    }
}

/// Index of the phase holding t under the left-limit convention.
pub(crate) fn phase_index(phases: &[Phase], t: f64) -> Option<usize> {
    if phases.is_empty() || t < phases[0].start || t > phases[phases.len() - 1].end {
        return None;
    }
    Some(phases.iter().position(|p| t <= p.end).unwrap_or(phases.len() - 1))
}

impl PhaseKind {
    pub(crate) fn survival(&self, params: &ProjectParams, s: f64) -> Result<f64> {
        let l = params.lambda;
        Ok(match *self {
            PhaseKind::Blind => 1.0,
            PhaseKind::Exposed => gamma2_sf(l * s),
            PhaseKind::AfterDeadline { s0 } => l * s0 * (-l * s).exp(),
            PhaseKind::Delayed => gamma2_sf(l * delayed_disclosure_schedule(params, s)?),
        })
    }

    pub(crate) fn joint(&self, params: &ProjectParams, s: f64) -> f64 {
        let l = params.lambda;
        match *self {
            PhaseKind::AfterDeadline { s0 } => l * s0 * (-l * s).exp(),
            _ => l * s * (-l * s).exp(),
        }
    }
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::value::continuation_value_with;
use super::{phases, Phase, PhaseKind, Policy};
use crate::benchmarks::{s_bar_ni, solve_no_info};
use crate::error::{Error, Result};
use crate::model::{gamma2_cdf, ProjectParams};
use crate::numerics::lambert_w0;

/// Slack, in units of v, below which a continuation value counts as zero.
pub const OBEDIENCE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObedienceReport {
    pub min_continuation_value: f64,
    pub argmin_t: f64,
    pub grid_size: usize,
    /// Best gain from funding on without information after a recommended
    /// stop, maximized over stop events and positive durations. Stops in
    /// state 2 contribute their supremum, 0.
    pub post_stop_value: f64,
    pub feasible: bool,
}

/// Interior dates where v λ ∫_t (J − κ Surv) can have a local minimum:
/// sign changes of q₁ − κ.
fn critical_dates(params: &ProjectParams, p: &Phase) -> Vec<f64> {
    let (l, kappa) = (params.lambda, params.kappa());
    let mut out = Vec::new();
    match p.kind {
        PhaseKind::Blind => {
            if kappa <= (-1.0f64).exp() {
                if let Ok(w) = lambert_w0(-kappa) {
                    out.push(-w / l);
                }
                if let Some(s) = s_bar_ni(params) {
                    out.push(s);
                }
            }
        }
        PhaseKind::Exposed if kappa < 1.0 => out.push(kappa / (l * (1.0 - kappa))),
        _ => {}
    }
    out.retain(|&s| s > p.start && s < p.end);
    out
}

/// Best gain v p₂(d) − c d over d ∈ (0, horizon] for a principal who knows
/// the state is 0 and gets no further information.
fn blind_gain_from_state0(params: &ProjectParams, horizon: f64) -> f64 {
    if horizon <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let gain = |d: f64| params.v * gamma2_cdf(params.lambda * d) - params.c * d;
    let mut best = gain(horizon);
    if let Some(s) = s_bar_ni(params).filter(|&s| s < horizon) {
        best = best.max(gain(s));
    }
    best
}

fn post_stop_value(params: &ProjectParams, policy: &Policy, ph: &[Phase]) -> Result<f64> {
    let t_max = params.t_max;
    let (l, v, c) = (params.lambda, params.v, params.c);
    // Stops in state 2 are worth 0 at the supremum.
    let mut best = 0.0f64;
    match *policy {
        Policy::NonDisclosure => {
            let stop = solve_no_info(params)?.s_ni;
            if stop < t_max {
                // gain from prior beliefs at `stop` to any later date
                let at = |s: f64| v * gamma2_cdf(l * s) - c * s;
                let mut cand = at(t_max) - at(stop);
                if let Some(s) = s_bar_ni(params).filter(|&s| s > stop && s < t_max) {
                    cand = cand.max(at(s) - at(stop));
                }
                best = best.max(cand);
            }
        }
        Policy::InterimDeadline { .. } | Policy::FullInformation => {
            // the deadline stop reveals state 0
            let deadline = match ph.iter().find(|p| matches!(p.kind, PhaseKind::AfterDeadline { .. })) {
                Some(p) => p.start,
                None if ph.is_empty() => 0.0,
                None => t_max,
            };
            best = best.max(blind_gain_from_state0(params, t_max - deadline));
        }
        Policy::PostponedDisclosure { .. } | Policy::DelayedDisclosure { .. } => {}
    }
    Ok(best)
}

/// Continuation values on a uniform grid over the funded range, phase
/// boundaries and interior critical dates, plus the post-stop condition.
pub fn verify_obedience(params: &ProjectParams, policy: &Policy, grid_size: usize) -> Result<ObedienceReport> {
    if grid_size < 2 {
        return Err(Error::InvalidParams(format!("grid_size must be at least 2, got {grid_size}")));
    }
    let ph = phases(params, policy)?;
    let post = post_stop_value(params, policy, &ph)?;
    let tol = OBEDIENCE_TOL * params.v;

    let (min_v, argmin) = if let Some(last) = ph.last() {
        let end = last.end;
        let mut ts: Vec<f64> = (0..grid_size)
            .map(|i| (end * i as f64 / (grid_size - 1) as f64).min(end))
            .collect();
        for p in &ph {
            ts.push(p.start);
            ts.extend(critical_dates(params, p));
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let values = ts
            .par_iter()
            .map(|&t| continuation_value_with(params, &ph, t).map(|v| (v, t)))
            .collect::<Result<Vec<_>>>()?;
        values
            .into_iter()
            .fold((f64::INFINITY, 0.0), |acc, x| if x.0 < acc.0 { x } else { acc })
    } else {
        (0.0, 0.0)
    };

    Ok(ObedienceReport {
        min_continuation_value: min_v,
        argmin_t: argmin,
        grid_size,
        post_stop_value: post,
        feasible: min_v >= -tol && post <= tol,
    })
}

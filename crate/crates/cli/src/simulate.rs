use persuade_core::policy::{solve_delayed_disclosure, solve_interim_deadline, solve_postponed_start};
use persuade_core::{analytic_payoffs, estimate, optimal_policy, AnalyticPayoffs, PayoffEstimate, Policy, ProjectParams};
use serde::{Deserialize, Serialize};

use crate::{to_json, Abort, PolicyChoice, Run, SimulateArgs, EXIT_MISMATCH, SCHEMA_VERSION};

/// Monte Carlo minus closed form, per quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deltas {
    pub w: f64,
    pub v: f64,
    pub e_tau: f64,
    pub p_complete: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub schema_version: u32,
    pub params: ProjectParams,
    pub policy: Policy,
    pub seed: u64,
    pub estimate: PayoffEstimate,
    /// Null under general preferences, where no closed form is available.
    pub analytic: Option<AnalyticPayoffs>,
    pub deltas: Option<Deltas>,
    /// Every delta within 4 half-widths of its 95% interval.
    pub within_4_sigma: Option<bool>,
}

fn pick_policy(p: &ProjectParams, choice: PolicyChoice) -> persuade_core::Result<Option<Policy>> {
    Ok(Some(match choice {
        PolicyChoice::Auto => return optimal_policy(p),
        PolicyChoice::NonDisclosure => Policy::NonDisclosure,
        PolicyChoice::Postponed => solve_postponed_start(p)?,
        PolicyChoice::Interim => solve_interim_deadline(p)?,
        PolicyChoice::Delayed => solve_delayed_disclosure(p)?,
        PolicyChoice::FullInfo => Policy::FullInformation,
    }))
}

fn within(delta: f64, half_width: f64, scale: f64) -> bool {
    // constant-per-path quantities have zero width
    delta.abs() <= 4.0 * half_width + 1e-12 * scale.max(1.0)
}

pub(crate) fn cmd_simulate(args: &SimulateArgs) -> Result<Run, Abort> {
    let p = args.params.resolve()?;
    let policy = pick_policy(&p, args.policy)
        .map_err(Abort::invalid)?
        .ok_or_else(|| Abort::invalid("the principal rejects the project: no policy to simulate"))?;
    let est = estimate(&p, &policy, args.n, args.seed).map_err(Abort::invalid)?;

    let analytic = if p.is_baseline() {
        Some(analytic_payoffs(&p, &policy).map_err(Abort::invalid)?)
    } else {
        None
    };
    let deltas = analytic.map(|a| Deltas {
        w: est.w_mean - a.w_agent,
        v: est.v_mean - a.v_principal,
        e_tau: est.e_tau - a.e_tau,
        p_complete: est.p_complete - a.p_complete,
    });
    let hw = est.half_width_95;
    let pass = deltas.map(|d| {
        within(d.w, hw.w, p.v)
            && within(d.v, hw.v, p.v)
            && within(d.e_tau, hw.e_tau, p.t_max)
            && within(d.p_complete, hw.p_complete, 1.0)
            && est.structural_violations == 0
    });

    let report = SimulateReport {
        schema_version: SCHEMA_VERSION,
        params: p,
        policy,
        seed: args.seed,
        estimate: est,
        analytic,
        deltas,
        within_4_sigma: pass,
    };
    let mut run = Run::ok(to_json(&report)?);
    if pass == Some(false) {
        run.code = EXIT_MISMATCH;
        run.stderr
            .push("error: Monte Carlo estimate differs from the closed form by more than 4 sigma".into());
    }
    Ok(run)
}

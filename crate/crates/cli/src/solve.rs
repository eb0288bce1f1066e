use persuade_core::extensions::{classify_general, infinite_horizon, kappa_tilde_general, GeneralClass};
use persuade_core::model::long_horizon_condition;
use persuade_core::{
    analytic_payoffs, classify, cutoffs, optimal_policy, solve_full_info, solve_no_info, verify_obedience,
    AnalyticPayoffs, CutoffSet, FullInfoSolution, InfiniteHorizonOutcome, NoInfoSolution, ObedienceReport, Policy,
    ProjectParams, Regime,
};
use serde::{Deserialize, Serialize};

use crate::{to_json, Abort, Run, SolveArgs, EXIT_STRICT, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralReport {
    pub kappa_tilde_general: f64,
    /// Null when α = 1 and β = 0: the agent is indifferent.
    pub class: Option<GeneralClass>,
}

/// Output of `persuade solve`. Baseline fields are null under general
/// preferences or an unbounded horizon, and policy fields are null in the
/// reject regime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema_version: u32,
    pub params: ProjectParams,
    pub kappa: f64,
    pub warnings: Vec<String>,
    pub cutoffs: Option<CutoffSet>,
    pub regime: Option<Regime>,
    pub no_info: Option<NoInfoSolution>,
    pub full_info: Option<FullInfoSolution>,
    pub policy: Option<Policy>,
    pub s0_a: Option<f64>,
    pub s0_p: Option<f64>,
    pub s_star: Option<f64>,
    pub payoffs: Option<AnalyticPayoffs>,
    pub obedience: Option<ObedienceReport>,
    pub general: Option<GeneralReport>,
    pub infinite_horizon: Option<InfiniteHorizonOutcome>,
}

pub(crate) fn short_horizon_warning(p: &ProjectParams) -> Option<String> {
    let x = p.lambda * p.t_max;
    (x.is_finite() && !long_horizon_condition(x)).then(|| {
        format!("short horizon: lambda*T = {x} is below the long-horizon threshold; the no-information cutoff uses the short-horizon branch")
    })
}

pub fn solve_report(p: &ProjectParams, grid: usize) -> persuade_core::Result<SolveReport> {
    let mut report = SolveReport {
        schema_version: SCHEMA_VERSION,
        params: *p,
        kappa: p.kappa(),
        warnings: Vec::new(),
        cutoffs: None,
        regime: None,
        no_info: None,
        full_info: None,
        policy: None,
        s0_a: None,
        s0_p: None,
        s_star: None,
        payoffs: None,
        obedience: None,
        general: None,
        infinite_horizon: None,
    };
    if p.is_infinite_horizon() {
        report.infinite_horizon = Some(infinite_horizon(p)?);
        return Ok(report);
    }
    report.warnings.extend(short_horizon_warning(p));
    if !p.is_baseline() {
        report.general = Some(GeneralReport {
            kappa_tilde_general: kappa_tilde_general(p)?,
            class: classify_general(p).ok(),
        });
        report
            .warnings
            .push("general preferences: only the cutoff classification is computed".into());
        return Ok(report);
    }

    report.cutoffs = Some(cutoffs(p)?);
    report.regime = Some(classify(p)?);
    report.no_info = Some(solve_no_info(p)?);
    let fi = solve_full_info(p)?;
    report.full_info = Some(fi);
    report.s0_p = fi.invests.then_some(fi.s0_p);
    if let Some(policy) = optimal_policy(p)? {
        match policy {
            Policy::InterimDeadline { s0_a } => report.s0_a = Some(s0_a),
            Policy::PostponedDisclosure { s_star } => report.s_star = Some(s_star),
            _ => {}
        }
        report.policy = Some(policy);
        report.payoffs = Some(analytic_payoffs(p, &policy)?);
        report.obedience = Some(verify_obedience(p, &policy, grid)?);
    }
    Ok(report)
}

pub(crate) fn cmd_solve(args: &SolveArgs) -> Result<Run, Abort> {
    let p = args.params.resolve()?;
    let report = solve_report(&p, args.grid).map_err(Abort::invalid)?;
    let mut run = Run::ok(to_json(&report)?);
    for w in &report.warnings {
        run.stderr.push(format!("warning: {w}"));
    }
    if args.strict && short_horizon_warning(&p).is_some() {
        run.code = EXIT_STRICT;
    }
    Ok(run)
}

//! Monte Carlo oracle: sample (τ₁, τ₂), execute a mechanism on each path,
//! and estimate payoffs. Also brute-force searches over deterministic
//! policy families.
//!
//! Paths are generated in fixed-size blocks. Block `b` draws from
//! `rng_stream(seed, b)` and partial moments are merged in a fixed pairwise
//! tree, so estimates do not depend on the number of worker threads.

use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmarks::{solve_full_info, solve_no_info};
use crate::error::{Error, Result};
use crate::model::ProjectParams;
use crate::numerics::{rng_stream, RngStream};
use crate::policy::{analytic_payoffs, delayed_stop_date, verify_obedience, Policy};

/// Paths per random stream.
pub const BLOCK: usize = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub tau1: f64,
    pub tau2: f64,
}

fn draw(rng: &mut RngStream, exp: &Exp<f64>) -> Trajectory {
    let tau1 = exp.sample(rng);
    let tau2 = tau1 + exp.sample(rng);
    Trajectory { tau1, tau2 }
}

fn blocks(n: usize) -> impl IndexedParallelIterator<Item = (u64, usize)> {
    let count = n.div_ceil(BLOCK);
    (0..count).into_par_iter().map(move |b| (b as u64, BLOCK.min(n - b * BLOCK)))
}

fn exp_dist(params: &ProjectParams) -> Result<Exp<f64>> {
    Exp::new(params.lambda).map_err(|e| Error::InvalidParams(e.to_string()))
}

/// `n` independent trajectories, reproducible from `seed`.
pub fn sample_trajectories(params: &ProjectParams, n: usize, seed: u64) -> Result<Vec<Trajectory>> {
    let exp = exp_dist(params)?;
    Ok(blocks(n)
        .flat_map_iter(|(b, len)| {
            let mut rng = rng_stream(seed, b);
            (0..len).map(move |_| draw(&mut rng, &exp)).collect::<Vec<_>>()
        })
        .collect())
}

/// Outcome of running a mechanism on one path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Execution {
    pub tau: f64,
    pub completed: bool,
}

/// A mechanism with its dates resolved, ready to run on many paths.
#[derive(Debug, Clone, Copy)]
pub struct Executor {
    params: ProjectParams,
    rule: Rule,
}

#[derive(Debug, Clone, Copy)]
enum Rule {
    Fixed(f64),
    Postponed(f64),
    Deadline(f64),
    Delayed,
}

impl Executor {
    pub fn new(params: &ProjectParams, policy: &Policy) -> Result<Self> {
        let t_max = params.finite_horizon()?;
        let rule = match *policy {
            Policy::NonDisclosure => Rule::Fixed(solve_no_info(params)?.s_ni),
            Policy::PostponedDisclosure { s_star } => Rule::Postponed(s_star.min(t_max)),
            Policy::InterimDeadline { s0_a } => Rule::Deadline(s0_a.min(t_max)),
            Policy::FullInformation => {
                let fi = solve_full_info(params)?;
                Rule::Deadline(if fi.invests { fi.s0_p } else { 0.0 })
            }
            Policy::DelayedDisclosure { .. } => {
                // validates κ ≤ 1/e and the start date
                crate::policy::continuation_value(params, policy, 0.0)?;
                Rule::Delayed
            }
        };
        Ok(Self { params: *params, rule })
    }

    pub fn run(&self, tr: &Trajectory) -> Result<Execution> {
        let t_max = self.params.t_max;
        let done = tr.tau2.min(t_max);
        let tau = match self.rule {
            Rule::Fixed(s) => s,
            Rule::Postponed(s) => s.max(done),
            Rule::Deadline(s) => {
                if tr.tau1 > s {
                    s
                } else {
                    done
                }
            }
            Rule::Delayed => delayed_stop_date(&self.params, tr.tau2)?,
        };
        Ok(Execution {
            tau,
            completed: tr.tau2 <= tau,
        })
    }

    /// Stopping-state restrictions of the mechanism, checked on one path.
    /// Without an interim deadline no stop precedes τ₂ ∧ T; with one, a stop
    /// never happens in state 1 and completion stops immediately.
    fn violates_structure(&self, tr: &Trajectory, ex: &Execution) -> bool {
        let t_max = self.params.t_max;
        let eps = 1e-12 * t_max.max(1.0);
        match self.rule {
            Rule::Postponed(_) | Rule::Delayed => ex.tau < tr.tau2.min(t_max) - eps,
            Rule::Deadline(_) => {
                let in_state1 = tr.tau1 <= ex.tau && ex.tau < tr.tau2 && ex.tau < t_max - eps;
                let late = tr.tau2 <= t_max && ex.completed && (ex.tau - tr.tau2).abs() > eps;
                in_state1 || late
            }
            Rule::Fixed(_) => false,
        }
    }
}

pub fn execute_policy(traj: &Trajectory, policy: &Policy, params: &ProjectParams) -> Result<Execution> {
    Executor::new(params, policy)?.run(traj)
}

/// Running mean and second central moment; merged with Chan's update.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(a: Self, b: Self) -> Self {
        if a.n == 0.0 {
            return b;
        }
        if b.n == 0.0 {
            return a;
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        Self {
            n,
            mean: a.mean + d * b.n / n,
            m2: a.m2 + b.m2 + d * d * a.n * b.n / n,
        }
    }

    fn half_width(&self) -> f64 {
        if self.n < 2.0 {
            return f64::INFINITY;
        }
        1.96 * (self.m2 / (self.n - 1.0)).sqrt() / self.n.sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    w: Moments,
    v: Moments,
    tau: Moments,
    done: Moments,
    violations: u64,
}

impl Tally {
    fn merge(a: Self, b: Self) -> Self {
        Self {
            w: Moments::merge(a.w, b.w),
            v: Moments::merge(a.v, b.v),
            tau: Moments::merge(a.tau, b.tau),
            done: Moments::merge(a.done, b.done),
            violations: a.violations + b.violations,
        }
    }
}

/// Pairwise reduction in index order.
fn tree_reduce(mut parts: Vec<Tally>) -> Tally {
    if parts.is_empty() {
        return Tally::default();
    }
    while parts.len() > 1 {
        parts = parts
            .chunks(2)
            .map(|c| if c.len() == 2 { Tally::merge(c[0], c[1]) } else { c[0] })
            .collect();
    }
    parts[0]
}

/// 1.96 · sd / √n for each estimated quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfWidths {
    pub w: f64,
    pub v: f64,
    pub e_tau: f64,
    pub p_complete: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffEstimate {
    pub w_mean: f64,
    pub v_mean: f64,
    pub e_tau: f64,
    pub p_complete: f64,
    pub half_width_95: HalfWidths,
    pub n_paths: u64,
    /// Paths on which the mechanism broke its stopping-state restrictions.
    pub structural_violations: u64,
}

/// Per-path payoffs (agent, principal). Under the baseline these are c·τ
/// and v·1{done} − c·τ.
fn path_payoffs(p: &ProjectParams, ex: &Execution) -> (f64, f64) {
    let annuity = if p.r == 0.0 { ex.tau } else { -(-p.r * ex.tau).exp_m1() / p.r };
    let prize = if ex.completed { p.v * (-p.r * ex.tau).exp() } else { 0.0 };
    let w = (1.0 - p.alpha) * prize + p.beta * p.c * annuity;
    let v = p.alpha * prize - p.c * annuity;
    (w, v)
}

pub const MIN_PATHS: usize = 1000;

pub fn estimate(params: &ProjectParams, policy: &Policy, n: usize, seed: u64) -> Result<PayoffEstimate> {
    if n < MIN_PATHS {
        return Err(Error::InvalidParams(format!("need at least {MIN_PATHS} paths, got {n}")));
    }
    let exec = Executor::new(params, policy)?;
    let exp = exp_dist(params)?;
    let parts = blocks(n)
        .map(|(b, len)| -> Result<Tally> {
            let mut rng = rng_stream(seed, b);
            let mut t = Tally::default();
            for _ in 0..len {
                let tr = draw(&mut rng, &exp);
                let ex = exec.run(&tr)?;
                let (w, v) = path_payoffs(params, &ex);
                t.w.push(w);
                t.v.push(v);
                t.tau.push(ex.tau);
                t.done.push(if ex.completed { 1.0 } else { 0.0 });
                t.violations += exec.violates_structure(&tr, &ex) as u64;
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    let t = tree_reduce(parts);
    Ok(PayoffEstimate {
        w_mean: t.w.mean,
        v_mean: t.v.mean,
        e_tau: t.tau.mean,
        p_complete: t.done.mean,
        half_width_95: HalfWidths {
            w: t.w.half_width(),
            v: t.v.half_width(),
            e_tau: t.tau.half_width(),
            p_complete: t.done.half_width(),
        },
        n_paths: n as u64,
        structural_violations: t.violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyFamily {
    /// Postponed disclosure indexed by its start date.
    StartDate,
    /// Deterministic interim deadlines.
    InterimDeadline,
    /// Lotteries over two interim deadlines.
    TwoPointDeadlineMixture,
}

/// How the oracle scores family members.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum EvalMode {
    Analytic,
    MonteCarlo { n: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub family: PolicyFamily,
    /// Start date or deadline; for mixtures `[s_low, s_high, weight_on_low]`.
    pub best_param: Vec<f64>,
    pub best_agent_payoff: f64,
    pub grid_step: f64,
    pub feasible_members: usize,
}

/// Tolerance for the IR check inside the oracle; tighter than
/// `OBEDIENCE_TOL` so that the feasible set is not padded by slack.
const ORACLE_IR_TOL: f64 = 1e-12;

fn member_feasible(params: &ProjectParams, policy: &Policy) -> Result<bool> {
    let r = verify_obedience(params, policy, 64)?;
    Ok(r.min_continuation_value >= -ORACLE_IR_TOL * params.v)
}

/// Principal value and agent payoff of one family member.
fn score(params: &ProjectParams, policy: &Policy, mode: EvalMode) -> Result<(f64, f64)> {
    match mode {
        EvalMode::Analytic => {
            let a = analytic_payoffs(params, policy)?;
            Ok((a.v_principal, a.w_agent))
        }
        EvalMode::MonteCarlo { n, seed } => {
            let e = estimate(params, policy, n, seed)?;
            Ok((e.v_mean, e.w_mean))
        }
    }
}

/// Exhaustive search over a uniform grid of `grid` points on [0, T].
/// Infeasibility is decided by the analytic continuation value.
pub fn grid_search_oracle(
    params: &ProjectParams,
    family: PolicyFamily,
    grid: usize,
    mode: EvalMode,
) -> Result<OracleResult> {
    let t_max = params.finite_horizon()?;
    if grid < 10 {
        return Err(Error::InvalidParams(format!("grid must have at least 10 points, got {grid}")));
    }
    let step = t_max / (grid - 1) as f64;
    let points: Vec<f64> = (0..grid).map(|i| (i as f64 * step).min(t_max)).collect();
    let member = |s: f64| match family {
        PolicyFamily::StartDate => Policy::PostponedDisclosure { s_star: s },
        _ => Policy::InterimDeadline { s0_a: s },
    };

    // (param, feasible, principal value, agent payoff), in grid order
    let scored = points
        .par_iter()
        .map(|&s| -> Result<(f64, bool, f64, f64)> {
            let pol = member(s);
            let feasible = member_feasible(params, &pol)?;
            let (v, w) = score(params, &pol, mode)?;
            Ok((s, feasible, v, w))
        })
        .collect::<Result<Vec<_>>>()?;
    let feasible_members = scored.iter().filter(|m| m.1).count();

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut offer = |param: Vec<f64>, w: f64| {
        if best.as_ref().is_none_or(|b| w > b.1) {
            best = Some((param, w));
        }
    };
    for m in scored.iter().filter(|m| m.1) {
        offer(vec![m.0], m.3);
    }
    if family == PolicyFamily::TwoPointDeadlineMixture {
        // Participation at t = 0 is linear in the lottery; it is the only
        // constraint imposed, so this searches a relaxation.
        for lo in scored.iter().filter(|m| m.2 >= 0.0) {
            for hi in scored.iter().filter(|m| m.0 > lo.0 && m.2 < 0.0) {
                let weight = hi.2 / (hi.2 - lo.2);
                offer(vec![lo.0, hi.0, weight], weight * lo.3 + (1.0 - weight) * hi.3);
            }
        }
    }
    let (best_param, best_agent_payoff) = best.ok_or(Error::InvalidParams(
        "no feasible member in the policy family".into(),
    ))?;
    Ok(OracleResult {
        family,
        best_param,
        best_agent_payoff,
        grid_step: step,
        feasible_members,
    })
}

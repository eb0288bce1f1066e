use super::{phase_index, phases, snap_to_end, Phase, PhaseKind, Policy};
use crate::error::{Error, Result};
use crate::model::{integral_open, integral_p1, posterior_q1_no_stop, ProjectParams};
use crate::numerics::{integrate, ToleranceConfig};

/// ∫ₐᵇ (J − κ Surv) over one phase.
fn phase_flow(params: &ProjectParams, kind: PhaseKind, a: f64, b: f64) -> Result<f64> {
    let (l, kappa) = (params.lambda, params.kappa());
    Ok(match kind {
        PhaseKind::Blind => integral_p1(l, a, b) - kappa * (b - a),
        PhaseKind::Exposed => integral_p1(l, a, b) - kappa * integral_open(l, a, b),
        PhaseKind::AfterDeadline { s0 } => (1.0 - kappa) * s0 * ((-l * a).exp() - (-l * b).exp()),
        PhaseKind::Delayed => {
            let survival = integrate(
                |s| kind.survival(params, s).unwrap_or(f64::NAN),
                a,
                b,
                &ToleranceConfig::tight(),
            )?;
            integral_p1(l, a, b) - kappa * survival
        }
    })
}

fn not_funded(t: f64) -> Error {
    Error::NotContinuing {
        t,
        reason: "the policy has already stopped funding",
    }
}

/// V_t from the survival representation, integrated phase by phase.
pub(crate) fn continuation_value_with(params: &ProjectParams, ph: &[Phase], t: f64) -> Result<f64> {
    let t = snap_to_end(ph, t);
    let i = phase_index(ph, t).ok_or_else(|| not_funded(t))?;
    let mut flow = 0.0;
    for p in &ph[i..] {
        flow += phase_flow(params, p.kind, t.max(p.start), p.end)?;
    }
    let surv = ph[i].kind.survival(params, t)?;
    Ok(params.v * params.lambda * flow / surv)
}

/// Principal's continuation value at t given no stop so far.
pub fn continuation_value(params: &ProjectParams, policy: &Policy, t: f64) -> Result<f64> {
    let ph = phases(params, policy)?;
    continuation_value_with(params, &ph, t)
}

/// Posterior probability of state 1 at t given that funding has not stopped.
pub fn posterior_q1(params: &ProjectParams, policy: &Policy, t: f64) -> Result<f64> {
    let ph = phases(params, policy)?;
    let t = snap_to_end(&ph, t);
    let i = phase_index(&ph, t).ok_or_else(|| not_funded(t))?;
    let kind = ph[i].kind;
    Ok(kind.joint(params, t) / kind.survival(params, t)?)
}

/// Stopping hazard and posterior of state 1 inside a phase.
fn hazard_and_q1(params: &ProjectParams, kind: PhaseKind, s: f64) -> Result<(f64, f64)> {
    let l = params.lambda;
    Ok(match kind {
        PhaseKind::Blind => (0.0, l * s * (-l * s).exp()),
        PhaseKind::Exposed => {
            let q1 = posterior_q1_no_stop(params, s);
            (l * q1, q1)
        }
        PhaseKind::AfterDeadline { .. } => (l, 1.0),
        PhaseKind::Delayed => (l - 1.0 / s, kind.joint(params, s) / kind.survival(params, s)?),
    })
}

/// Largest RK4 step, in units of 1/λ.
const ODE_STEP: f64 = 2e-3;

/// Continuation values at each date in `ts` by integrating
/// dV/ds = h(s) V + vλ(κ − q₁(s)) backward from V = 0 at the last funded
/// date. h is the stopping hazard; at a phase boundary a the jump is
/// V(a−) Surv(a−) = V(a+) Surv(a+).
pub fn continuation_values_ode(params: &ProjectParams, policy: &Policy, ts: &[f64]) -> Result<Vec<f64>> {
    let ph = phases(params, policy)?;
    let Some(last) = ph.last() else {
        return match ts.first() {
            Some(&t) => Err(not_funded(t)),
            None => Ok(Vec::new()),
        };
    };
    let end = last.end;
    let ts: Vec<f64> = ts.iter().map(|&t| snap_to_end(&ph, t)).collect();
    for &t in &ts {
        if !(t >= 0.0 && t <= end) {
            return Err(not_funded(t));
        }
    }

    // Nodes: requested dates and phase boundaries, walked downward.
    let mut nodes: Vec<f64> = ts.clone();
    nodes.extend(ph.iter().map(|p| p.start));
    nodes.push(end);
    nodes.sort_by(|a, b| b.total_cmp(a));
    nodes.dedup();

    let (v, l, kappa) = (params.v, params.lambda, params.kappa());
    let h_max = ODE_STEP / l;
    let mut values: Vec<(f64, f64)> = Vec::with_capacity(nodes.len());
    let mut val = 0.0;
    values.push((end, 0.0));

    for w in nodes.windows(2) {
        let (b, a) = (w[0], w[1]);
        let k = phase_index(&ph, 0.5 * (a + b)).expect("segment inside funded range");
        let kind = ph[k].kind;
        let rhs = |s: f64, y: f64| -> Result<f64> {
            let (h, q1) = hazard_and_q1(params, kind, s)?;
            Ok(h * y + v * l * (kappa - q1))
        };
        let n = ((b - a) / h_max).ceil().max(1.0) as usize;
        let step = (b - a) / n as f64;
        for j in 0..n {
            let s = b - j as f64 * step;
            let k1 = rhs(s, val)?;
            let k2 = rhs(s - 0.5 * step, val - 0.5 * step * k1)?;
            let k3 = rhs(s - 0.5 * step, val - 0.5 * step * k2)?;
            let k4 = rhs(s - step, val - step * k3)?;
            val -= step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        if k > 0 && a == ph[k].start {
            let right = kind.survival(params, a)?;
            let left = ph[k - 1].kind.survival(params, a)?;
            val *= right / left;
        }
        values.push((a, val));
    }

    Ok(ts
        .iter()
        .map(|t| {
            let i = values.iter().position(|(s, _)| s == t).expect("every request is a node");
            values[i].1
        })
        .collect())
}

pub fn continuation_value_ode(params: &ProjectParams, policy: &Policy, t: f64) -> Result<f64> {
    Ok(continuation_values_ode(params, policy, &[t])?[0])
}

//! Discounting, profit sharing and flow benefits; the unbounded-horizon limit.
//!
//! Under general preferences the principal receives α v e^{−rτ₂} on
//! completion and pays c e^{−rs} ds while funding. The agent's mechanism
//! never stops before τ₂ ∧ T exactly when funding until then is individually
//! rational at time 0:
//!
//! ```text
//! κ ≤ κ̃(T, λ, r, α) = (α/λ) · E[e^{−rτ₂}; τ₂ ≤ T] / E[∫₀^{τ₂∧T} e^{−rs} ds]
//! ```
//!
//! β scales the agent's flow benefit and does not enter the cutoff.

use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ProjectParams, Regime};
use crate::numerics::{integrate, rng_stream, ToleranceConfig};
use crate::simulate::BLOCK;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralCutoff {
    pub kappa_tilde_general: f64,
}

/// E[e^{−rτ₂}; τ₂ ≤ T] and E[∫₀^{τ₂∧T} e^{−rs} ds], by quadrature.
fn discounted_moments(params: &ProjectParams) -> Result<(f64, f64)> {
    let t_max = params.finite_horizon()?;
    let (l, r) = (params.lambda, params.r);
    let cfg = ToleranceConfig::tight();
    let completion = integrate(|z| (-r * z).exp() * l * l * z * (-l * z).exp(), 0.0, t_max, &cfg)?;
    // P(τ₂ ∧ T > s) = p₀(s) + p₁(s) on [0, T)
    let annuity = integrate(|s| (-(r + l) * s).exp() * (1.0 + l * s), 0.0, t_max, &cfg)?;
    Ok((completion, annuity))
}

pub fn kappa_tilde_general(params: &ProjectParams) -> Result<f64> {
    params.validate()?;
    let (completion, annuity) = discounted_moments(params)?;
    Ok(params.alpha / params.lambda * completion / annuity)
}

pub fn general_cutoff(params: &ProjectParams) -> Result<GeneralCutoff> {
    Ok(GeneralCutoff {
        kappa_tilde_general: kappa_tilde_general(params)?,
    })
}

/// Monte Carlo estimate of the cutoff ratio and its delta-method standard
/// error, from `n` simulated completion dates.
pub fn kappa_tilde_general_mc(params: &ProjectParams, n: usize, seed: u64) -> Result<(f64, f64)> {
    let t_max = params.finite_horizon()?;
    if n < 2 {
        return Err(Error::InvalidParams(format!("need at least 2 paths, got {n}")));
    }
    let (l, r) = (params.lambda, params.r);
    let exp = Exp::new(l).map_err(|e| Error::InvalidParams(e.to_string()))?;
    let blocks = n.div_ceil(BLOCK);
    // sums of X, Y, X², Y², XY with X the discounted completion indicator
    // and Y the discounted funding time
    let sums = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_stream(seed, b as u64);
            let mut acc = [0.0f64; 5];
            for _ in 0..BLOCK.min(n - b * BLOCK) {
                let tau2 = exp.sample(&mut rng) + exp.sample(&mut rng);
                let stop = tau2.min(t_max);
                let x = if tau2 <= t_max { (-r * tau2).exp() } else { 0.0 };
                let y = if r == 0.0 { stop } else { -(-r * stop).exp_m1() / r };
                acc[0] += x;
                acc[1] += y;
                acc[2] += x * x;
                acc[3] += y * y;
                acc[4] += x * y;
            }
            acc
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold([0.0f64; 5], |mut a, b| {
            a.iter_mut().zip(b).for_each(|(s, x)| *s += x);
            a
        });
    let nf = n as f64;
    let [mx, my, mxx, myy, mxy] = sums.map(|s| s / nf);
    let ratio = mx / my;
    let (vx, vy, cxy) = (mxx - mx * mx, myy - my * my, mxy - mx * my);
    let var = (vx - 2.0 * ratio * cxy + ratio * ratio * vy) / (nf * my * my);
    let scale = params.alpha / l;
    Ok((scale * ratio, scale * var.max(0.0).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeneralClass {
    PromisingNoInterimDeadline,
    InterimDeadlineRequired,
}

impl GeneralClass {
    pub fn label(self) -> &'static str {
        match self {
            GeneralClass::PromisingNoInterimDeadline => "promising-no-interim-deadline",
            GeneralClass::InterimDeadlineRequired => "interim-deadline-required",
        }
    }
}

pub fn classify_general(params: &ProjectParams) -> Result<GeneralClass> {
    if params.alpha == 1.0 && params.beta == 0.0 {
        return Err(Error::DegeneratePreferences);
    }
    Ok(if params.kappa() <= kappa_tilde_general(params)? {
        GeneralClass::PromisingNoInterimDeadline
    } else {
        GeneralClass::InterimDeadlineRequired
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfiniteHorizonOutcome {
    /// `PostponedDisclosure` or `Reject`; interim deadlines never help.
    pub policy_class: Regime,
    /// Value of a funded project once stage one is complete: v − c/λ.
    pub v1: f64,
}

pub fn infinite_horizon(params: &ProjectParams) -> Result<InfiniteHorizonOutcome> {
    params.validate()?;
    if !params.is_infinite_horizon() {
        return Err(Error::InvalidParams(format!(
            "expected an unbounded horizon, got T = {}",
            params.t_max
        )));
    }
    let kappa = params.kappa();
    Ok(InfiniteHorizonOutcome {
        policy_class: if kappa < 0.5 { Regime::PostponedDisclosure } else { Regime::Reject },
        v1: params.v * (1.0 - kappa),
    })
}

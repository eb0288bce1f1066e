use clap::ValueEnum;
use persuade_core::extensions::{classify_general, kappa_tilde_general};
use persuade_core::{analytic_payoffs, classify, optimal_policy, solve_full_info, Policy, ProjectParams};
use serde::{Deserialize, Serialize};

use crate::{Abort, Run, SweepArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum SweepParam {
    /// Swept through c with v and λ fixed.
    #[value(name = "kappa")]
    Kappa,
    #[value(name = "T")]
    #[serde(rename = "T")]
    Horizon,
    #[value(name = "lambda")]
    Lambda,
    #[value(name = "r")]
    R,
    #[value(name = "alpha")]
    Alpha,
}

impl SweepParam {
    fn column(self) -> &'static str {
        match self {
            SweepParam::Kappa => "kappa",
            SweepParam::Horizon => "T",
            SweepParam::Lambda => "lambda",
            SweepParam::R => "r",
            SweepParam::Alpha => "alpha",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub fixed: ProjectParams,
}

/// Columns after the swept value.
pub const SWEEP_COLUMNS: [&str; 8] = [
    "regime",
    "s0_a",
    "s0_p",
    "s_star",
    "e_tau",
    "v_principal",
    "w_agent",
    "kappa_tilde_general",
];

/// One grid point. Empty optionals print as empty CSV cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub regime: String,
    pub s0_a: Option<f64>,
    pub s0_p: Option<f64>,
    pub s_star: Option<f64>,
    pub e_tau: Option<f64>,
    pub v_principal: Option<f64>,
    pub w_agent: Option<f64>,
    pub kappa_tilde_general: f64,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(format!("need finite min < max, got [{}, {}]", self.min, self.max));
        }
        if self.steps < 2 {
            return Err(format!("steps must be at least 2, got {}", self.steps));
        }
        Ok(())
    }

    fn at(&self, x: f64) -> persuade_core::Result<ProjectParams> {
        let f = self.fixed;
        let base = |lambda: f64, c: f64, t: f64| ProjectParams::new(lambda, c, f.v, t);
        let p = match self.param {
            SweepParam::Kappa => base(f.lambda, x * f.v * f.lambda, f.t_max)?,
            SweepParam::Horizon => base(f.lambda, f.c, x)?,
            SweepParam::Lambda => base(x, f.c, f.t_max)?,
            _ => base(f.lambda, f.c, f.t_max)?,
        };
        match self.param {
            SweepParam::R => p.with_preferences(x, f.alpha, f.beta),
            SweepParam::Alpha => p.with_preferences(f.r, x, f.beta),
            _ => p.with_preferences(f.r, f.alpha, f.beta),
        }
    }
}

fn row(x: f64, p: &ProjectParams) -> persuade_core::Result<SweepRow> {
    let mut r = SweepRow {
        value: x,
        regime: String::new(),
        s0_a: None,
        s0_p: None,
        s_star: None,
        e_tau: None,
        v_principal: None,
        w_agent: None,
        kappa_tilde_general: kappa_tilde_general(p)?,
    };
    if !p.is_baseline() {
        r.regime = match classify_general(p) {
            Ok(class) => class.label().to_owned(),
            Err(_) => "degenerate".to_owned(),
        };
        return Ok(r);
    }
    r.regime = classify(p)?.label().to_owned();
    let fi = solve_full_info(p)?;
    r.s0_p = fi.invests.then_some(fi.s0_p);
    if let Some(policy) = optimal_policy(p)? {
        match policy {
            Policy::InterimDeadline { s0_a } => r.s0_a = Some(s0_a),
            Policy::PostponedDisclosure { s_star } => r.s_star = Some(s_star),
            _ => {}
        }
        let a = analytic_payoffs(p, &policy)?;
        r.e_tau = Some(a.e_tau);
        r.v_principal = Some(a.v_principal);
        r.w_agent = Some(a.w_agent);
    }
    Ok(r)
}

pub fn sweep_rows(spec: &SweepSpec) -> Result<Vec<SweepRow>, String> {
    spec.validate()?;
    (0..spec.steps)
        .map(|i| {
            let x = if i + 1 == spec.steps {
                spec.max
            } else {
                spec.min + (spec.max - spec.min) * i as f64 / (spec.steps - 1) as f64
            };
            let p = spec.at(x).map_err(|e| format!("{} = {x}: {e}", spec.param.column()))?;
            row(x, &p).map_err(|e| format!("{} = {x}: {e}", spec.param.column()))
        })
        .collect()
}

fn write_csv<W: std::io::Write>(out: W, param: SweepParam, rows: &[SweepRow]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![param.column()];
    header.extend(SWEEP_COLUMNS);
    w.write_record(&header)?;
    let cell = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.value.to_string(),
            r.regime.clone(),
            cell(r.s0_a),
            cell(r.s0_p),
            cell(r.s_star),
            cell(r.e_tau),
            cell(r.v_principal),
            cell(r.w_agent),
            r.kappa_tilde_general.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn cmd_sweep(args: &SweepArgs) -> Result<Run, Abort> {
    // the swept field is overwritten at every grid point
    let mut fixed_args = args.params.clone();
    let slot = match args.param {
        SweepParam::Kappa => &mut fixed_args.c,
        SweepParam::Horizon => &mut fixed_args.t,
        SweepParam::Lambda => &mut fixed_args.lambda,
        SweepParam::R => &mut fixed_args.r,
        SweepParam::Alpha => &mut fixed_args.alpha,
    };
    if slot.is_none() && args.min.is_finite() && args.min > 0.0 {
        *slot = Some(args.min);
    }
    let spec = SweepSpec {
        param: args.param,
        min: args.min,
        max: args.max,
        steps: args.steps,
        fixed: fixed_args.resolve()?,
    };
    let rows = sweep_rows(&spec).map_err(Abort::invalid)?;
    let mut buf = Vec::new();
    write_csv(&mut buf, spec.param, &rows)?;
    match &args.out {
        Some(path) => {
            std::fs::write(path, &buf).map_err(|e| Abort::from(anyhow::Error::from(e)))?;
            Ok(Run::ok(String::new()))
        }
        None => Ok(Run::ok(String::from_utf8(buf).map_err(|e| Abort::from(anyhow::Error::from(e)))?)),
    }
}

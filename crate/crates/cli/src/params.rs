use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use persuade_core::ProjectParams;

use crate::Abort;

/// Project parameters from flags, a JSON file, or both; flags win.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// Stage-completion rate λ.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Flow cost of funding.
    #[arg(long)]
    pub c: Option<f64>,
    /// Value of the completed project.
    #[arg(long)]
    pub v: Option<f64>,
    /// Horizon; `inf` for no deadline.
    #[arg(long = "T", value_name = "T")]
    pub t: Option<f64>,
    /// Discount rate.
    #[arg(long)]
    pub r: Option<f64>,
    /// Principal's profit share.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Weight of the agent's flow benefit.
    #[arg(long)]
    pub beta: Option<f64>,
    /// JSON file holding a parameter object or a `solve` report.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

fn from_config(path: &PathBuf) -> Result<ProjectParams, Abort> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let doc: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Abort::invalid(format!("{}: {e}", path.display())))?;
    let body = doc.get("params").cloned().unwrap_or(doc);
    serde_json::from_value(body).map_err(|e| Abort::invalid(format!("{}: {e}", path.display())))
}

impl ParamArgs {
    /// Resolves the parameters; `defaults` fills fields missing from both
    /// the flags and the config file.
    pub(crate) fn resolve_with(&self, defaults: Option<ProjectParams>) -> Result<ProjectParams, Abort> {
        let base = match &self.config {
            Some(path) => Some(from_config(path)?),
            None => defaults,
        };
        let pick = |flag: Option<f64>, name: &str, from_base: fn(&ProjectParams) -> f64| {
            flag.or(base.as_ref().map(from_base))
                .ok_or_else(|| Abort::invalid(format!("missing --{name}")))
        };
        let mut p = ProjectParams::new(
            pick(self.lambda, "lambda", |p| p.lambda)?,
            pick(self.c, "c", |p| p.c)?,
            pick(self.v, "v", |p| p.v)?,
            pick(self.t, "T", |p| p.t_max)?,
        )
        .map_err(Abort::invalid)?;
        p = p
            .with_preferences(
                self.r.or(base.map(|b| b.r)).unwrap_or(0.0),
                self.alpha.or(base.map(|b| b.alpha)).unwrap_or(1.0),
                self.beta.or(base.map(|b| b.beta)).unwrap_or(1.0),
            )
            .map_err(Abort::invalid)?;
        Ok(p)
    }

    pub(crate) fn resolve(&self) -> Result<ProjectParams, Abort> {
        self.resolve_with(None)
    }
}

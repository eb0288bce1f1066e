use thiserror::Error;

/// Errors produced by the solvers and numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: argument {value} outside domain {domain}")]
    Domain {
        function: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("root finder did not converge after {iterations} iterations (last bracket [{lo}, {hi}])")]
    MaxIterations { iterations: usize, lo: f64, hi: f64 },

    #[error("quadrature did not converge on [{a}, {b}]: estimate {estimate}, error {error}")]
    NonConvergence {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
    },

    #[error("non-finite value {value} encountered in {context}")]
    NonFinite { context: &'static str, value: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("infinite horizon is only supported by the no-deadline solver")]
    InfiniteHorizon,

    #[error("kappa = {kappa} is outside the {regime} interval ({lo}, {hi})")]
    Regime {
        regime: &'static str,
        kappa: f64,
        lo: f64,
        hi: f64,
    },

    #[error("no continuation at t = {t}: {reason}")]
    NotContinuing { t: f64, reason: &'static str },

    #[error("agent is indifferent (alpha = 1, beta = 0); no disclosure problem")]
    DegeneratePreferences,

    #[error("invalid tolerance configuration: {0}")]
    Tolerance(String),
}

pub type Result<T> = std::result::Result<T, Error>;

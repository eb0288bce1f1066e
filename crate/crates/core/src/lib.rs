//! Dynamic persuasion in a two-stage project: an agent who benefits from
//! continued funding designs what an investor learns about progress, and the
//! investor decides when to stop funding.
//!
//! The crate classifies parameter points into regimes, solves each regime's
//! optimal investment schedule in closed form, checks obedience by two
//! independent routes, and simulates schedules by Monte Carlo.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmarks;
pub mod error;
pub mod extensions;
pub mod model;
pub mod numerics;
pub mod policy;
pub mod simulate;

pub use benchmarks::{solve_full_info, solve_no_info, FullInfoSolution, NoInfoSolution};
pub use error::{Error, Result};
pub use extensions::{
    classify_general, infinite_horizon, kappa_tilde_general, GeneralClass, GeneralCutoff, InfiniteHorizonOutcome,
};
pub use model::{classify, cutoffs, kappa_zero, y_zero, BeliefState, CutoffSet, ProjectParams, Regime};
pub use numerics::ToleranceConfig;
pub use policy::{
    analytic_payoffs, continuation_value, optimal_policy, verify_obedience, AnalyticPayoffs, ObedienceReport, Policy,
};
pub use simulate::{estimate, grid_search_oracle, EvalMode, PayoffEstimate, PolicyFamily};

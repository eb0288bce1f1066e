//! `persuade` command-line front end.
//!
//! Every subcommand returns a [`Run`]: the text for stdout, diagnostics for
//! stderr and the process exit code. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O or internal error |
//! | 2 | invalid parameters or sweep specification |
//! | 3 | short horizon under `--strict` |
//! | 4 | Monte Carlo estimate outside the 4-sigma band of the closed form |
//! | 5 | at least one `verify` check failed |

use clap::{Args, Parser, Subcommand, ValueEnum};

mod params;
mod simulate;
mod solve;
mod sweep;
mod verify;

pub use params::ParamArgs;
pub use solve::{solve_report, GeneralReport, SolveReport};
pub use sweep::{sweep_rows, SweepParam, SweepRow, SweepSpec, SWEEP_COLUMNS};
pub use verify::{CheckRow, VerifyReport};

/// Version tag carried by every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_STRICT: u8 = 3;
pub const EXIT_MISMATCH: u8 = 4;
pub const EXIT_VERIFY: u8 = 5;

#[derive(Debug, Parser)]
#[command(name = "persuade", version, about = "Solve, sweep, simulate and verify dynamic persuasion schedules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one parameter point and print a JSON report.
    Solve(SolveArgs),
    /// Sweep one parameter over a grid and print CSV.
    Sweep(SweepArgs),
    /// Estimate payoffs by Monte Carlo and compare with the closed forms.
    Simulate(SimulateArgs),
    /// Run the invariant battery and print a pass/fail table.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Exit with code 3 when λT is below the long-horizon threshold.
    #[arg(long)]
    pub strict: bool,
    /// Time-grid size for the obedience check.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Parameter to sweep.
    #[arg(long, value_enum)]
    pub param: SweepParam,
    #[arg(long)]
    pub min: f64,
    #[arg(long)]
    pub max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long)]
    pub steps: usize,
    /// Write CSV to this file instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyChoice {
    Auto,
    NonDisclosure,
    Postponed,
    Interim,
    Delayed,
    FullInfo,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = PolicyChoice::Auto)]
    pub policy: PolicyChoice,
    /// Number of simulated paths.
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,
    #[arg(long, env = "PERSUADE_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    /// Push the interim deadline past its binding value.
    InflateDeadline,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// λ, v and T of the test point; c is chosen per check. Defaults λ = 1, v = 1, T = 2.
    #[command(flatten)]
    pub params: ParamArgs,
    /// Grid size for obedience checks and oracle searches.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Paths for the Monte Carlo check.
    #[arg(long, default_value_t = 200_000)]
    pub n: usize,
    #[arg(long, env = "PERSUADE_SEED", default_value_t = 42)]
    pub seed: u64,
    /// Inject a known defect to exercise the failure path.
    #[arg(long, value_enum)]
    pub fault: Option<Fault>,
    /// Print the report as JSON instead of a table.
    #[arg(long)]
    pub json: bool,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub stdout: String,
    pub stderr: Vec<String>,
    pub code: u8,
}

impl Run {
    fn ok(stdout: String) -> Self {
        Self { stdout, stderr: Vec::new(), code: EXIT_OK }
    }

    fn fail(code: u8, message: impl Into<String>) -> Self {
        Self {
            stdout: String::new(),
            stderr: vec![message.into()],
            code,
        }
    }
}

/// Failure that aborts a command before any report is produced.
#[derive(Debug)]
pub(crate) struct Abort {
    code: u8,
    message: String,
}

impl Abort {
    pub(crate) fn invalid(message: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.to_string(),
        }
    }
}

impl From<anyhow::Error> for Abort {
    fn from(e: anyhow::Error) -> Self {
        Self {
            code: EXIT_ERROR,
            message: format!("{e:#}"),
        }
    }
}

impl From<Abort> for Run {
    fn from(a: Abort) -> Self {
        Run::fail(a.code, a.message)
    }
}

pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Abort> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Abort::from(anyhow::Error::from(e)))?;
    s.push('\n');
    Ok(s)
}

pub fn run(cli: Cli) -> Run {
    let result = match cli.command {
        Command::Solve(a) => solve::cmd_solve(&a),
        Command::Sweep(a) => sweep::cmd_sweep(&a),
        Command::Simulate(a) => simulate::cmd_simulate(&a),
        Command::Verify(a) => verify::cmd_verify(&a),
    };
    result.unwrap_or_else(Run::from)
}

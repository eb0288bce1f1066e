//! Numerical kernels shared by every solver: both real branches of the
//! Lambert W function, a bracketed root finder, adaptive quadrature and the
//! seeded random-stream contract used by the simulator.
//!
//! Everything here is a pure function of its inputs. Random sources are
//! single-owner values; hand one stream to each worker.

mod lambert;
mod quad;
mod rng;
mod roots;

pub use lambert::{lambert_w0, lambert_wm1};
pub use quad::integrate;
pub use rng::{rng_stream, RngStream};
pub use roots::find_root;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` handed to the root finder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::NonFinite {
                context: "bracket endpoint",
                value: if lo.is_finite() { hi } else { lo },
            });
        }
        if lo >= hi {
            return Err(Error::Domain {
                function: "Bracket::new",
                value: lo,
                domain: "lo < hi",
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Stopping rule for iterative kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_iter: 200,
        }
    }
}

impl ToleranceConfig {
    pub fn new(abs_tol: f64, rel_tol: f64, max_iter: usize) -> Result<Self> {
        let cfg = Self {
            abs_tol,
            rel_tol,
            max_iter,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Tight settings used where results feed identities checked near 1e-10.
    pub fn tight() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_iter: 500,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::Tolerance(format!(
                "abs_tol and rel_tol must be positive (got {}, {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Tolerance("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

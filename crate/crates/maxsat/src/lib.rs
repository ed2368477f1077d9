//! Partial weighted MaxSAT: WDIMACS instances, a CDCL SAT solver, an exact
//! built-in optimizer, and a driver for external solvers.

mod builtin;
mod external;
pub mod sat;
mod wcnf;

use std::time::{Duration, Instant};

pub use builtin::solve_builtin;
pub use external::{parse_output, solve_external, SolverOutput};
pub use wcnf::{WcnfError, WcnfInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimum,
    HardUnsat,
    /// Timed out or gave up; the model, if any, is the best one seen.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxSatOutcome {
    pub status: Status,
    /// Variable `v` (1-based) is `model[v - 1]`.
    pub model: Option<Vec<bool>>,
    /// Total weight of falsified soft clauses.
    pub cost: Option<u64>,
    pub total_soft: u64,
}

impl MaxSatOutcome {
    pub fn satisfied_weight(&self) -> Option<u64> {
        self.cost.map(|c| self.total_soft - c)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum MaxSatError {
    #[error("solver crashed: {0}")]
    SolverCrash(String),
    #[error("cannot read solver output: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    Builtin,
    /// Command line of an external solver; the instance path is appended.
    External(Vec<String>),
}

impl Backend {
    pub fn solve(&self, inst: &WcnfInstance, timeout: Option<Duration>) -> Result<MaxSatOutcome, MaxSatError> {
        match self {
            Backend::Builtin => Ok(solve_builtin(inst, timeout.map(|t| Instant::now() + t))),
            Backend::External(cmd) => solve_external(inst, cmd, timeout),
        }
    }
}

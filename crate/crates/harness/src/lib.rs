//! Library side of the `reoptlab` command: generators, verification sweeps,
//! cold-versus-hinted experiments and DOT export.

pub mod artifacts;
pub mod dot;
pub mod experiment;
pub mod gen;
pub mod sweep;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COUNTEREXAMPLE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {field}: {reason}")]
    InvalidConfig { field: String, reason: String },
    #[error("trial {trial}: cold and hinted verdicts differ; reproducer:\n{reproducer}")]
    VerdictMismatch { trial: usize, reproducer: String },
    #[error(transparent)]
    Core(#[from] reoptlab_core::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        use reoptlab_core::Error as E;
        match self {
            HarnessError::VerdictMismatch { .. } => EXIT_COUNTEREXAMPLE,
            HarnessError::Core(
                E::BudgetExceeded(_)
                | E::TableBudgetExceeded { .. }
                | E::AlphabetTooLarge { .. }
                | E::GraphTooLarge { .. },
            ) => EXIT_BUDGET,
            _ => EXIT_USAGE,
        }
    }
}

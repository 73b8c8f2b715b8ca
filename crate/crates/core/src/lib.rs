//! Reductions, exact solvers and hint-reuse strategies for SAT, vertex cover
//! and STRIPS planning when an instance is modified after it was solved.

pub mod cnf;
pub mod dimacs;
pub mod error;
pub mod gadget;
pub mod graph;
pub mod hint;
pub mod plan_reductions;
pub mod sat_reductions;
pub mod solve;
pub mod strips;

pub use cnf::{
    apply_changes, evaluate, Assignment, ChangeSet, Clause, CnfFormula, ElementaryChange, Literal,
    Variable,
};
pub use error::{Error, Result};
pub use graph::{Cover, CoverBudget, Edge, Graph, NodeId};
pub use hint::{HintTable, Lookup, ReuseOutcome};
pub use strips::{Condition, Goal, Plan, StripsInstance, StripsOperator};

use thiserror::Error;

use crate::cnf::{Clause, Literal, Variable};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("variable ids start at 1")]
    ZeroVariable,
    #[error("literal {0} uses a variable outside the declared alphabet")]
    OutsideAlphabet(Literal),
    #[error("alphabet has {size} variables, oracle limit is {limit}")]
    AlphabetTooLarge { size: usize, limit: usize },
    #[error("clause {0} is both added and deleted")]
    ConflictingChange(Clause),
    #[error("fresh variable {0} already occurs in the alphabet")]
    FreshVariableTaken(Variable),
    #[error("source formula contains the empty clause")]
    EmptyClauseInSource,

    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("self-loop on node `{0}`")]
    SelfLoop(String),
    #[error("component with {size} nodes exceeds the oracle limit of {limit}")]
    GraphTooLarge { size: usize, limit: usize },
    #[error("budget {budget} exceeds the node count {nodes}")]
    BudgetTooLarge { budget: usize, nodes: usize },
    #[error("hint is invalid: {0}")]
    InvalidHint(String),

    #[error("clause {0} has more than three literals")]
    ClauseTooLarge(Clause),
    #[error("clause {0} is tautological")]
    TautologyRejected(Clause),
    #[error("the empty clause has no gadget")]
    EmptyClauseRejected,
    #[error("unit clause {0} is already present")]
    UnitAlreadyPresent(Literal),
    #[error("unit clause {0} is not present")]
    UnitNotPresent(Literal),
    #[error("the unit slot for {0} was already spent by an earlier removal")]
    UnitSlotSpent(Literal),
    #[error("clause {0} is outside the clause universe of the full gadget")]
    ClauseOutsideUniverse(Clause),

    #[error("operator not applicable: {0}")]
    NotApplicable(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("unknown condition `{0}`")]
    UnknownCondition(String),
    #[error("operator `{0}` has a condition in both its positive and negative preconditions")]
    ContradictoryPreconditions(String),
    #[error("goal has a condition that must be both true and false")]
    ContradictoryGoal,
    #[error("operator `{0}` has negative postconditions; only positive postconditions are supported")]
    NegativePostconditions(String),
    #[error("search budget of {0} exhausted")]
    BudgetExceeded(usize),
    #[error("name `{0}` already used in the instance")]
    NameCollision(String),

    #[error("table would need {needed} entries, budget is {budget}")]
    TableBudgetExceeded { needed: usize, budget: usize },
    #[error("candidate list is invalid: {0}")]
    InvalidCandidates(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("json: {0}")]
    Json(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

//! Propositional CNF data model: variables, literals, canonical clauses,
//! formulas with a declared alphabet, total assignments and change sets.
//!
//! Clause collections have set semantics throughout. A formula carries its
//! alphabet explicitly, so a formula may declare variables that none of its
//! clauses mention.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// A propositional variable, identified by a positive index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable(u32);

impl Variable {
    pub fn new(id: u32) -> Result<Self> {
        if id == 0 {
            return Err(Error::ZeroVariable);
        }
        Ok(Variable(id))
    }

    pub fn id(self) -> u32 {
        self.0
    }

    pub fn positive(self) -> Literal {
        Literal::new(self, false)
    }

    pub fn negative(self) -> Literal {
        Literal::new(self, true)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A variable with a polarity. Orders by variable first, positive before
/// negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    var: Variable,
    negated: bool,
}

impl Literal {
    pub fn new(var: Variable, negated: bool) -> Self {
        Literal { var, negated }
    }

    /// Parses a DIMACS-style signed integer.
    pub fn from_dimacs(value: i64) -> Result<Self> {
        let id = u32::try_from(value.unsigned_abs()).map_err(|_| Error::ZeroVariable)?;
        Ok(Literal::new(Variable::new(id)?, value < 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let id = i64::from(self.var.0);
        if self.negated {
            -id
        } else {
            id
        }
    }

    pub fn var(self) -> Variable {
        self.var
    }

    pub fn is_positive(self) -> bool {
        !self.negated
    }

    pub fn negate(self) -> Self {
        Literal {
            var: self.var,
            negated: !self.negated,
        }
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        self.negate()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "-{}", self.var)
        } else {
            write!(f, "{}", self.var)
        }
    }
}

/// A disjunction of literals in canonical form: sorted and deduplicated.
/// Tautologies are representable; the empty clause is the constant false.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause(Vec<Literal>);

impl Clause {
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Self {
        let mut lits: Vec<Literal> = literals.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        Clause(lits)
    }

    pub fn empty() -> Self {
        Clause(Vec::new())
    }

    pub fn unit(lit: Literal) -> Self {
        Clause(vec![lit])
    }

    pub fn from_dimacs(values: &[i64]) -> Result<Self> {
        let lits = values
            .iter()
            .map(|&v| Literal::from_dimacs(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(Clause::new(lits))
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_unit(&self) -> Option<Literal> {
        match self.0.as_slice() {
            [l] => Some(*l),
            _ => None,
        }
    }

    pub fn contains(&self, lit: Literal) -> bool {
        self.0.binary_search(&lit).is_ok()
    }

    /// True when some variable occurs with both polarities.
    pub fn is_tautology(&self) -> bool {
        self.0
            .windows(2)
            .any(|w| w[0].var == w[1].var && w[0].negated != w[1].negated)
    }

    pub fn variables(&self) -> impl Iterator<Item = Variable> + '_ {
        self.0.iter().map(|l| l.var)
    }

    /// `self ∨ lit`
    pub fn with_literal(&self, lit: Literal) -> Clause {
        Clause::new(self.0.iter().copied().chain(std::iter::once(lit)))
    }

    /// `self ∨ other`
    pub fn disjoin(&self, other: &Clause) -> Clause {
        Clause::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        self.0.iter().any(|&l| assignment.value_of(l))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// A set of clauses over a declared alphabet.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    alphabet: BTreeSet<Variable>,
    clauses: BTreeSet<Clause>,
}

impl CnfFormula {
    pub fn new(
        alphabet: impl IntoIterator<Item = Variable>,
        clauses: impl IntoIterator<Item = Clause>,
    ) -> Result<Self> {
        let alphabet: BTreeSet<Variable> = alphabet.into_iter().collect();
        let clauses: BTreeSet<Clause> = clauses.into_iter().collect();
        for c in &clauses {
            if let Some(&l) = c.literals().iter().find(|l| !alphabet.contains(&l.var)) {
                return Err(Error::OutsideAlphabet(l));
            }
        }
        Ok(CnfFormula { alphabet, clauses })
    }

    /// Formula whose alphabet is exactly the set of mentioned variables.
    pub fn from_clauses(clauses: impl IntoIterator<Item = Clause>) -> Self {
        let clauses: BTreeSet<Clause> = clauses.into_iter().collect();
        let alphabet = clauses.iter().flat_map(|c| c.variables()).collect();
        CnfFormula { alphabet, clauses }
    }

    /// Formula over the contiguous alphabet `x1..=x<num_vars>`.
    pub fn over(num_vars: u32, clauses: impl IntoIterator<Item = Clause>) -> Result<Self> {
        CnfFormula::new((1..=num_vars).map(Variable), clauses)
    }

    /// Shorthand for tests and examples: DIMACS integer clauses over `1..=num_vars`.
    pub fn from_dimacs_clauses(num_vars: u32, clauses: &[&[i64]]) -> Result<Self> {
        let cs = clauses
            .iter()
            .map(|c| Clause::from_dimacs(c))
            .collect::<Result<Vec<_>>>()?;
        CnfFormula::over(num_vars, cs)
    }

    pub fn alphabet(&self) -> &BTreeSet<Variable> {
        &self.alphabet
    }

    pub fn clauses(&self) -> &BTreeSet<Clause> {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn contains(&self, clause: &Clause) -> bool {
        self.clauses.contains(clause)
    }

    /// Variables that occur in at least one clause.
    pub fn mentioned_variables(&self) -> BTreeSet<Variable> {
        self.clauses.iter().flat_map(|c| c.variables()).collect()
    }

    pub fn max_variable(&self) -> Option<Variable> {
        self.alphabet.iter().next_back().copied()
    }

    /// Smallest variable id strictly above every declared variable.
    pub fn fresh_variable(&self) -> Variable {
        Variable(self.max_variable().map_or(1, |v| v.0 + 1))
    }

    pub fn literal_occurrences(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    pub fn with_alphabet(mut self, extra: impl IntoIterator<Item = Variable>) -> Self {
        self.alphabet.extend(extra);
        self
    }

    pub(crate) fn insert(&mut self, clause: Clause) {
        self.alphabet.extend(clause.variables());
        self.clauses.insert(clause);
    }

    pub(crate) fn remove(&mut self, clause: &Clause) -> bool {
        self.clauses.remove(clause)
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}

/// A total assignment: listed variables are true, all others false.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment {
    true_vars: BTreeSet<Variable>,
}

impl Assignment {
    pub fn new(true_vars: impl IntoIterator<Item = Variable>) -> Self {
        Assignment {
            true_vars: true_vars.into_iter().collect(),
        }
    }

    pub fn from_ids(ids: &[u32]) -> Result<Self> {
        Ok(Assignment::new(
            ids.iter().map(|&id| Variable::new(id)).collect::<Result<Vec<_>>>()?,
        ))
    }

    pub fn true_vars(&self) -> &BTreeSet<Variable> {
        &self.true_vars
    }

    pub fn is_true(&self, v: Variable) -> bool {
        self.true_vars.contains(&v)
    }

    pub fn value_of(&self, lit: Literal) -> bool {
        self.is_true(lit.var) == lit.is_positive()
    }

    pub fn set(&mut self, v: Variable, value: bool) {
        if value {
            self.true_vars.insert(v);
        } else {
            self.true_vars.remove(&v);
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.true_vars.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// One clause addition or deletion.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementaryChange {
    Add(Clause),
    Delete(Clause),
}

impl ElementaryChange {
    pub fn clause(&self) -> &Clause {
        match self {
            ElementaryChange::Add(c) | ElementaryChange::Delete(c) => c,
        }
    }
}

impl fmt::Display for ElementaryChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ElementaryChange::Add(c) => write!(f, "+{c}"),
            ElementaryChange::Delete(c) => write!(f, "-{c}"),
        }
    }
}

/// Clause additions and deletions applied to a formula. Deletions go first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChangeSet {
    additions: Vec<Clause>,
    deletions: Vec<Clause>,
}

impl ChangeSet {
    pub fn new(additions: Vec<Clause>, deletions: Vec<Clause>) -> Result<Self> {
        if let Some(c) = additions.iter().find(|c| deletions.contains(c)) {
            return Err(Error::ConflictingChange(c.clone()));
        }
        Ok(ChangeSet {
            additions,
            deletions,
        })
    }

    pub fn empty() -> Self {
        ChangeSet::default()
    }

    pub fn adding(clauses: impl IntoIterator<Item = Clause>) -> Self {
        ChangeSet {
            additions: clauses.into_iter().collect(),
            deletions: Vec::new(),
        }
    }

    pub fn deleting(clauses: impl IntoIterator<Item = Clause>) -> Self {
        ChangeSet {
            additions: Vec::new(),
            deletions: clauses.into_iter().collect(),
        }
    }

    pub fn from_elementary<'a>(
        changes: impl IntoIterator<Item = &'a ElementaryChange>,
    ) -> Result<Self> {
        let (mut adds, mut dels) = (Vec::new(), Vec::new());
        for ch in changes {
            match ch {
                ElementaryChange::Add(c) => adds.push(c.clone()),
                ElementaryChange::Delete(c) => dels.push(c.clone()),
            }
        }
        ChangeSet::new(adds, dels)
    }

    pub fn additions(&self) -> &[Clause] {
        &self.additions
    }

    pub fn deletions(&self) -> &[Clause] {
        &self.deletions
    }

    pub fn is_empty(&self) -> bool {
        self.additions.is_empty() && self.deletions.is_empty()
    }

    pub fn elementary(&self) -> Vec<ElementaryChange> {
        self.deletions
            .iter()
            .cloned()
            .map(ElementaryChange::Delete)
            .chain(self.additions.iter().cloned().map(ElementaryChange::Add))
            .collect()
    }

    /// Deletions that name a clause absent from `formula`.
    pub fn missing_deletions<'a>(&'a self, formula: &CnfFormula) -> Vec<&'a Clause> {
        self.deletions
            .iter()
            .filter(|c| !formula.contains(c))
            .collect()
    }
}

/// True iff every clause has a literal made true by `assignment`.
pub fn evaluate(formula: &CnfFormula, assignment: &Assignment) -> bool {
    formula.clauses.iter().all(|c| c.is_satisfied_by(assignment))
}

/// Deletes, then adds. Deleting an absent clause is logged and ignored.
pub fn apply_changes(formula: &CnfFormula, changes: &ChangeSet) -> CnfFormula {
    let mut out = formula.clone();
    for c in &changes.deletions {
        if !out.remove(c) {
            log::warn!("deleting clause {c} which is not in the formula");
        }
    }
    for c in &changes.additions {
        out.insert(c.clone());
    }
    out
}

/// True iff the changed formula only mentions variables of the original
/// alphabet.
pub fn is_alphabet_preserving(formula: &CnfFormula, changes: &ChangeSet) -> bool {
    apply_changes(formula, changes)
        .mentioned_variables()
        .is_subset(&formula.alphabet)
}

/// `{lit ∨ γ | γ ∈ formula}`
pub fn disjoin_literal(formula: &CnfFormula, lit: Literal) -> CnfFormula {
    let mut alphabet = formula.alphabet.clone();
    alphabet.insert(lit.var);
    CnfFormula {
        alphabet,
        clauses: formula.clauses.iter().map(|c| c.with_literal(lit)).collect(),
    }
}

/// `{γ ∨ δ | γ ∈ left, δ ∈ right}`
pub fn cross_disjoin(left: &CnfFormula, right: &CnfFormula) -> CnfFormula {
    let alphabet = left.alphabet.union(&right.alphabet).copied().collect();
    let clauses = left
        .clauses
        .iter()
        .flat_map(|l| right.clauses.iter().map(move |r| l.disjoin(r)))
        .collect();
    CnfFormula { alphabet, clauses }
}

//! Satisfiability solvers: an enumeration oracle and a plain DPLL.
//!
//! Neither is meant to be fast. The oracle exists to check everything else,
//! DPLL to give a deterministic search with countable work.

use crate::cnf::{Assignment, CnfFormula, Variable};
use crate::error::{Error, Result};

pub const DEFAULT_ORACLE_LIMIT: usize = 20;

/// Exhaustive enumeration in binary-counting order: bit `j` of the counter
/// is the value of the `j`-th smallest variable of the alphabet.
#[derive(Clone, Copy, Debug)]
pub struct BruteForce {
    limit: usize,
}

impl Default for BruteForce {
    fn default() -> Self {
        BruteForce {
            limit: DEFAULT_ORACLE_LIMIT,
        }
    }
}

struct Packed {
    vars: Vec<Variable>,
    // (positive mask, negative mask) per clause
    clauses: Vec<(u64, u64)>,
}

impl Packed {
    fn satisfies(&self, bits: u64) -> bool {
        self.clauses
            .iter()
            .all(|&(pos, neg)| bits & pos != 0 || !bits & neg != 0)
    }

    fn assignment(&self, bits: u64) -> Assignment {
        Assignment::new(
            self.vars
                .iter()
                .enumerate()
                .filter(|(j, _)| bits >> j & 1 == 1)
                .map(|(_, &v)| v),
        )
    }
}

impl BruteForce {
    /// Limits above 63 variables are clamped.
    pub fn with_limit(limit: usize) -> Self {
        BruteForce {
            limit: limit.min(63),
        }
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    fn pack(&self, formula: &CnfFormula) -> Result<Packed> {
        let vars: Vec<Variable> = formula.alphabet().iter().copied().collect();
        if vars.len() > self.limit {
            return Err(Error::AlphabetTooLarge {
                size: vars.len(),
                limit: self.limit,
            });
        }
        let clauses = formula
            .clauses()
            .iter()
            .map(|c| {
                c.literals().iter().fold((0u64, 0u64), |(p, n), l| {
                    let bit = 1u64 << vars.binary_search(&l.var()).expect("alphabet checked");
                    if l.is_positive() {
                        (p | bit, n)
                    } else {
                        (p, n | bit)
                    }
                })
            })
            .collect();
        Ok(Packed { vars, clauses })
    }

    pub fn solve(&self, formula: &CnfFormula) -> Result<Option<Assignment>> {
        let packed = self.pack(formula)?;
        Ok((0..1u64 << packed.vars.len())
            .find(|&bits| packed.satisfies(bits))
            .map(|bits| packed.assignment(bits)))
    }

    pub fn is_satisfiable(&self, formula: &CnfFormula) -> Result<bool> {
        Ok(self.solve(formula)?.is_some())
    }

    pub fn models(&self, formula: &CnfFormula) -> Result<Vec<Assignment>> {
        let packed = self.pack(formula)?;
        Ok((0..1u64 << packed.vars.len())
            .filter(|&bits| packed.satisfies(bits))
            .map(|bits| packed.assignment(bits))
            .collect())
    }

    pub fn count_models(&self, formula: &CnfFormula) -> Result<u64> {
        let packed = self.pack(formula)?;
        Ok((0..1u64 << packed.vars.len())
            .filter(|&bits| packed.satisfies(bits))
            .count() as u64)
    }
}

/// Brute-force oracle with the default variable limit.
pub fn solve_brute(formula: &CnfFormula) -> Result<Option<Assignment>> {
    BruteForce::default().solve(formula)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpllOutcome {
    pub model: Option<Assignment>,
    pub decisions: u64,
    pub propagations: u64,
}

impl DpllOutcome {
    pub fn work_units(&self) -> u64 {
        self.decisions + self.propagations
    }
}

struct Dpll {
    vars: Vec<Variable>,
    // literals as (variable index, wanted value)
    clauses: Vec<Vec<(usize, bool)>>,
    decisions: u64,
    propagations: u64,
}

enum ClauseState {
    Satisfied,
    Falsified,
    Unit(usize, bool),
    Open,
}

impl Dpll {
    fn new(formula: &CnfFormula) -> Self {
        let vars: Vec<Variable> = formula.alphabet().iter().copied().collect();
        let clauses = formula
            .clauses()
            .iter()
            .map(|c| {
                c.literals()
                    .iter()
                    .map(|l| {
                        let idx = vars.binary_search(&l.var()).expect("literal in alphabet");
                        (idx, l.is_positive())
                    })
                    .collect()
            })
            .collect();
        Dpll {
            vars,
            clauses,
            decisions: 0,
            propagations: 0,
        }
    }

    fn clause_state(clause: &[(usize, bool)], values: &[Option<bool>]) -> ClauseState {
        let mut free = None;
        let mut free_count = 0;
        for &(idx, want) in clause {
            match values[idx] {
                Some(v) if v == want => return ClauseState::Satisfied,
                Some(_) => {}
                None => {
                    free_count += 1;
                    free = Some((idx, want));
                }
            }
        }
        match (free_count, free) {
            (0, _) => ClauseState::Falsified,
            (1, Some((idx, want))) => ClauseState::Unit(idx, want),
            _ => ClauseState::Open,
        }
    }

    /// Unit propagation to fixpoint. Returns false on conflict.
    fn propagate(&mut self, values: &mut [Option<bool>]) -> bool {
        loop {
            let mut changed = false;
            for clause in &self.clauses {
                match Self::clause_state(clause, values) {
                    ClauseState::Falsified => return false,
                    ClauseState::Unit(idx, want) => {
                        values[idx] = Some(want);
                        self.propagations += 1;
                        changed = true;
                    }
                    ClauseState::Satisfied | ClauseState::Open => {}
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn all_satisfied(&self, values: &[Option<bool>]) -> bool {
        self.clauses
            .iter()
            .all(|c| matches!(Self::clause_state(c, values), ClauseState::Satisfied))
    }

    fn search(&mut self, mut values: Vec<Option<bool>>) -> Option<Vec<Option<bool>>> {
        if !self.propagate(&mut values) {
            return None;
        }
        if self.all_satisfied(&values) {
            return Some(values);
        }
        // lowest unassigned variable, true first
        let idx = values.iter().position(Option::is_none)?;
        for value in [true, false] {
            self.decisions += 1;
            let mut next = values.clone();
            next[idx] = Some(value);
            if let Some(model) = self.search(next) {
                return Some(model);
            }
        }
        None
    }
}

pub fn solve_dpll_counted(formula: &CnfFormula) -> DpllOutcome {
    let mut dpll = Dpll::new(formula);
    let start = vec![None; dpll.vars.len()];
    let result = dpll.search(start);
    let model = result.map(|values| {
        Assignment::new(
            dpll.vars
                .iter()
                .zip(values)
                .filter(|(_, v)| *v == Some(true))
                .map(|(&var, _)| var),
        )
    });
    DpllOutcome {
        model,
        decisions: dpll.decisions,
        propagations: dpll.propagations,
    }
}

pub fn solve_dpll(formula: &CnfFormula) -> Option<Assignment> {
    solve_dpll_counted(formula).model
}

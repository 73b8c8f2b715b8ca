//! Reductions from satisfiability of `G` to satisfiability after a change.
//!
//! * fixed model: `G ↦ ⟨a ∨ G, ¬a, {a}⟩`, where the known model `{a}` says
//!   nothing about `G`;
//! * unique model: `G ↦ {a} ∪ ((X ∪ {a}) ∨ (G ∪ {¬a}))` with the change
//!   "add `¬a`, delete `a`". The constructed formula has the single model
//!   `{a} ∪ X`, so no choice of known model can help;
//! * nSAT instances pair a formula with a unary string of its variable count.

use crate::cnf::{
    apply_changes, cross_disjoin, disjoin_literal, evaluate, Assignment, ChangeSet, Clause,
    CnfFormula, Variable,
};
use crate::error::{Error, Result};
use crate::solve::BruteForce;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedModelInstance {
    formula: CnfFormula,
    change_clause: Clause,
    hint_model: Assignment,
    fresh: Variable,
}

impl FixedModelInstance {
    pub fn new(formula: CnfFormula, change_clause: Clause, hint_model: Assignment) -> Result<Self> {
        if !evaluate(&formula, &hint_model) {
            return Err(Error::InvalidHint(format!(
                "{hint_model} does not satisfy {formula}"
            )));
        }
        let fresh = formula.fresh_variable();
        Ok(FixedModelInstance {
            formula,
            change_clause,
            hint_model,
            fresh,
        })
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn change_clause(&self) -> &Clause {
        &self.change_clause
    }

    pub fn hint_model(&self) -> &Assignment {
        &self.hint_model
    }

    /// The variable `a` introduced by the reduction.
    pub fn fresh_variable(&self) -> Variable {
        self.fresh
    }

    pub fn changes(&self) -> ChangeSet {
        ChangeSet::adding([self.change_clause.clone()])
    }

    /// `F ∪ {γ}`
    pub fn changed_formula(&self) -> CnfFormula {
        apply_changes(&self.formula, &self.changes())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniqueModelInstance {
    formula: CnfFormula,
    add_clause: Clause,
    del_clause: Clause,
    fresh: Variable,
}

impl UniqueModelInstance {
    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn add_clause(&self) -> &Clause {
        &self.add_clause
    }

    pub fn del_clause(&self) -> &Clause {
        &self.del_clause
    }

    pub fn fresh_variable(&self) -> Variable {
        self.fresh
    }

    /// The model the construction guarantees: every variable true.
    pub fn expected_model(&self) -> Assignment {
        Assignment::new(self.formula.alphabet().iter().copied())
    }

    pub fn changes(&self) -> ChangeSet {
        ChangeSet::new(vec![self.add_clause.clone()], vec![self.del_clause.clone()])
            .expect("add and delete clauses differ")
    }

    /// `F ∪ {γ} \ {δ}`
    pub fn changed_formula(&self) -> CnfFormula {
        apply_changes(&self.formula, &self.changes())
    }

    /// Exhaustively checks that `expected_model` is the only model.
    /// Exponential in the alphabet size.
    pub fn verify_unique_model(&self, oracle: &BruteForce) -> Result<bool> {
        let models = oracle.models(&self.formula)?;
        Ok(models.len() == 1 && models[0] == self.expected_model())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NsatInstance {
    unary_part: String,
    formula: CnfFormula,
}

impl NsatInstance {
    pub fn unary_part(&self) -> &str {
        &self.unary_part
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn num_variables(&self) -> usize {
        self.unary_part.len()
    }
}

/// `G ↦ ⟨a ∨ G, ¬a, {a}⟩` with `a` one above the largest variable of `G`.
pub fn reduce_fixed_model(g: &CnfFormula) -> FixedModelInstance {
    let a = g.fresh_variable();
    let formula = disjoin_literal(g, a.positive());
    FixedModelInstance {
        formula,
        change_clause: Clause::unit(a.negative()),
        hint_model: Assignment::new([a]),
        fresh: a,
    }
}

/// `G ↦ {a} ∪ ((X ∪ {a}) ∨ (G ∪ {¬a}))`, change: add `¬a`, delete `a`.
///
/// `G` must not contain the empty clause: `a ∨ ∅` would coincide with the
/// deleted unit `a`.
pub fn reduce_unique_model(g: &CnfFormula) -> Result<UniqueModelInstance> {
    if g.contains(&Clause::empty()) {
        return Err(Error::EmptyClauseInSource);
    }
    let a = g.fresh_variable();
    let unit_a = Clause::unit(a.positive());
    let unit_not_a = Clause::unit(a.negative());

    let left = CnfFormula::from_clauses(
        g.alphabet()
            .iter()
            .map(|v| Clause::unit(v.positive()))
            .chain(std::iter::once(unit_a.clone())),
    );
    let mut right = g.clone();
    right.insert(unit_not_a.clone());

    let mut formula = cross_disjoin(&left, &right);
    formula.insert(unit_a.clone());
    let formula = formula.with_alphabet(g.alphabet().iter().copied());

    Ok(UniqueModelInstance {
        formula,
        add_clause: unit_not_a,
        del_clause: unit_a,
        fresh: a,
    })
}

/// Pairs `y` with `1^n`, `n` the size of its declared alphabet.
pub fn make_nsat_instance(y: &CnfFormula) -> NsatInstance {
    NsatInstance {
        unary_part: "1".repeat(y.alphabet().len()),
        formula: y.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::solve_brute;
    use std::collections::BTreeSet;

    fn f(n: u32, cs: &[&[i64]]) -> CnfFormula {
        CnfFormula::from_dimacs_clauses(n, cs).unwrap()
    }

    fn cl(lits: &[i64]) -> Clause {
        Clause::from_dimacs(lits).unwrap()
    }

    fn sat(f: &CnfFormula) -> bool {
        solve_brute(f).unwrap().is_some()
    }

    #[test]
    fn fixed_model_on_empty_formula() {
        let inst = reduce_fixed_model(&CnfFormula::default());
        assert!(inst.formula().is_empty());
        assert_eq!(inst.change_clause(), &cl(&[-1]));
        assert_eq!(inst.hint_model(), &Assignment::from_ids(&[1]).unwrap());
        assert!(sat(&inst.changed_formula()));
    }

    #[test]
    fn fixed_model_contradiction() {
        let inst = reduce_fixed_model(&f(1, &[&[1], &[-1]]));
        let expect: BTreeSet<_> = [cl(&[2, 1]), cl(&[2, -1])].into_iter().collect();
        assert_eq!(inst.formula().clauses(), &expect);
        assert!(evaluate(inst.formula(), inst.hint_model()));
        assert!(!sat(&inst.changed_formula()));
    }

    #[test]
    fn fixed_model_satisfiable() {
        let inst = reduce_fixed_model(&f(1, &[&[1]]));
        assert_eq!(inst.formula().clauses().len(), 1);
        assert!(inst.formula().contains(&cl(&[1, 2])));
        let model = solve_brute(&inst.changed_formula()).unwrap().unwrap();
        assert_eq!(model, Assignment::from_ids(&[1]).unwrap());
    }

    #[test]
    fn fixed_model_instance_checks_hint() {
        let g = f(1, &[&[1]]);
        assert!(FixedModelInstance::new(g.clone(), cl(&[-1]), Assignment::default()).is_err());
        assert!(FixedModelInstance::new(g, cl(&[-1]), Assignment::from_ids(&[1]).unwrap()).is_ok());
    }

    #[test]
    fn unique_model_single_unit() {
        let inst = reduce_unique_model(&f(1, &[&[1]])).unwrap();
        let expect: BTreeSet<_> = [cl(&[2]), cl(&[1]), cl(&[1, -2]), cl(&[2, 1]), cl(&[2, -2])]
            .into_iter()
            .collect();
        assert_eq!(inst.formula().clauses(), &expect);
        assert!(inst.verify_unique_model(&BruteForce::default()).unwrap());
        assert_eq!(inst.expected_model(), Assignment::from_ids(&[1, 2]).unwrap());
        let model = solve_brute(&inst.changed_formula()).unwrap().unwrap();
        assert_eq!(model, Assignment::from_ids(&[1]).unwrap());
    }

    #[test]
    fn unique_model_contradiction() {
        let inst = reduce_unique_model(&f(1, &[&[1], &[-1]])).unwrap();
        assert!(inst.verify_unique_model(&BruteForce::default()).unwrap());
        assert!(!sat(&inst.changed_formula()));
    }

    #[test]
    fn unique_model_empty_alphabet() {
        // (X ∪ {a}) ∨ (G ∪ {¬a}) = {a ∨ ¬a}; the tautology stays.
        let inst = reduce_unique_model(&CnfFormula::default()).unwrap();
        let expect: BTreeSet<_> = [cl(&[1]), cl(&[1, -1])].into_iter().collect();
        assert_eq!(inst.formula().clauses(), &expect);
        assert!(inst.verify_unique_model(&BruteForce::default()).unwrap());
        let changed = inst.changed_formula();
        assert_eq!(
            BruteForce::default().models(&changed).unwrap(),
            vec![Assignment::default()]
        );
    }

    #[test]
    fn unique_model_rejects_empty_clause() {
        let g = CnfFormula::from_clauses([Clause::empty()]);
        assert_eq!(reduce_unique_model(&g), Err(Error::EmptyClauseInSource));
    }

    #[test]
    fn fresh_variable_is_outside_declared_alphabet() {
        // x3 declared but unused
        let g = CnfFormula::new(
            [1, 3].map(|i| Variable::new(i).unwrap()),
            [cl(&[1])],
        )
        .unwrap();
        assert_eq!(reduce_fixed_model(&g).fresh_variable().id(), 4);
        let inst = reduce_unique_model(&g).unwrap();
        assert_eq!(inst.fresh_variable().id(), 4);
        assert!(inst.formula().contains(&cl(&[3, -4])));
    }

    #[test]
    fn nsat_examples() {
        assert_eq!(make_nsat_instance(&f(2, &[&[1, 2]])).unary_part(), "11");
        assert_eq!(make_nsat_instance(&CnfFormula::default()).unary_part(), "");
        assert_eq!(make_nsat_instance(&f(3, &[&[1, -3]])).unary_part(), "111");
    }
}

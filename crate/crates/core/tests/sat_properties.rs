use proptest::prelude::*;

use reoptlab_core::cnf::{
    apply_changes, cross_disjoin, disjoin_literal, evaluate, is_alphabet_preserving, Assignment,
    ChangeSet, Clause, CnfFormula, ElementaryChange, Literal, Variable,
};
use reoptlab_core::dimacs::{parse_changes, parse_dimacs, write_changes, write_dimacs};
use reoptlab_core::hint::{
    compile_table, lookup, parse_table_json, reuse_model, write_table_json, Lookup,
};
use reoptlab_core::sat_reductions::{reduce_fixed_model, reduce_unique_model};
use reoptlab_core::solve::{solve_dpll, solve_dpll_counted, BruteForce};

fn clause(vars: u32) -> impl Strategy<Value = Clause> {
    prop::collection::vec((1..=vars, any::<bool>()), 1..=3).prop_map(|lits| {
        Clause::new(
            lits.into_iter()
                .map(|(v, neg)| Literal::new(Variable::new(v).unwrap(), neg)),
        )
    })
}

fn formula_over(vars: u32, max_clauses: usize) -> impl Strategy<Value = CnfFormula> {
    prop::collection::vec(clause(vars), 0..=max_clauses)
        .prop_map(move |cs| CnfFormula::over(vars, cs).unwrap())
}

fn formula(max_vars: u32, max_clauses: usize) -> impl Strategy<Value = CnfFormula> {
    (1..=max_vars).prop_flat_map(move |n| formula_over(n, max_clauses))
}

fn assignment(vars: u32) -> impl Strategy<Value = Assignment> {
    prop::collection::vec(any::<bool>(), vars as usize).prop_map(|bits| {
        Assignment::new(
            bits.into_iter()
                .enumerate()
                .filter(|(_, b)| *b)
                .map(|(i, _)| Variable::new(i as u32 + 1).unwrap()),
        )
    })
}

fn sat(f: &CnfFormula) -> bool {
    BruteForce::default().is_satisfiable(f).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn dpll_agrees_with_brute_force(f in formula(6, 14)) {
        let dpll = solve_dpll(&f);
        prop_assert_eq!(dpll.is_some(), sat(&f));
        if let Some(m) = dpll {
            prop_assert!(evaluate(&f, &m));
        }
    }

    #[test]
    fn add_then_delete_is_identity(f in formula_over(4, 5), c in clause(4)) {
        prop_assume!(!f.contains(&c));
        let added = apply_changes(&f, &ChangeSet::adding([c.clone()]));
        prop_assert!(added.contains(&c));
        prop_assert_eq!(apply_changes(&added, &ChangeSet::deleting([c])), f);
    }

    #[test]
    fn changes_within_alphabet_preserve_it(f in formula_over(4, 5), add in prop::collection::vec(clause(4), 0..3)) {
        let changes = ChangeSet::adding(add);
        prop_assert!(is_alphabet_preserving(&f, &changes));
        let changed = apply_changes(&f, &changes);
        prop_assert_eq!(changed.alphabet(), f.alphabet());
    }

    #[test]
    fn disjoining_a_literal_adds_models(f in formula_over(4, 5), v in 1u32..=4, neg: bool, a in assignment(4)) {
        let lit = Literal::new(Variable::new(v).unwrap(), neg);
        let g = disjoin_literal(&f, lit);
        prop_assert!(!evaluate(&f, &a) || evaluate(&g, &a));
        prop_assert!(!a.value_of(lit) || evaluate(&g, &a));
    }

    #[test]
    fn cross_disjunction_is_model_union(f in formula_over(4, 4), g in formula_over(4, 4), a in assignment(4)) {
        let h = cross_disjoin(&f, &g);
        prop_assert_eq!(evaluate(&h, &a), evaluate(&f, &a) || evaluate(&g, &a));
    }

    #[test]
    fn fixed_model_reduction(g in formula(4, 6)) {
        let inst = reduce_fixed_model(&g);
        prop_assert!(evaluate(inst.formula(), inst.hint_model()));
        prop_assert_eq!(sat(&inst.changed_formula()), sat(&g));
    }

    #[test]
    fn unique_model_reduction(g in formula(4, 6)) {
        let inst = reduce_unique_model(&g).unwrap();
        prop_assert_eq!(BruteForce::default().count_models(inst.formula()).unwrap(), 1);
        prop_assert!(evaluate(inst.formula(), &inst.expected_model()));
        prop_assert_eq!(sat(&inst.changed_formula()), sat(&g));
    }

    #[test]
    fn reuse_model_agrees_with_cold_solving(f in formula_over(4, 5), add in prop::collection::vec(clause(4), 1..3)) {
        let Some(hint) = solve_dpll(&f) else { return Ok(()) };
        let changes = ChangeSet::adding(add);
        let changed = apply_changes(&f, &changes);
        let out = reuse_model(&f, &changes, &hint).unwrap();
        prop_assert_eq!(out.is_solved(), solve_dpll(&changed).is_some());
        if out.hint_used {
            prop_assert_eq!(out.solution.as_ref(), Some(&hint));
            // fast path evaluates at most every literal once
            prop_assert!(out.work_units <= changed.literal_occurrences() as u64);
            prop_assert!(evaluate(&changed, &hint));
        } else {
            prop_assert!(out.work_units >= solve_dpll_counted(&changed).work_units());
        }
    }

    #[test]
    fn table_is_complete(base in formula_over(3, 4), adds in prop::collection::vec(clause(3), 0..3), bound in 0usize..=2) {
        let mut cands: Vec<ElementaryChange> = Vec::new();
        for c in base.clauses().iter().take(1) {
            cands.push(ElementaryChange::Delete(c.clone()));
        }
        for c in adds {
            if cands.iter().all(|d| d.clause() != &c) {
                cands.push(ElementaryChange::Add(c));
            }
        }
        let table = compile_table(&base, &cands, bound).unwrap();
        prop_assert!(table.verify(&BruteForce::default()).unwrap().is_empty());
        for mask in 0u64..(1 << cands.len()) {
            let changes = table.changes_for(mask);
            let expected = sat(&apply_changes(&base, &changes));
            match lookup(&table, &changes) {
                Lookup::Hit(entry) => {
                    prop_assert!(mask.count_ones() as usize <= bound);
                    prop_assert_eq!(entry.is_some(), expected);
                }
                Lookup::Miss => prop_assert!(mask.count_ones() as usize > bound),
            }
        }
        let text = write_table_json(&table);
        prop_assert_eq!(parse_table_json(&text).unwrap(), table);
    }

    #[test]
    fn dimacs_round_trip(f in formula(6, 8)) {
        let text = write_dimacs(&f);
        let back = parse_dimacs(&text).unwrap();
        prop_assert_eq!(write_dimacs(&back), text);
        prop_assert_eq!(back.clauses(), f.clauses());
    }

    #[test]
    fn change_set_round_trip(add in prop::collection::vec(clause(5), 0..4), del in prop::collection::vec(clause(5), 0..4)) {
        let del: Vec<Clause> = del.into_iter().filter(|c| !add.contains(c)).collect();
        let changes = ChangeSet::new(add, del).unwrap();
        let text = write_changes(&changes);
        prop_assert_eq!(write_changes(&parse_changes(&text).unwrap()), text);
    }
}

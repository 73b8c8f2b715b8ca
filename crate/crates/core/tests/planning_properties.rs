use std::collections::BTreeMap;

use proptest::prelude::*;

use reoptlab_core::hint::reuse_plan;
use reoptlab_core::plan_reductions::goal_compilation;
use reoptlab_core::strips::{
    irredundant_plans, parse_instance_json, plan_exists, validate_plan, validate_plan_counted,
    write_instance_json, Condition, Goal, State, StripsInstance, StripsOperator,
    DEFAULT_ENUMERATION_BUDGET,
};

fn subset(pool: &[Condition]) -> impl Strategy<Value = State> {
    let pool = pool.to_vec();
    prop::collection::vec(any::<bool>(), pool.len())
        .prop_map(move |bits| pool.iter().zip(bits).filter(|(_, b)| *b).map(|(c, _)| c.clone()).collect())
}

fn operator(pool: &[Condition]) -> impl Strategy<Value = StripsOperator> {
    (subset(pool), subset(pool), subset(pool)).prop_map(|(pos, neg, post)| {
        let neg = neg.difference(&pos).cloned().collect();
        StripsOperator::new(pos, neg, post, State::new())
    })
}

fn instance() -> impl Strategy<Value = StripsInstance> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(p, o)| {
        let pool: Vec<Condition> = (1..=p).map(|i| Condition::new(format!("c{i}"))).collect();
        (
            prop::collection::vec(operator(&pool), o),
            subset(&pool),
            subset(&pool),
            subset(&pool),
            Just(pool),
        )
            .prop_map(|(ops, initial, must_true, must_false, pool)| {
                let must_false = must_false.difference(&must_true).cloned().collect();
                let ops: BTreeMap<String, StripsOperator> = ops
                    .into_iter()
                    .enumerate()
                    .map(|(i, op)| (format!("op{}", i + 1), op))
                    .collect();
                StripsInstance::new(
                    pool.into_iter().collect(),
                    ops,
                    initial,
                    Goal::new(must_true, must_false),
                )
                .unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn search_agrees_with_enumeration(inst in instance()) {
        let bfs = plan_exists(&inst).unwrap();
        let all = irredundant_plans(&inst, inst.conditions().len(), DEFAULT_ENUMERATION_BUDGET).unwrap();
        prop_assert_eq!(bfs.is_some(), !all.is_empty());
        for p in &all {
            prop_assert!(validate_plan(&inst, p).unwrap());
            for i in 0..p.len() {
                prop_assert!(!validate_plan(&inst, &p.without_step(i)).unwrap(), "{} is redundant", p);
            }
        }
        if let Some(p) = bfs {
            prop_assert!(validate_plan(&inst, &p).unwrap());
            prop_assert!(all.iter().all(|q| q.len() >= p.len()));
        }
    }

    #[test]
    fn goal_compilation_preserves_solvability(inst in instance(), probe in subset(&(1..=5).map(|i| Condition::new(format!("c{i}"))).collect::<Vec<_>>())) {
        let compiled = goal_compilation(&inst);
        prop_assert_eq!(plan_exists(&inst).unwrap().is_some(), plan_exists(&compiled.instance).unwrap().is_some());
        let o = compiled.instance.operator(&compiled.goal_operator).unwrap();
        let probe: State = probe.intersection(inst.conditions()).cloned().collect();
        prop_assert_eq!(o.is_applicable(&probe), inst.goal().holds_in(&probe));
    }

    #[test]
    fn validation_work_is_linear(inst in instance(), steps in prop::collection::vec(any::<prop::sample::Index>(), 0..8)) {
        let names: Vec<&String> = inst.operators().keys().collect();
        let plan = reoptlab_core::Plan::new(steps.iter().map(|i| i.get(&names).as_str()));
        let v = validate_plan_counted(&inst, &plan).unwrap();
        let sizes: usize = plan.steps().iter().map(|n| {
            let op = inst.operator(n).unwrap();
            op.pos_pre.len() + op.neg_pre.len() + op.pos_post.len() + op.neg_post.len()
        }).sum();
        let goal = inst.goal().must_true.len() + inst.goal().must_false.len();
        prop_assert!(v.work <= (sizes + goal) as u64);
    }

    #[test]
    fn reused_suffix_is_valid(inst in instance(), flip in any::<prop::sample::Index>()) {
        let Some(plan) = plan_exists(&inst).unwrap() else { return Ok(()) };
        let conds: Vec<&Condition> = inst.conditions().iter().collect();
        let c = flip.get(&conds);
        let mut initial = inst.initial().clone();
        if !initial.remove(*c) {
            initial.insert((*c).clone());
        }
        let changed = inst.with_initial(initial).unwrap();
        let out = reuse_plan(&changed, &plan).unwrap();
        prop_assert_eq!(out.is_solved(), plan_exists(&changed).unwrap().is_some());
        if let Some(p) = &out.solution {
            prop_assert!(validate_plan(&changed, p).unwrap());
        }
    }

    #[test]
    fn instance_json_round_trip(inst in instance()) {
        let text = write_instance_json(&inst);
        let back = parse_instance_json(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(write_instance_json(&back), text);
    }
}

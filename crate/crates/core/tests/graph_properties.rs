use std::collections::BTreeSet;

use proptest::prelude::*;

use reoptlab_core::cnf::{CnfFormula, Literal, Variable};
use reoptlab_core::gadget::{
    build_full_gadget, build_gadget, gadget_add_unit, gadget_remove_unit, parse_gadget_json,
    project_formula, write_gadget_json,
};
use reoptlab_core::graph::{
    decide_cover, decide_cover_counted, is_cover, min_cover_brute, parse_edge_list,
    warm_start_cover, write_edge_list, CoverBudget, Edge, Graph,
};
use reoptlab_core::solve::BruteForce;

fn graph(max_nodes: usize) -> impl Strategy<Value = Graph> {
    (1..=max_nodes).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut g = Graph::new();
            for i in 0..n {
                g.add_node(format!("n{i}"));
            }
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        g.add_edge(format!("n{i}"), format!("n{j}")).unwrap();
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

fn non_edges(g: &Graph) -> Vec<Edge> {
    let nodes: Vec<_> = g.nodes().iter().cloned().collect();
    let mut out = Vec::new();
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if !g.has_edge(nodes[i].clone(), nodes[j].clone()) {
                out.push(Edge::new(nodes[i].clone(), nodes[j].clone()));
            }
        }
    }
    out
}

fn formula(vars: u32) -> impl Strategy<Value = CnfFormula> {
    let clause = prop::collection::btree_set(1..=vars, 1..=3.min(vars as usize)).prop_flat_map(|vs| {
        prop::collection::vec(any::<bool>(), vs.len()).prop_map(move |signs| {
            vs.iter()
                .zip(signs)
                .map(|(&v, s)| Literal::new(Variable::new(v).unwrap(), s))
                .collect::<Vec<_>>()
        })
    });
    prop::collection::vec(clause, 0..=3).prop_map(move |cs| {
        CnfFormula::over(vars, cs.into_iter().map(reoptlab_core::Clause::new)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn decide_agrees_with_brute_force(g in graph(12), k in 0usize..=12) {
        let k = k.min(g.node_count());
        let (min, best) = min_cover_brute(&g).unwrap();
        prop_assert!(is_cover(&g, &best).unwrap());
        let found = decide_cover(&g, CoverBudget(k));
        prop_assert_eq!(found.is_some(), min <= k);
        if let Some(c) = found {
            prop_assert!(c.len() <= k);
            prop_assert!(is_cover(&g, &c).unwrap());
        }
    }

    #[test]
    fn min_cover_grows_with_edges(g in graph(10), pick in any::<prop::sample::Index>()) {
        let missing = non_edges(&g);
        prop_assume!(!missing.is_empty());
        let e = pick.get(&missing).clone();
        let mut h = g.clone();
        let (u, v) = e.endpoints();
        h.add_edge(u.clone(), v.clone()).unwrap();
        let before = min_cover_brute(&g).unwrap().0;
        let after = min_cover_brute(&h).unwrap().0;
        prop_assert!(before <= after && after <= before + 1);
    }

    #[test]
    fn warm_start_agrees_with_cold(g in graph(10), pick in any::<prop::sample::Index>(), slack in 0usize..2) {
        let missing = non_edges(&g);
        prop_assume!(!missing.is_empty());
        let e = pick.get(&missing).clone();
        let (min, old) = min_cover_brute(&g).unwrap();
        let mut h = g.clone();
        let (u, v) = e.endpoints();
        h.add_edge(u.clone(), v.clone()).unwrap();
        let budget = CoverBudget(min + slack);
        let out = warm_start_cover(&h, &old, &BTreeSet::from([e]), budget).unwrap();
        prop_assert_eq!(out.is_solved(), decide_cover_counted(&h, budget).cover.is_some());
        if let Some(c) = &out.solution {
            prop_assert!(is_cover(&h, c).unwrap() && c.len() <= budget.0);
        }
        if out.hint_used {
            prop_assert_eq!(out.solution.as_ref(), Some(&old));
        }
    }

    #[test]
    fn edge_list_round_trip(g in graph(12)) {
        let text = write_edge_list(&g);
        let back = parse_edge_list(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(write_edge_list(&back), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn gadget_matches_satisfiability(f in formula(3)) {
        let sat = BruteForce::default().is_satisfiable(&f).unwrap();
        let g = build_gadget(&f).unwrap();
        let (min, _) = min_cover_brute(g.graph()).unwrap();
        prop_assert_eq!(sat, min <= g.budget().get());
    }

    #[test]
    fn unit_edits_track_the_formula(f in formula(3), v in 1u32..=3, neg: bool) {
        let lit = Literal::new(Variable::new(v).unwrap(), neg);
        let g = build_gadget(&f).unwrap();
        let unit = reoptlab_core::Clause::unit(lit);
        let edited = if f.contains(&unit) {
            gadget_remove_unit(&g, lit).unwrap()
        } else {
            gadget_add_unit(&g, lit).unwrap()
        };
        let sat = BruteForce::default().is_satisfiable(edited.source()).unwrap();
        let (min, _) = min_cover_brute(edited.graph()).unwrap();
        prop_assert_eq!(sat, min <= edited.budget().get());
        prop_assert_eq!(edited.graph().nodes(), g.graph().nodes());
        prop_assert_eq!(edited.graph().edge_count(), g.graph().edge_count() + 1);
        let text = write_gadget_json(&edited);
        prop_assert_eq!(parse_gadget_json(&text).unwrap(), edited);
    }
}

#[test]
fn projections_share_nodes_and_decide_satisfiability() {
    let alphabet: BTreeSet<Variable> = (1..=3).map(|i| Variable::new(i).unwrap()).collect();
    let full = build_full_gadget(&alphabet);
    let samples: [&[&[i64]]; 4] = [
        &[],
        &[&[1, 2, 3]],
        &[&[1, 2, 3], &[-1, -2, -3]],
        &[&[1, 2, 3], &[1, 2, -3], &[1, -2, 3], &[1, -2, -3], &[-1, 2, 3], &[-1, 2, -3], &[-1, -2, 3], &[-1, -2, -3]],
    ];
    for cs in samples {
        let f = CnfFormula::from_dimacs_clauses(3, cs).unwrap();
        let p = project_formula(&full, &f).unwrap();
        assert_eq!(p.graph.nodes(), full.graph().nodes());
        let sat = BruteForce::default().is_satisfiable(&f).unwrap();
        assert_eq!(decide_cover(&p.graph, p.budget).is_some(), sat, "{f}");
    }
}

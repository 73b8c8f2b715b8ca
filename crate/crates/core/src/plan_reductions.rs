//! Reductions into STRIPS replanning.
//!
//! [`sat_to_replanning`] turns a CNF formula into a planning instance whose
//! only irredundant plan is `⟨e⟩`; deleting `a` from the initial state
//! leaves an instance that has a plan iff the formula is satisfiable.
//! [`goal_compilation`] moves the goal into a fresh operator so that every
//! instance over the same conditions and operators shares one constant goal.

use std::collections::BTreeMap;

use crate::cnf::CnfFormula;
use crate::error::{Error, Result};
use crate::strips::{validate_plan, Condition, Goal, Plan, State, StripsInstance, StripsOperator};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReplanningCase {
    instance: StripsInstance,
    original_plan: Plan,
    add_to_initial: State,
    remove_from_initial: State,
}

impl ReplanningCase {
    pub fn new(
        instance: StripsInstance,
        original_plan: Plan,
        add_to_initial: State,
        remove_from_initial: State,
    ) -> Result<Self> {
        if let Some(c) = add_to_initial
            .iter()
            .chain(&remove_from_initial)
            .find(|c| !instance.conditions().contains(c))
        {
            return Err(Error::UnknownCondition(c.to_string()));
        }
        if !validate_plan(&instance, &original_plan)? {
            return Err(Error::InvalidHint(format!(
                "{original_plan} is not a plan for the original instance"
            )));
        }
        Ok(ReplanningCase {
            instance,
            original_plan,
            add_to_initial,
            remove_from_initial,
        })
    }

    pub fn instance(&self) -> &StripsInstance {
        &self.instance
    }

    pub fn original_plan(&self) -> &Plan {
        &self.original_plan
    }

    pub fn add_to_initial(&self) -> &State {
        &self.add_to_initial
    }

    pub fn remove_from_initial(&self) -> &State {
        &self.remove_from_initial
    }
}

fn cond(name: String) -> Condition {
    Condition::new(name)
}

/// Conditions `a`, `t<i>`, `f<i>` per variable `x<i>` and `c<j>` per clause
/// (1-based, canonical clause order). Operators:
///
/// * `pl_<i> = ⟨∅, {f<i>, a}, {t<i>}, ∅⟩`, `nl_<i> = ⟨∅, {t<i>, a}, {f<i>}, ∅⟩`
/// * `pc_<j>_<i> = ⟨{t<i>}, ∅, {c<j>}, ∅⟩` for each positive `x<i>` in clause `j`
/// * `nc_<j>_<i> = ⟨{f<i>}, ∅, {c<j>}, ∅⟩` for each negative `x<i>` in clause `j`
/// * `e = ⟨{a}, ∅, {c1..ck}, ∅⟩`
///
/// Initial state `{a}`, goal `⟨{c1..ck}, ∅⟩`, original plan `⟨e⟩`, change:
/// remove `a`.
pub fn sat_to_replanning(f: &CnfFormula) -> ReplanningCase {
    let a = Condition::from("a");
    let mut conditions = State::from([a.clone()]);
    let mut ops = BTreeMap::new();

    for v in f.alphabet() {
        let i = v.id();
        let (t, fl) = (cond(format!("t{i}")), cond(format!("f{i}")));
        conditions.insert(t.clone());
        conditions.insert(fl.clone());
        ops.insert(
            format!("pl_{i}"),
            StripsOperator::new(
                State::new(),
                State::from([fl.clone(), a.clone()]),
                State::from([t.clone()]),
                State::new(),
            ),
        );
        ops.insert(
            format!("nl_{i}"),
            StripsOperator::new(
                State::new(),
                State::from([t, a.clone()]),
                State::from([fl]),
                State::new(),
            ),
        );
    }

    let mut clause_conds = State::new();
    for (j, clause) in f.clauses().iter().enumerate() {
        let j = j + 1;
        let c = cond(format!("c{j}"));
        conditions.insert(c.clone());
        clause_conds.insert(c.clone());
        for lit in clause.literals() {
            let i = lit.var().id();
            let (name, pre) = if lit.is_positive() {
                (format!("pc_{j}_{i}"), cond(format!("t{i}")))
            } else {
                (format!("nc_{j}_{i}"), cond(format!("f{i}")))
            };
            ops.insert(
                name,
                StripsOperator::new(
                    State::from([pre]),
                    State::new(),
                    State::from([c.clone()]),
                    State::new(),
                ),
            );
        }
    }

    ops.insert(
        "e".to_owned(),
        StripsOperator::new(
            State::from([a.clone()]),
            State::new(),
            clause_conds.clone(),
            State::new(),
        ),
    );

    let instance = StripsInstance::new(
        conditions,
        ops,
        State::from([a.clone()]),
        Goal::new(clause_conds, State::new()),
    )
    .expect("construction only uses declared conditions");
    ReplanningCase {
        instance,
        original_plan: Plan::new(["e"]),
        add_to_initial: State::new(),
        remove_from_initial: State::from([a]),
    }
}

/// The instance with initial state `(I \ removes) ∪ adds`.
pub fn apply_initial_change(case: &ReplanningCase) -> Result<StripsInstance> {
    let mut initial: State = case
        .instance
        .initial()
        .difference(&case.remove_from_initial)
        .cloned()
        .collect();
    initial.extend(case.add_to_initial.iter().cloned());
    case.instance.with_initial(initial)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoalCompilation {
    pub instance: StripsInstance,
    pub goal_condition: Condition,
    pub goal_operator: String,
    /// True when the default names `g` / `o` were taken and a suffix was used.
    pub renamed: bool,
}

/// Adds condition `goal_condition` and operator
/// `goal_operator = ⟨M, N, {goal_condition}, ∅⟩`; the new goal is
/// `⟨{goal_condition}, ∅⟩`.
pub fn goal_compilation_named(
    instance: &StripsInstance,
    goal_condition: &str,
    goal_operator: &str,
) -> Result<StripsInstance> {
    let g = Condition::from(goal_condition);
    if instance.conditions().contains(&g) {
        return Err(Error::NameCollision(goal_condition.to_owned()));
    }
    if instance.operators().contains_key(goal_operator) {
        return Err(Error::NameCollision(goal_operator.to_owned()));
    }
    let (mut conditions, mut ops, initial, goal) = instance.clone().parts();
    conditions.insert(g.clone());
    ops.insert(
        goal_operator.to_owned(),
        StripsOperator::new(
            goal.must_true,
            goal.must_false,
            State::from([g.clone()]),
            State::new(),
        ),
    );
    StripsInstance::new(
        conditions,
        ops,
        initial,
        Goal::new(State::from([g]), State::new()),
    )
}

fn fresh_name(base: &str, taken: impl Fn(&str) -> bool) -> String {
    if !taken(base) {
        return base.to_owned();
    }
    (1..)
        .map(|n| format!("{base}_{n}"))
        .find(|name| !taken(name))
        .expect("unbounded suffixes")
}

/// [`goal_compilation_named`] with names `g` and `o`, suffixed `_<n>` when
/// already used.
pub fn goal_compilation(instance: &StripsInstance) -> GoalCompilation {
    let g = fresh_name("g", |n| instance.conditions().contains(&Condition::from(n)));
    let o = fresh_name("o", |n| instance.operators().contains_key(n));
    let renamed = g != "g" || o != "o";
    if renamed {
        log::info!("goal compilation renamed fresh names to `{g}` / `{o}`");
    }
    let compiled = goal_compilation_named(instance, &g, &o).expect("names are fresh");
    GoalCompilation {
        instance: compiled,
        goal_condition: Condition::new(g),
        goal_operator: o,
        renamed,
    }
}

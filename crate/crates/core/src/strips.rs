//! STRIPS instances `⟨P, O, I, G⟩`, plan validation and plan search for the
//! positive-postcondition fragment.
//!
//! An operator `⟨φ, η, α, β⟩` is applicable in a state `S` when `φ ⊆ S` and
//! `η ∩ S = ∅`; applying it yields `(S ∪ α) \ β`. A goal `⟨M, N⟩` holds in
//! `S` when `M ⊆ S` and `N ∩ S = ∅`.
//!
//! Search and irredundancy counting only accept instances whose operators
//! have no negative postconditions. There states only grow along a plan,
//! which bounds useful plans by `|P|` steps.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_STATE_BUDGET: usize = 1 << 20;
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Condition(String);

impl Condition {
    pub fn new(name: impl Into<String>) -> Self {
        Condition(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Condition {
    fn from(s: &str) -> Self {
        Condition(s.to_owned())
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type State = BTreeSet<Condition>;

pub fn state<'a>(names: impl IntoIterator<Item = &'a str>) -> State {
    names.into_iter().map(Condition::from).collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripsOperator {
    pub pos_pre: State,
    pub neg_pre: State,
    pub pos_post: State,
    pub neg_post: State,
}

impl StripsOperator {
    pub fn new(pos_pre: State, neg_pre: State, pos_post: State, neg_post: State) -> Self {
        StripsOperator {
            pos_pre,
            neg_pre,
            pos_post,
            neg_post,
        }
    }

    fn conditions(&self) -> impl Iterator<Item = &Condition> {
        self.pos_pre
            .iter()
            .chain(&self.neg_pre)
            .chain(&self.pos_post)
            .chain(&self.neg_post)
    }

    fn size(&self) -> u64 {
        (self.pos_pre.len() + self.neg_pre.len() + self.pos_post.len() + self.neg_post.len())
            as u64
    }

    pub fn is_applicable(&self, state: &State) -> bool {
        self.pos_pre.is_subset(state) && self.neg_pre.is_disjoint(state)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Goal {
    pub must_true: State,
    pub must_false: State,
}

impl Goal {
    pub fn new(must_true: State, must_false: State) -> Self {
        Goal {
            must_true,
            must_false,
        }
    }

    pub fn holds_in(&self, state: &State) -> bool {
        self.must_true.is_subset(state) && self.must_false.is_disjoint(state)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StripsInstance {
    conditions: State,
    operators: BTreeMap<String, StripsOperator>,
    initial: State,
    goal: Goal,
}

impl StripsInstance {
    pub fn new(
        conditions: State,
        operators: BTreeMap<String, StripsOperator>,
        initial: State,
        goal: Goal,
    ) -> Result<Self> {
        let known = |c: &Condition| -> Result<()> {
            if conditions.contains(c) {
                Ok(())
            } else {
                Err(Error::UnknownCondition(c.to_string()))
            }
        };
        for (name, op) in &operators {
            op.conditions().try_for_each(known)?;
            if !op.pos_pre.is_disjoint(&op.neg_pre) {
                return Err(Error::ContradictoryPreconditions(name.clone()));
            }
        }
        initial.iter().try_for_each(known)?;
        goal.must_true.iter().chain(&goal.must_false).try_for_each(known)?;
        if !goal.must_true.is_disjoint(&goal.must_false) {
            return Err(Error::ContradictoryGoal);
        }
        Ok(StripsInstance {
            conditions,
            operators,
            initial,
            goal,
        })
    }

    pub fn conditions(&self) -> &State {
        &self.conditions
    }

    pub fn operators(&self) -> &BTreeMap<String, StripsOperator> {
        &self.operators
    }

    pub fn operator(&self, name: &str) -> Result<&StripsOperator> {
        self.operators
            .get(name)
            .ok_or_else(|| Error::UnknownOperator(name.to_owned()))
    }

    pub fn initial(&self) -> &State {
        &self.initial
    }

    pub fn goal(&self) -> &Goal {
        &self.goal
    }

    /// Same instance with another initial state.
    pub fn with_initial(&self, initial: State) -> Result<Self> {
        if let Some(c) = initial.iter().find(|c| !self.conditions.contains(c)) {
            return Err(Error::UnknownCondition(c.to_string()));
        }
        Ok(StripsInstance {
            initial,
            ..self.clone()
        })
    }

    pub(crate) fn parts(self) -> (State, BTreeMap<String, StripsOperator>, State, Goal) {
        (self.conditions, self.operators, self.initial, self.goal)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Plan {
    steps: Vec<String>,
}

impl Plan {
    pub fn new<S: Into<String>>(steps: impl IntoIterator<Item = S>) -> Self {
        Plan {
            steps: steps.into_iter().map(Into::into).collect(),
        }
    }

    pub fn empty() -> Self {
        Plan::default()
    }

    pub fn steps(&self) -> &[String] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The plan from step `start` on.
    pub fn suffix(&self, start: usize) -> Plan {
        Plan {
            steps: self.steps[start.min(self.steps.len())..].to_vec(),
        }
    }

    pub fn without_step(&self, index: usize) -> Plan {
        let mut steps = self.steps.clone();
        steps.remove(index);
        Plan { steps }
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.steps.join(", "))
    }
}

/// `(state ∪ α) \ β`, if the operator is applicable.
pub fn apply_operator(state: &State, op: &StripsOperator) -> Result<State> {
    if let Some(c) = op.pos_pre.iter().find(|c| !state.contains(c)) {
        return Err(Error::NotApplicable(format!("positive precondition `{c}` is false")));
    }
    if let Some(c) = op.neg_pre.iter().find(|c| state.contains(c)) {
        return Err(Error::NotApplicable(format!("negative precondition `{c}` is true")));
    }
    let mut next: State = state.union(&op.pos_post).cloned().collect();
    for c in &op.neg_post {
        next.remove(c);
    }
    Ok(next)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    pub valid: bool,
    /// Index of the first inapplicable step, if any.
    pub failed_step: Option<usize>,
    /// Condition membership tests and updates performed.
    pub work: u64,
}

/// Executes the plan from the initial state, counting elementary work. Work
/// is bounded by `Σ |op| + |M| + |N|`, linear in plan length times instance
/// size.
pub fn validate_plan_counted(instance: &StripsInstance, plan: &Plan) -> Result<Validation> {
    let mut current = instance.initial.clone();
    let mut work = 0;
    for (i, name) in plan.steps.iter().enumerate() {
        let op = instance.operator(name)?;
        work += op.size();
        match apply_operator(&current, op) {
            Ok(next) => current = next,
            Err(_) => {
                // remaining names must still resolve
                for rest in &plan.steps[i + 1..] {
                    instance.operator(rest)?;
                }
                return Ok(Validation {
                    valid: false,
                    failed_step: Some(i),
                    work,
                });
            }
        }
    }
    work += (instance.goal.must_true.len() + instance.goal.must_false.len()) as u64;
    Ok(Validation {
        valid: instance.goal.holds_in(&current),
        failed_step: None,
        work,
    })
}

pub fn validate_plan(instance: &StripsInstance, plan: &Plan) -> Result<bool> {
    Ok(validate_plan_counted(instance, plan)?.valid)
}

pub fn check_positive_postconditions(instance: &StripsInstance) -> bool {
    instance.operators.values().all(|op| op.neg_post.is_empty())
}

fn require_positive(instance: &StripsInstance) -> Result<()> {
    match instance.operators.iter().find(|(_, op)| !op.neg_post.is_empty()) {
        Some((name, _)) => Err(Error::NegativePostconditions(name.clone())),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn zero(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64).max(1)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn disjoint(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == 0)
    }

    fn union(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }
}

struct CompiledOp {
    name: String,
    pos_pre: Bits,
    neg_pre: Bits,
    add: Bits,
}

/// Bitset view of a positive-postcondition instance, operators in name order.
struct Compiled {
    ops: Vec<CompiledOp>,
    initial: Bits,
    must_true: Bits,
    must_false: Bits,
}

impl Compiled {
    fn new(instance: &StripsInstance) -> Self {
        let index: HashMap<&Condition, usize> = instance
            .conditions
            .iter()
            .enumerate()
            .map(|(i, c)| (c, i))
            .collect();
        let n = index.len();
        let bits = |s: &State| {
            let mut b = Bits::zero(n);
            for c in s {
                b.set(index[c]);
            }
            b
        };
        Compiled {
            ops: instance
                .operators
                .iter()
                .map(|(name, op)| CompiledOp {
                    name: name.clone(),
                    pos_pre: bits(&op.pos_pre),
                    neg_pre: bits(&op.neg_pre),
                    add: bits(&op.pos_post),
                })
                .collect(),
            initial: bits(&instance.initial),
            must_true: bits(&instance.goal.must_true),
            must_false: bits(&instance.goal.must_false),
        }
    }

    fn goal_holds(&self, s: &Bits) -> bool {
        self.must_true.subset_of(s) && self.must_false.disjoint(s)
    }

    /// Successor when the operator applies and adds something new.
    fn grow(&self, s: &Bits, op: &CompiledOp) -> Option<Bits> {
        if !op.pos_pre.subset_of(s) || !op.neg_pre.disjoint(s) || op.add.subset_of(s) {
            return None;
        }
        Some(s.union(&op.add))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanSearch {
    pub plan: Option<Plan>,
    /// States taken off the queue.
    pub expanded: u64,
}

/// Breadth-first search over reachable states, operators tried in name
/// order. Returns a shortest plan.
pub fn plan_exists_counted(instance: &StripsInstance, state_budget: usize) -> Result<PlanSearch> {
    require_positive(instance)?;
    let compiled = Compiled::new(instance);
    if compiled.goal_holds(&compiled.initial) {
        return Ok(PlanSearch {
            plan: Some(Plan::empty()),
            expanded: 0,
        });
    }
    // state -> (parent state index, operator index)
    let mut states: Vec<Bits> = vec![compiled.initial.clone()];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None];
    let mut seen: HashMap<Bits, usize> = HashMap::from([(compiled.initial.clone(), 0)]);
    let mut queue = VecDeque::from([0usize]);
    let mut expanded = 0u64;

    let trace = |states_parent: &[Option<(usize, usize)>], mut at: usize| {
        let mut steps = Vec::new();
        while let Some((p, op)) = states_parent[at] {
            steps.push(compiled.ops[op].name.clone());
            at = p;
        }
        steps.reverse();
        Plan { steps }
    };

    while let Some(at) = queue.pop_front() {
        expanded += 1;
        for (oi, op) in compiled.ops.iter().enumerate() {
            let Some(next) = compiled.grow(&states[at], op) else {
                continue;
            };
            if seen.contains_key(&next) {
                continue;
            }
            if states.len() >= state_budget {
                return Err(Error::BudgetExceeded(state_budget));
            }
            let id = states.len();
            seen.insert(next.clone(), id);
            let done = compiled.goal_holds(&next);
            states.push(next);
            parent.push(Some((at, oi)));
            if done {
                return Ok(PlanSearch {
                    plan: Some(trace(&parent, id)),
                    expanded,
                });
            }
            queue.push_back(id);
        }
    }
    Ok(PlanSearch {
        plan: None,
        expanded,
    })
}

pub fn plan_exists(instance: &StripsInstance) -> Result<Option<Plan>> {
    Ok(plan_exists_counted(instance, DEFAULT_STATE_BUDGET)?.plan)
}

/// Valid plans of at most `max_len` steps from which no single step can be
/// deleted with the rest still valid.
///
/// Only sequences where every step adds a new condition are enumerated: a
/// step that adds nothing can be deleted. Enumeration stops at the first
/// prefix reaching the goal, since dropping the last step of a longer plan
/// leaves that valid prefix behind.
pub fn count_irredundant_plans(
    instance: &StripsInstance,
    max_len: usize,
    node_budget: u64,
) -> Result<u64> {
    Ok(irredundant_plans(instance, max_len, node_budget)?.len() as u64)
}

pub fn irredundant_plans(
    instance: &StripsInstance,
    max_len: usize,
    node_budget: u64,
) -> Result<Vec<Plan>> {
    require_positive(instance)?;
    let compiled = Compiled::new(instance);
    let mut found = Vec::new();
    let mut prefix = Vec::new();
    let mut visited = 0u64;
    enumerate(
        &compiled,
        &compiled.initial,
        &mut prefix,
        max_len,
        node_budget,
        &mut visited,
        &mut found,
    )?;
    Ok(found
        .into_iter()
        .map(|idx: Vec<usize>| Plan {
            steps: idx.iter().map(|&i| compiled.ops[i].name.clone()).collect(),
        })
        .collect())
}

fn enumerate(
    c: &Compiled,
    state: &Bits,
    prefix: &mut Vec<usize>,
    max_len: usize,
    budget: u64,
    visited: &mut u64,
    found: &mut Vec<Vec<usize>>,
) -> Result<()> {
    *visited += 1;
    if *visited > budget {
        return Err(Error::BudgetExceeded(budget as usize));
    }
    if c.goal_holds(state) {
        if is_irredundant(c, prefix) {
            found.push(prefix.clone());
        }
        return Ok(());
    }
    // a violated negative goal can never be repaired
    if prefix.len() == max_len || !c.must_false.disjoint(state) {
        return Ok(());
    }
    for (oi, op) in c.ops.iter().enumerate() {
        if let Some(next) = c.grow(state, op) {
            prefix.push(oi);
            enumerate(c, &next, prefix, max_len, budget, visited, found)?;
            prefix.pop();
        }
    }
    Ok(())
}

fn runs_to_goal(c: &Compiled, steps: impl Iterator<Item = usize>) -> bool {
    let mut s = c.initial.clone();
    for oi in steps {
        let op = &c.ops[oi];
        if !op.pos_pre.subset_of(&s) || !op.neg_pre.disjoint(&s) {
            return false;
        }
        s = s.union(&op.add);
    }
    c.goal_holds(&s)
}

fn is_irredundant(c: &Compiled, plan: &[usize]) -> bool {
    (0..plan.len()).all(|skip| {
        !runs_to_goal(
            c,
            plan.iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, &o)| o),
        )
    })
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    conditions: State,
    operators: BTreeMap<String, StripsOperator>,
    initial: State,
    goal: Goal,
}

/// JSON object with keys `conditions`, `operators` (name → `pos_pre`,
/// `neg_pre`, `pos_post`, `neg_post` arrays), `initial` and `goal`
/// (`must_true`, `must_false`). All arrays are sorted.
pub fn write_instance_json(instance: &StripsInstance) -> String {
    let doc = InstanceDoc {
        conditions: instance.conditions.clone(),
        operators: instance.operators.clone(),
        initial: instance.initial.clone(),
        goal: instance.goal.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    text.push('\n');
    text
}

pub fn parse_instance_json(text: &str) -> Result<StripsInstance> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    StripsInstance::new(doc.conditions, doc.operators, doc.initial, doc.goal)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(pp: &[&str], np: &[&str], pa: &[&str], na: &[&str]) -> StripsOperator {
        StripsOperator::new(
            state(pp.iter().copied()),
            state(np.iter().copied()),
            state(pa.iter().copied()),
            state(na.iter().copied()),
        )
    }

    fn single(p: &[&str], ops: Vec<(&str, StripsOperator)>, i: &[&str], m: &[&str]) -> StripsInstance {
        StripsInstance::new(
            state(p.iter().copied()),
            ops.into_iter().map(|(n, o)| (n.to_owned(), o)).collect(),
            state(i.iter().copied()),
            Goal::new(state(m.iter().copied()), State::new()),
        )
        .unwrap()
    }

    #[test]
    fn apply_operator_examples() {
        let e = op(&["a"], &[], &["c1", "c2"], &[]);
        assert_eq!(apply_operator(&state(["a"]), &e).unwrap(), state(["a", "c1", "c2"]));
        assert!(matches!(
            apply_operator(&State::new(), &e),
            Err(Error::NotApplicable(_))
        ));
        let nl1 = op(&[], &["t1", "a"], &["f1"], &[]);
        assert!(matches!(
            apply_operator(&state(["t1"]), &nl1),
            Err(Error::NotApplicable(_))
        ));
        let del = op(&[], &[], &["b"], &["a"]);
        assert_eq!(apply_operator(&state(["a"]), &del).unwrap(), state(["b"]));
    }

    #[test]
    fn instance_validation() {
        let bad = StripsInstance::new(
            state(["a"]),
            [("o".to_owned(), op(&["a"], &["a"], &[], &[]))].into(),
            State::new(),
            Goal::default(),
        );
        assert_eq!(bad, Err(Error::ContradictoryPreconditions("o".into())));
        let bad = StripsInstance::new(state(["a"]), BTreeMap::new(), state(["b"]), Goal::default());
        assert_eq!(bad, Err(Error::UnknownCondition("b".into())));
        let bad = StripsInstance::new(
            state(["a"]),
            BTreeMap::new(),
            State::new(),
            Goal::new(state(["a"]), state(["a"])),
        );
        assert_eq!(bad, Err(Error::ContradictoryGoal));
    }

    #[test]
    fn validate_examples() {
        let inst = single(&["a", "c"], vec![("e", op(&["a"], &[], &["c"], &[]))], &["a"], &["c"]);
        assert!(validate_plan(&inst, &Plan::new(["e"])).unwrap());
        let changed = inst.with_initial(State::new()).unwrap();
        assert!(!validate_plan(&changed, &Plan::new(["e"])).unwrap());
        assert!(!validate_plan(&inst, &Plan::empty()).unwrap());
        assert_eq!(
            validate_plan(&inst, &Plan::new(["nope"])),
            Err(Error::UnknownOperator("nope".into()))
        );
        let trivial = single(&[], vec![], &[], &[]);
        assert!(validate_plan(&trivial, &Plan::empty()).unwrap());
    }

    #[test]
    fn negative_goal_and_negative_effects_validate() {
        let inst = StripsInstance::new(
            state(["a", "b"]),
            [("drop".to_owned(), op(&[], &[], &["b"], &["a"]))].into(),
            state(["a"]),
            Goal::new(state(["b"]), state(["a"])),
        )
        .unwrap();
        assert!(validate_plan(&inst, &Plan::new(["drop"])).unwrap());
        assert!(!check_positive_postconditions(&inst));
        assert_eq!(
            plan_exists(&inst),
            Err(Error::NegativePostconditions("drop".into()))
        );
    }

    #[test]
    fn plan_exists_basics() {
        let done = single(&["a"], vec![], &["a"], &["a"]);
        assert_eq!(plan_exists(&done).unwrap(), Some(Plan::empty()));
        let chain = single(
            &["a", "b", "c"],
            vec![
                ("1", op(&[], &[], &["a"], &[])),
                ("2", op(&["a"], &[], &["b"], &[])),
                ("3", op(&["b"], &[], &["c"], &[])),
            ],
            &[],
            &["c"],
        );
        let plan = plan_exists(&chain).unwrap().unwrap();
        assert_eq!(plan, Plan::new(["1", "2", "3"]));
        let blocked = single(&["a", "b"], vec![("x", op(&[], &["a"], &["b"], &[]))], &["a"], &["b"]);
        assert_eq!(plan_exists(&blocked).unwrap(), None);
    }

    #[test]
    fn state_budget_is_enforced() {
        let ops: Vec<(String, StripsOperator)> = (0..10)
            .map(|i| {
                let c = format!("p{i}");
                (format!("set{i}"), op(&[], &[], &[c.as_str()], &[]))
            })
            .collect();
        let conds: Vec<String> = (0..10).map(|i| format!("p{i}")).chain(["goal".into()]).collect();
        let inst = StripsInstance::new(
            conds.iter().map(|s| Condition::new(s.clone())).collect(),
            ops.into_iter().collect(),
            State::new(),
            Goal::new(state(["goal"]), State::new()),
        )
        .unwrap();
        assert_eq!(
            plan_exists_counted(&inst, 100),
            Err(Error::BudgetExceeded(100))
        );
        assert_eq!(plan_exists(&inst).unwrap(), None);
    }

    #[test]
    fn irredundant_counting() {
        let inst = single(&["a", "c"], vec![("e", op(&["a"], &[], &["c"], &[]))], &["a"], &["c"]);
        assert_eq!(count_irredundant_plans(&inst, 2, 1000).unwrap(), 1);
        let unreachable = single(&["a", "c"], vec![], &["a"], &["c"]);
        assert_eq!(count_irredundant_plans(&unreachable, 2, 1000).unwrap(), 0);
        let holds = single(&["a"], vec![("e", op(&[], &[], &["a"], &[]))], &["a"], &["a"]);
        assert_eq!(
            irredundant_plans(&holds, 1, 1000).unwrap(),
            vec![Plan::empty()]
        );
        // two independent ways to reach c
        let two = single(
            &["c"],
            vec![("x", op(&[], &[], &["c"], &[])), ("y", op(&[], &[], &["c"], &[]))],
            &[],
            &["c"],
        );
        assert_eq!(count_irredundant_plans(&two, 1, 1000).unwrap(), 2);
    }

    #[test]
    fn json_round_trip() {
        let inst = single(&["a", "c"], vec![("e", op(&["a"], &[], &["c"], &[]))], &["a"], &["c"]);
        let text = write_instance_json(&inst);
        assert_eq!(parse_instance_json(&text).unwrap(), inst);
        assert_eq!(write_instance_json(&parse_instance_json(&text).unwrap()), text);
        assert!(parse_instance_json("{\"conditions\": []}").is_err());
    }
}

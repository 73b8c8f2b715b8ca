//! Seeded instance generators and exhaustive formula enumeration.

use std::collections::BTreeMap;

use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reoptlab_core::cnf::{Clause, CnfFormula, ElementaryChange, Literal, Variable};
use reoptlab_core::graph::Graph;
use reoptlab_core::strips::{Condition, Goal, State, StripsInstance, StripsOperator};

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn var(id: u32) -> Variable {
    Variable::new(id).expect("ids start at 1")
}

/// A clause of `len` distinct variables from `1..=vars` with random signs.
pub fn random_clause(rng: &mut impl Rng, vars: u32, len: usize) -> Clause {
    let chosen = (1..=vars).choose_multiple(rng, len);
    Clause::new(
        chosen
            .into_iter()
            .map(|id| Literal::new(var(id), rng.gen_bool(0.5))),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormulaShape {
    pub vars: u32,
    pub clauses: usize,
    pub min_len: usize,
    pub max_len: usize,
}

impl FormulaShape {
    pub fn new(vars: u32, clauses: usize, max_len: usize) -> Self {
        FormulaShape {
            vars,
            clauses,
            min_len: 1,
            max_len,
        }
    }
}

/// Up to `shape.clauses` distinct non-tautological clauses; duplicates drawn
/// by chance collapse.
pub fn random_formula(rng: &mut impl Rng, shape: FormulaShape) -> CnfFormula {
    let max_len = shape.max_len.min(shape.vars as usize);
    let min_len = shape.min_len.min(max_len);
    let clauses: Vec<Clause> = (0..shape.clauses)
        .map(|_| {
            let len = rng.gen_range(min_len..=max_len);
            random_clause(rng, shape.vars, len)
        })
        .collect();
    CnfFormula::over(shape.vars, clauses).expect("clauses stay inside the alphabet")
}

/// All non-tautological clauses of `min_len..=max_len` literals over `1..=vars`.
pub fn clause_pool(vars: u32, min_len: usize, max_len: usize) -> Vec<Clause> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << vars) {
        let ids: Vec<u32> = (0..vars).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
        if ids.len() < min_len || ids.len() > max_len {
            continue;
        }
        for signs in 0u32..(1 << ids.len()) {
            out.push(Clause::new(
                ids.iter()
                    .enumerate()
                    .map(|(i, &id)| Literal::new(var(id), signs >> i & 1 == 1)),
            ));
        }
    }
    out.sort();
    out
}

fn subsets_up_to<T: Clone>(pool: &[T], max: usize, out: &mut Vec<Vec<T>>) {
    fn rec<T: Clone>(pool: &[T], start: usize, max: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        out.push(cur.clone());
        if cur.len() == max {
            return;
        }
        for i in start..pool.len() {
            cur.push(pool[i].clone());
            rec(pool, i + 1, max, cur, out);
            cur.pop();
        }
    }
    rec(pool, 0, max, &mut Vec::new(), out);
}

/// Every formula over an alphabet `1..=n` for `n ≤ max_vars` holding at most
/// `max_clauses` distinct non-tautological clauses of 1 to 3 literals.
/// Ordered by alphabet size, then clause count.
pub fn enumerate_formulas(max_vars: u32, max_clauses: usize) -> Vec<CnfFormula> {
    let mut out = Vec::new();
    for n in 0..=max_vars {
        let pool = clause_pool(n, 1, 3);
        let mut sets = Vec::new();
        subsets_up_to(&pool, max_clauses, &mut sets);
        sets.sort_by_key(Vec::len);
        out.extend(
            sets.into_iter()
                .map(|cs| CnfFormula::over(n, cs).expect("pool clauses use the alphabet")),
        );
    }
    out
}

/// Random simple graph on nodes `v1..vN`, each edge present with `density`.
pub fn random_graph(rng: &mut impl Rng, nodes: usize, density: f64) -> Graph {
    let mut g = Graph::new();
    for i in 1..=nodes {
        g.add_node(format!("v{i}"));
    }
    for i in 1..=nodes {
        for j in i + 1..=nodes {
            if rng.gen_bool(density) {
                g.add_edge(format!("v{i}"), format!("v{j}"))
                    .expect("nodes exist and differ");
            }
        }
    }
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StripsShape {
    pub conditions: usize,
    pub operators: usize,
}

fn random_subset(rng: &mut impl Rng, pool: &[Condition], p: f64) -> State {
    pool.iter().filter(|_| rng.gen_bool(p)).cloned().collect()
}

/// Random instance with positive postconditions only. Conditions are
/// `c1..cP`, operators `op1..opO`.
pub fn random_strips(rng: &mut impl Rng, shape: StripsShape) -> StripsInstance {
    let conds: Vec<Condition> = (1..=shape.conditions)
        .map(|i| Condition::new(format!("c{i}")))
        .collect();
    let mut ops = BTreeMap::new();
    for i in 1..=shape.operators {
        let pos_pre = random_subset(rng, &conds, 0.3);
        let neg_pre: State = random_subset(rng, &conds, 0.2)
            .difference(&pos_pre)
            .cloned()
            .collect();
        let mut pos_post = random_subset(rng, &conds, 0.3);
        if pos_post.is_empty() && !conds.is_empty() {
            pos_post.insert(conds.choose(rng).expect("nonempty").clone());
        }
        ops.insert(
            format!("op{i}"),
            StripsOperator::new(pos_pre, neg_pre, pos_post, State::new()),
        );
    }
    let initial = random_subset(rng, &conds, 0.3);
    let must_true = random_subset(rng, &conds, 0.4);
    let must_false: State = random_subset(rng, &conds, 0.2)
        .difference(&must_true)
        .cloned()
        .collect();
    StripsInstance::new(
        conds.into_iter().collect(),
        ops,
        initial,
        Goal::new(must_true, must_false),
    )
    .expect("generated instance is well formed")
}

/// Up to `count` distinct candidate changes for `base`: deletions of base
/// clauses and additions of random clauses, never touching one clause twice.
pub fn random_candidates(
    rng: &mut impl Rng,
    base: &CnfFormula,
    count: usize,
    max_len: usize,
) -> Vec<ElementaryChange> {
    let vars = base.alphabet().len() as u32;
    let mut out: Vec<ElementaryChange> = Vec::new();
    for _ in 0..count * 4 {
        if out.len() == count {
            break;
        }
        let candidate = if !base.is_empty() && rng.gen_bool(0.3) {
            let c = base.clauses().iter().choose(rng).expect("nonempty").clone();
            ElementaryChange::Delete(c)
        } else if vars > 0 {
            let len = rng.gen_range(1..=max_len.min(vars as usize));
            ElementaryChange::Add(random_clause(rng, vars, len))
        } else {
            continue;
        };
        if out.iter().all(|c| c.clause() != candidate.clause()) {
            out.push(candidate);
        }
    }
    out
}

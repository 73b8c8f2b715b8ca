//! Oracle-equivalence sweeps behind `reoptlab verify` and the acceptance suite.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use reoptlab_core::cnf::{is_alphabet_preserving, ChangeSet, Clause, CnfFormula, ElementaryChange};
use reoptlab_core::dimacs::write_dimacs;
use reoptlab_core::gadget::{build_gadget, gadget_add_unit, gadget_remove_unit, Gadget};
use reoptlab_core::graph::{decide_cover, CoverOracle};
use reoptlab_core::hint::{compile_table, lookup, reuse_table, Lookup};
use reoptlab_core::plan_reductions::{apply_initial_change, goal_compilation, sat_to_replanning};
use reoptlab_core::sat_reductions::{reduce_fixed_model, reduce_unique_model};
use reoptlab_core::solve::{solve_dpll, BruteForce, DEFAULT_ORACLE_LIMIT};
use reoptlab_core::strips::{
    count_irredundant_plans, plan_exists, validate_plan, Plan, StripsInstance,
    DEFAULT_ENUMERATION_BUDGET,
};
use reoptlab_core::{evaluate, Result};

use crate::gen::{
    enumerate_formulas, random_candidates, random_formula, random_strips, rng_for, FormulaShape,
    StripsShape,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    SatReductions,
    VcGadget,
    PlanReductions,
    HintTables,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::SatReductions,
        Suite::VcGadget,
        Suite::PlanReductions,
        Suite::HintTables,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::SatReductions => "sat-reductions",
            Suite::VcGadget => "vc-gadget",
            Suite::PlanReductions => "plan-reductions",
            Suite::HintTables => "hint-tables",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                format!("unknown suite `{s}`, expected one of {}", names.join(", "))
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub check: String,
    /// Input that reproduces the failure, in the module text formats.
    pub witness: String,
}

impl Counterexample {
    fn new(check: impl Into<String>, witness: impl Into<String>) -> Self {
        Counterexample {
            check: check.into(),
            witness: witness.into(),
        }
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.check)?;
        for line in self.witness.lines() {
            writeln!(f, "    {line}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Outcome {
    pub cases: usize,
    pub counterexamples: Vec<Counterexample>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    fn merge(mut self, other: Outcome) -> Outcome {
        self.cases += other.cases;
        self.counterexamples.extend(other.counterexamples);
        self.elapsed += other.elapsed;
        self
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub seed: u64,
    pub oracle_limit: usize,
    /// Added to every gadget budget before comparing. Nonzero values exist
    /// to check that the sweep can fail.
    pub budget_offset: isize,
    pub random_formulas: usize,
    pub random_instances: usize,
    pub table_configs: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            seed: 0,
            oracle_limit: DEFAULT_ORACLE_LIMIT,
            budget_offset: 0,
            random_formulas: 500,
            random_instances: 200,
            table_configs: 50,
        }
    }
}

impl SweepOptions {
    fn sat_oracle(&self) -> BruteForce {
        BruteForce::with_limit(self.oracle_limit)
    }

    fn cover_oracle(&self) -> CoverOracle {
        CoverOracle::with_limit(reoptlab_core::graph::DEFAULT_COVER_ORACLE_LIMIT.max(self.oracle_limit))
    }
}

/// Runs `check` on every item in parallel. Counterexamples keep input order,
/// so the first one comes from the smallest failing input.
fn sweep<T: Sync>(
    items: &[T],
    check: impl Fn(&T) -> Result<Vec<Counterexample>> + Sync,
) -> Result<Outcome> {
    let start = Instant::now();
    let found: Vec<Vec<Counterexample>> = items.par_iter().map(&check).collect::<Result<_>>()?;
    Ok(Outcome {
        cases: items.len(),
        counterexamples: found.into_iter().flatten().collect(),
        elapsed: start.elapsed(),
    })
}

fn dimacs(f: &CnfFormula) -> String {
    write_dimacs(f)
}

/// Formulas with at most 3 variables and 3 clauses of 1 to 3 literals.
pub fn small_formulas() -> Vec<CnfFormula> {
    enumerate_formulas(3, 3)
}

/// `count` seeded formulas over `vars` variables with up to `clauses` clauses.
pub fn random_formulas(seed: u64, count: usize, vars: u32, clauses: usize) -> Vec<CnfFormula> {
    (0..count)
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let m = rand::Rng::gen_range(&mut rng, 0..=clauses);
            random_formula(&mut rng, FormulaShape::new(vars, m, 3))
        })
        .collect()
}

fn offset(budget: usize, by: isize) -> isize {
    budget as isize + by
}

fn gadget_claim(
    opts: &SweepOptions,
    label: &str,
    formula: &CnfFormula,
    gadget: &Gadget,
    witness: &str,
) -> Result<Option<Counterexample>> {
    let sat = opts.sat_oracle().is_satisfiable(formula)?;
    let (min, _) = opts.cover_oracle().min_cover(gadget.graph())?;
    let budget = offset(gadget.budget().get(), opts.budget_offset);
    if sat != (min as isize <= budget) {
        return Ok(Some(Counterexample::new(
            format!("{label}: sat = {sat}, min cover = {min}, budget = {budget}"),
            witness,
        )));
    }
    if opts.budget_offset == 0 && decide_cover(gadget.graph(), gadget.budget()).is_some() != sat {
        return Ok(Some(Counterexample::new(
            format!("{label}: branch and bound disagrees with the cover oracle"),
            witness,
        )));
    }
    Ok(None)
}

/// sat(f) ⇔ cover within budget, for the gadget of `f` and for every unit
/// addition and removal applicable to it.
pub fn check_gadget(f: &CnfFormula, opts: &SweepOptions) -> Result<Vec<Counterexample>> {
    let g = build_gadget(f)?;
    let base = dimacs(f);
    let mut out = Vec::new();
    out.extend(gadget_claim(opts, "gadget", f, &g, &base)?);
    for v in f.alphabet() {
        for lit in [v.positive(), v.negative()] {
            let unit = Clause::unit(lit);
            if f.contains(&unit) {
                let changes = ChangeSet::deleting([unit]);
                let changed = reoptlab_core::apply_changes(f, &changes);
                let g2 = gadget_remove_unit(&g, lit)?;
                let witness = format!("{base}- {} 0\n", lit.to_dimacs());
                out.extend(gadget_claim(opts, "remove unit", &changed, &g2, &witness)?);
            } else {
                let changes = ChangeSet::adding([unit]);
                let changed = reoptlab_core::apply_changes(f, &changes);
                let g2 = gadget_add_unit(&g, lit)?;
                let witness = format!("{base}+ {} 0\n", lit.to_dimacs());
                out.extend(gadget_claim(opts, "add unit", &changed, &g2, &witness)?);
            }
        }
    }
    Ok(out)
}

/// Both SAT-to-hinted-SAT reductions on source formula `g`.
pub fn check_sat_reductions(g: &CnfFormula, opts: &SweepOptions) -> Result<Vec<Counterexample>> {
    let oracle = opts.sat_oracle();
    let witness = dimacs(g);
    let mut out = Vec::new();
    let sat_g = oracle.is_satisfiable(g)?;

    let fixed = reduce_fixed_model(g);
    if !evaluate(fixed.formula(), fixed.hint_model()) {
        out.push(Counterexample::new("fixed model: hint is not a model", &witness));
    }
    if oracle.is_satisfiable(&fixed.changed_formula())? != sat_g {
        out.push(Counterexample::new("fixed model: changed verdict differs from source", &witness));
    }
    if !is_alphabet_preserving(fixed.formula(), &fixed.changes()) {
        out.push(Counterexample::new("fixed model: change leaves the alphabet", &witness));
    }

    let unique = reduce_unique_model(g)?;
    if oracle.count_models(unique.formula())? != 1 || !evaluate(unique.formula(), &unique.expected_model()) {
        out.push(Counterexample::new("unique model: model count is not 1", &witness));
    }
    if oracle.is_satisfiable(&unique.changed_formula())? != sat_g {
        out.push(Counterexample::new("unique model: changed verdict differs from source", &witness));
    }
    if !is_alphabet_preserving(unique.formula(), &unique.changes()) {
        out.push(Counterexample::new("unique model: change leaves the alphabet", &witness));
    }
    Ok(out)
}

pub fn check_solvers(f: &CnfFormula, opts: &SweepOptions) -> Result<Vec<Counterexample>> {
    let brute = opts.sat_oracle().solve(f)?;
    let dpll = solve_dpll(f);
    let mut out = Vec::new();
    if brute.is_some() != dpll.is_some() {
        out.push(Counterexample::new(
            format!("dpll says {}, brute force says {}", dpll.is_some(), brute.is_some()),
            dimacs(f),
        ));
    }
    if let Some(m) = &dpll {
        if !evaluate(f, m) {
            out.push(Counterexample::new(format!("dpll model {m} fails"), dimacs(f)));
        }
    }
    Ok(out)
}

/// The replanning construction for `f`: `⟨e⟩` solves the original, it is the
/// only irredundant plan, and after removing `a` a plan exists iff `f` is
/// satisfiable.
pub fn check_replanning(f: &CnfFormula, opts: &SweepOptions) -> Result<Vec<Counterexample>> {
    let case = sat_to_replanning(f);
    let witness = dimacs(f);
    let mut out = Vec::new();
    if !validate_plan(case.instance(), &Plan::new(["e"]))? {
        out.push(Counterexample::new("replanning: <e> does not solve the original", &witness));
    }
    let max_len = case.instance().conditions().len();
    let count = count_irredundant_plans(case.instance(), max_len, DEFAULT_ENUMERATION_BUDGET)?;
    if count != 1 {
        out.push(Counterexample::new(
            format!("replanning: {count} irredundant plans, expected 1"),
            &witness,
        ));
    }
    let changed = apply_initial_change(&case)?;
    let plan = plan_exists(&changed)?;
    let sat = opts.sat_oracle().is_satisfiable(f)?;
    if plan.is_some() != sat {
        out.push(Counterexample::new(
            format!("replanning: plan exists = {}, sat = {sat}", plan.is_some()),
            &witness,
        ));
    }
    Ok(out)
}

pub fn check_goal_compilation(inst: &StripsInstance) -> Result<Vec<Counterexample>> {
    let compiled = goal_compilation(inst);
    let before = plan_exists(inst)?;
    let after = plan_exists(&compiled.instance)?;
    let witness = || reoptlab_core::strips::write_instance_json(inst);
    let mut out = Vec::new();
    if before.is_some() != after.is_some() {
        out.push(Counterexample::new(
            format!(
                "goal compilation: plan exists {} before, {} after",
                before.is_some(),
                after.is_some()
            ),
            witness(),
        ));
    }
    if let Some(plan) = before {
        let mut steps = plan.steps().to_vec();
        steps.push(compiled.goal_operator.clone());
        if !validate_plan(&compiled.instance, &Plan::new(steps))? {
            out.push(Counterexample::new(
                "goal compilation: plan followed by the goal operator fails",
                witness(),
            ));
        }
    }
    Ok(out)
}

/// One table configuration: every subset of candidates is looked up; those
/// within the bound must hit with the brute-force verdict, larger ones miss.
pub fn check_table(
    base: &CnfFormula,
    candidates: &[ElementaryChange],
    bound: usize,
    opts: &SweepOptions,
) -> Result<Vec<Counterexample>> {
    let oracle = opts.sat_oracle();
    let table = compile_table(base, candidates, bound)?;
    let mut out = Vec::new();
    for mask in 0u64..(1 << candidates.len()) {
        let changes = table.changes_for(mask);
        let changed = reoptlab_core::apply_changes(base, &changes);
        let sat = oracle.is_satisfiable(&changed)?;
        let witness = || {
            format!(
                "{}{}bound {bound}\n",
                dimacs(base),
                reoptlab_core::dimacs::write_changes(&changes)
            )
        };
        let within = mask.count_ones() as usize <= bound;
        match lookup(&table, &changes) {
            Lookup::Hit(entry) if within => {
                let good = match &entry {
                    Some(m) => evaluate(&changed, m),
                    None => !sat,
                };
                if !good || entry.is_some() != sat {
                    out.push(Counterexample::new("table: stored verdict is wrong", witness()));
                }
            }
            Lookup::Miss if !within => {}
            other => out.push(Counterexample::new(
                format!("table: unexpected {other:?} for {} changes", mask.count_ones()),
                witness(),
            )),
        }
        if reuse_table(&table, &changes).is_solved() != sat {
            out.push(Counterexample::new("table: reuse verdict is wrong", witness()));
        }
    }
    Ok(out)
}

pub struct TableConfig {
    pub base: CnfFormula,
    pub candidates: Vec<ElementaryChange>,
    pub bound: usize,
}

/// Seeded configurations with at most 4 candidates and bound at most 2.
pub fn table_configs(seed: u64, count: usize) -> Vec<TableConfig> {
    (0..count)
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let vars = rand::Rng::gen_range(&mut rng, 1..=4);
            let m = rand::Rng::gen_range(&mut rng, 0..=4);
            let base = random_formula(&mut rng, FormulaShape::new(vars, m, 3));
            let n = rand::Rng::gen_range(&mut rng, 1..=4);
            let candidates = random_candidates(&mut rng, &base, n, 3);
            let bound = rand::Rng::gen_range(&mut rng, 0..=2);
            TableConfig {
                base,
                candidates,
                bound,
            }
        })
        .collect()
}

/// Seeded positive-postcondition instances, at most 6 conditions and 6
/// operators.
pub fn strips_instances(seed: u64, count: usize) -> Vec<StripsInstance> {
    (0..count)
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let shape = StripsShape {
                conditions: rand::Rng::gen_range(&mut rng, 1..=6),
                operators: rand::Rng::gen_range(&mut rng, 1..=6),
            };
            random_strips(&mut rng, shape)
        })
        .collect()
}

pub fn gadget_sweep(opts: &SweepOptions) -> Result<Outcome> {
    let small = sweep(&small_formulas(), |f| check_gadget(f, opts))?;
    let random = sweep(&random_formulas(opts.seed, opts.random_formulas, 4, 3), |f| {
        check_gadget(f, opts)
    })?;
    Ok(small.merge(random))
}

pub fn sat_reduction_sweep(opts: &SweepOptions) -> Result<Outcome> {
    sweep(&small_formulas(), |f| check_sat_reductions(f, opts))
}

pub fn solver_sweep(opts: &SweepOptions) -> Result<Outcome> {
    let small = sweep(&small_formulas(), |f| check_solvers(f, opts))?;
    let random: Vec<CnfFormula> = (0..1000)
        .map(|i| {
            let mut rng = rng_for(opts.seed ^ 0x5eed, i);
            let vars = rand::Rng::gen_range(&mut rng, 1..=6);
            let m = rand::Rng::gen_range(&mut rng, 0..=12);
            random_formula(&mut rng, FormulaShape::new(vars, m, 3))
        })
        .collect();
    Ok(small.merge(sweep(&random, |f| check_solvers(f, opts))?))
}

pub fn replanning_sweep(opts: &SweepOptions) -> Result<Outcome> {
    sweep(&small_formulas(), |f| check_replanning(f, opts))
}

pub fn goal_compilation_sweep(opts: &SweepOptions) -> Result<Outcome> {
    sweep(&strips_instances(opts.seed, opts.random_instances), check_goal_compilation)
}

pub fn table_sweep(opts: &SweepOptions) -> Result<Outcome> {
    sweep(&table_configs(opts.seed, opts.table_configs), |c| {
        check_table(&c.base, &c.candidates, c.bound, opts)
    })
}

pub fn run_suite(suite: Suite, opts: &SweepOptions) -> Result<Outcome> {
    match suite {
        Suite::SatReductions => Ok(sat_reduction_sweep(opts)?.merge(solver_sweep(opts)?)),
        Suite::VcGadget => gadget_sweep(opts),
        Suite::PlanReductions => Ok(replanning_sweep(opts)?.merge(goal_compilation_sweep(opts)?)),
        Suite::HintTables => table_sweep(opts),
    }
}

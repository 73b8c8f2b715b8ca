//! Solving changed instances with help from the original one.
//!
//! Three kinds of help are covered: a known model of the original formula,
//! an old plan whose unexecuted suffix may still work, and a table compiled
//! ahead of time holding the answer for every change of at most `bound`
//! elementary edits drawn from a fixed candidate list.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cnf::{apply_changes, Assignment, ChangeSet, CnfFormula, ElementaryChange, Variable};
use crate::dimacs::{parse_dimacs, write_dimacs};
use crate::error::{Error, Result};
use crate::solve::{solve_dpll_counted, BruteForce};
use crate::strips::{plan_exists_counted, validate_plan_counted, Plan, StripsInstance, DEFAULT_STATE_BUDGET};

pub const DEFAULT_TABLE_BUDGET: usize = 1 << 16;

/// Result of a hinted solve. `hint_used` is true only when the solution came
/// from the hint itself (or a table entry), not from search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReuseOutcome<S> {
    pub solution: Option<S>,
    pub hint_used: bool,
    pub work_units: u64,
}

impl<S> ReuseOutcome<S> {
    pub fn hinted(solution: Option<S>, work_units: u64) -> Self {
        ReuseOutcome {
            solution,
            hint_used: true,
            work_units,
        }
    }

    pub fn cold(solution: Option<S>, work_units: u64) -> Self {
        ReuseOutcome {
            solution,
            hint_used: false,
            work_units,
        }
    }

    pub fn is_solved(&self) -> bool {
        self.solution.is_some()
    }
}

/// Answers for every subset of at most `bound` candidates, keyed by the
/// subset's bitmask over candidate positions. `None` marks an unsatisfiable
/// changed formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HintTable {
    base: CnfFormula,
    candidates: Vec<ElementaryChange>,
    bound: usize,
    entries: BTreeMap<u64, Option<Assignment>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lookup {
    Hit(Option<Assignment>),
    Miss,
}

impl HintTable {
    pub fn base(&self) -> &CnfFormula {
        &self.base
    }

    pub fn candidates(&self) -> &[ElementaryChange] {
        &self.candidates
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn entries(&self) -> &BTreeMap<u64, Option<Assignment>> {
        &self.entries
    }

    pub fn changes_for(&self, mask: u64) -> ChangeSet {
        subset_changes(&self.candidates, mask)
    }

    /// Keys whose entry disagrees with brute force on the changed formula.
    pub fn verify(&self, oracle: &BruteForce) -> Result<Vec<u64>> {
        let mut bad = Vec::new();
        for (&mask, entry) in &self.entries {
            let changed = apply_changes(&self.base, &self.changes_for(mask));
            let ok = match entry {
                Some(model) => crate::cnf::evaluate(&changed, model),
                None => !oracle.is_satisfiable(&changed)?,
            };
            if !ok {
                bad.push(mask);
            }
        }
        Ok(bad)
    }
}

fn subset_changes(candidates: &[ElementaryChange], mask: u64) -> ChangeSet {
    let chosen = candidates
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, c)| c);
    ChangeSet::from_elementary(chosen).expect("candidates were checked for conflicts")
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn check_candidates(candidates: &[ElementaryChange]) -> Result<()> {
    if candidates.len() > 64 {
        return Err(Error::InvalidCandidates(format!(
            "{} candidates, at most 64 fit a key",
            candidates.len()
        )));
    }
    for (i, c) in candidates.iter().enumerate() {
        for d in &candidates[i + 1..] {
            if c == d {
                return Err(Error::InvalidCandidates(format!("{c} listed twice")));
            }
            if c.clause() == d.clause() {
                return Err(Error::InvalidCandidates(format!(
                    "clause {} is both added and deleted",
                    c.clause()
                )));
            }
        }
    }
    Ok(())
}

fn subsets_up_to(n: usize, bound: usize) -> impl Iterator<Item = u64> {
    let limit = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    (0..=limit).filter(move |m| (m.count_ones() as usize) <= bound)
}

pub fn compile_table(
    base: &CnfFormula,
    candidates: &[ElementaryChange],
    bound: usize,
) -> Result<HintTable> {
    compile_table_with_budget(base, candidates, bound, DEFAULT_TABLE_BUDGET)
}

/// One DPLL solve per subset of at most `bound` candidates.
pub fn compile_table_with_budget(
    base: &CnfFormula,
    candidates: &[ElementaryChange],
    bound: usize,
    budget: usize,
) -> Result<HintTable> {
    check_candidates(candidates)?;
    let bound = bound.min(candidates.len());
    let needed = (0..=bound).fold(0usize, |acc, k| {
        acc.saturating_add(binomial(candidates.len(), k))
    });
    if needed > budget {
        return Err(Error::TableBudgetExceeded { needed, budget });
    }
    let entries = subsets_up_to(candidates.len(), bound)
        .map(|mask| {
            let changed = apply_changes(base, &subset_changes(candidates, mask));
            (mask, solve_dpll_counted(&changed).model)
        })
        .collect();
    Ok(HintTable {
        base: base.clone(),
        candidates: candidates.to_vec(),
        bound,
        entries,
    })
}

/// The stored answer when every change is a registered candidate and there
/// are at most `bound` of them.
pub fn lookup(table: &HintTable, changes: &ChangeSet) -> Lookup {
    let mut mask = 0u64;
    for ch in changes.elementary() {
        match table.candidates.iter().position(|c| *c == ch) {
            Some(i) => mask |= 1 << i,
            None => return Lookup::Miss,
        }
    }
    if mask.count_ones() as usize > table.bound {
        return Lookup::Miss;
    }
    match table.entries.get(&mask) {
        Some(entry) => Lookup::Hit(entry.clone()),
        None => Lookup::Miss,
    }
}

/// Table lookup, falling back to DPLL on a miss.
pub fn reuse_table(table: &HintTable, changes: &ChangeSet) -> ReuseOutcome<Assignment> {
    let probes = changes.additions().len() + changes.deletions().len();
    match lookup(table, changes) {
        Lookup::Hit(entry) => ReuseOutcome::hinted(entry, probes as u64 + 1),
        Lookup::Miss => {
            let out = solve_dpll_counted(&apply_changes(&table.base, changes));
            let work = probes as u64 + out.work_units();
            ReuseOutcome::cold(out.model, work)
        }
    }
}

/// Counts literal evaluations.
fn evaluate_counted(formula: &CnfFormula, assignment: &Assignment) -> (bool, u64) {
    let mut work = 0;
    for c in formula.clauses() {
        let mut sat = false;
        for &l in c.literals() {
            work += 1;
            if assignment.value_of(l) {
                sat = true;
                break;
            }
        }
        if !sat {
            return (false, work);
        }
    }
    (true, work)
}

/// Returns `hint` when it still satisfies the changed formula, otherwise
/// solves the changed formula with DPLL.
pub fn reuse_model(
    f: &CnfFormula,
    changes: &ChangeSet,
    hint: &Assignment,
) -> Result<ReuseOutcome<Assignment>> {
    if !crate::cnf::evaluate(f, hint) {
        return Err(Error::InvalidHint(format!("{hint} is not a model of {f}")));
    }
    let changed = apply_changes(f, changes);
    let (still_model, work) = evaluate_counted(&changed, hint);
    if still_model {
        return Ok(ReuseOutcome::hinted(Some(hint.clone()), work));
    }
    let out = solve_dpll_counted(&changed);
    let work = work + out.work_units();
    Ok(ReuseOutcome::cold(out.model, work))
}

/// Tries the old plan and then each shorter suffix against the changed
/// instance; falls back to plan search when none validates.
pub fn reuse_plan(changed: &StripsInstance, old_plan: &Plan) -> Result<ReuseOutcome<Plan>> {
    let mut work = 0;
    for start in 0..=old_plan.len() {
        let suffix = old_plan.suffix(start);
        let v = validate_plan_counted(changed, &suffix)?;
        work += v.work;
        if v.valid {
            return Ok(ReuseOutcome::hinted(Some(suffix), work));
        }
    }
    let search = plan_exists_counted(changed, DEFAULT_STATE_BUDGET)?;
    Ok(ReuseOutcome::cold(search.plan, work + search.expanded))
}

#[derive(Serialize, Deserialize)]
struct TableDoc {
    base: String,
    candidates: Vec<String>,
    bound: usize,
    entries: BTreeMap<String, Option<Vec<u32>>>,
}

fn change_text(c: &ElementaryChange) -> String {
    let (sign, clause) = match c {
        ElementaryChange::Add(cl) => ('+', cl),
        ElementaryChange::Delete(cl) => ('-', cl),
    };
    let mut s = String::from(sign);
    for l in clause.literals() {
        s.push_str(&format!(" {}", l.to_dimacs()));
    }
    s.push_str(" 0");
    s
}

/// JSON with the base formula as embedded DIMACS text, candidates in the
/// change-set line format, the bound, and entries keyed by hex bitmask
/// (`null` for unsatisfiable, else the list of true variable ids).
pub fn write_table_json(table: &HintTable) -> String {
    let doc = TableDoc {
        base: write_dimacs(&table.base),
        candidates: table.candidates.iter().map(change_text).collect(),
        bound: table.bound,
        entries: table
            .entries
            .iter()
            .map(|(mask, entry)| {
                (
                    format!("{mask:#x}"),
                    entry
                        .as_ref()
                        .map(|a| a.true_vars().iter().map(|v| v.id()).collect()),
                )
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    text.push('\n');
    text
}

/// Parses a table and checks key ranges, the bound, and that every stored
/// model satisfies its changed formula.
pub fn parse_table_json(text: &str) -> Result<HintTable> {
    let doc: TableDoc = serde_json::from_str(text)?;
    let base = parse_dimacs(&doc.base)?;
    let candidates = doc
        .candidates
        .iter()
        .map(|line| {
            let set = crate::dimacs::parse_changes(line)?;
            let mut el = set.elementary();
            match el.len() {
                1 => Ok(el.remove(0)),
                _ => Err(Error::Json(format!("candidate `{line}` is not one change"))),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    check_candidates(&candidates)?;
    let mut entries = BTreeMap::new();
    for (key, entry) in doc.entries {
        let mask = key
            .strip_prefix("0x")
            .and_then(|h| u64::from_str_radix(h, 16).ok())
            .ok_or_else(|| Error::Json(format!("bad entry key `{key}`")))?;
        if candidates.len() < 64 && mask >> candidates.len() != 0 {
            return Err(Error::Json(format!("key {key} names an unknown candidate")));
        }
        if mask.count_ones() as usize > doc.bound {
            return Err(Error::Json(format!("key {key} exceeds the bound")));
        }
        let entry = entry
            .map(|ids| {
                ids.into_iter()
                    .map(Variable::new)
                    .collect::<Result<Vec<_>>>()
                    .map(Assignment::new)
            })
            .transpose()?;
        if let Some(model) = &entry {
            let changed = apply_changes(&base, &subset_changes(&candidates, mask));
            if !crate::cnf::evaluate(&changed, model) {
                return Err(Error::Json(format!("entry {key} is not a model")));
            }
        }
        entries.insert(mask, entry);
    }
    Ok(HintTable {
        base,
        candidates,
        bound: doc.bound,
        entries,
    })
}

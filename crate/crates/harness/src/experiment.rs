//! Cold versus hinted solving on seeded trials.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::IteratorRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use reoptlab_core::cnf::{apply_changes, ChangeSet, CnfFormula};
use reoptlab_core::dimacs::{write_changes, write_dimacs};
use reoptlab_core::graph::{decide_cover_counted, warm_start_cover, CoverBudget, Edge, Graph, NodeId};
use reoptlab_core::hint::{compile_table, reuse_model, reuse_plan, reuse_table};
use reoptlab_core::plan_reductions::{apply_initial_change, sat_to_replanning};
use reoptlab_core::sat_reductions::{reduce_fixed_model, reduce_unique_model};
use reoptlab_core::solve::solve_dpll_counted;
use reoptlab_core::strips::{plan_exists_counted, write_instance_json, Condition, DEFAULT_STATE_BUDGET};

use crate::gen::{
    random_candidates, random_clause, random_formula, random_graph, random_strips, rng_for,
    FormulaShape, StripsShape,
};
use crate::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Sat,
    Vc,
    Strips,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Sat => "sat",
            Problem::Vc => "vc",
            Problem::Strips => "strips",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Random satisfiable formula, its DPLL model as hint, one added clause.
    RandomAdd,
    FixedModel,
    UniqueModel,
    /// Compiled table over random candidates, a random subset applied.
    Table,
    /// Random graph, a minimum cover as hint, one added edge.
    AddEdge,
    /// The SAT-to-replanning construction with the initial-state change.
    SatReplanning,
    /// Random instance and its plan, one condition toggled in the initial state.
    RandomInit,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::RandomAdd,
        Scenario::FixedModel,
        Scenario::UniqueModel,
        Scenario::Table,
        Scenario::AddEdge,
        Scenario::SatReplanning,
        Scenario::RandomInit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::RandomAdd => "random-add",
            Scenario::FixedModel => "fixed-model",
            Scenario::UniqueModel => "unique-model",
            Scenario::Table => "table",
            Scenario::AddEdge => "add-edge",
            Scenario::SatReplanning => "sat-replanning",
            Scenario::RandomInit => "random-init",
        }
    }

    pub fn problem(self) -> Problem {
        match self {
            Scenario::RandomAdd | Scenario::FixedModel | Scenario::UniqueModel | Scenario::Table => {
                Problem::Sat
            }
            Scenario::AddEdge => Problem::Vc,
            Scenario::SatReplanning | Scenario::RandomInit => Problem::Strips,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scenario `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub scenario: Scenario,
    pub trials: usize,
    pub vars: u32,
    pub clauses: usize,
    pub nodes: usize,
    pub conditions: usize,
    pub operators: usize,
    pub candidates: usize,
    pub bound: usize,
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario, seed: u64, trials: usize) -> Self {
        ExperimentConfig {
            seed,
            scenario,
            trials,
            vars: 4,
            clauses: 6,
            nodes: 10,
            conditions: 6,
            operators: 6,
            candidates: 4,
            bound: 2,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |field: &str, why: &str| {
            Err(HarnessError::InvalidConfig {
                field: field.to_owned(),
                reason: why.to_owned(),
            })
        };
        match self.scenario.problem() {
            Problem::Sat if self.vars == 0 => bad("vars", "need at least one variable"),
            Problem::Sat if self.candidates > 16 => bad("candidates", "at most 16"),
            Problem::Vc if self.nodes < 2 => bad("nodes", "need at least two nodes"),
            Problem::Strips if self.scenario == Scenario::SatReplanning && (self.clauses == 0 || self.vars == 0) => {
                bad("clauses", "the replanning construction needs a nonempty formula")
            }
            Problem::Strips if self.conditions == 0 && self.scenario == Scenario::RandomInit => {
                bad("conditions", "need at least one condition")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Row {
    pub trial_id: usize,
    pub problem: Problem,
    pub change_id: String,
    pub cold_verdict: bool,
    pub hinted_verdict: bool,
    pub cold_work: u64,
    pub hinted_work: u64,
    pub hint_used: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub hint_used: usize,
    pub hint_rate: f64,
    pub cold_work: u64,
    pub hinted_work: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub seed: u64,
    pub config: ExperimentConfig,
    pub rows: Vec<Row>,
    pub summary: Summary,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
        s.push('\n');
        s
    }

    /// Rows only, one header line first. The seed goes in a leading comment.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).expect("rows serialize");
        }
        if self.rows.is_empty() {
            w.write_record([
                "trial_id",
                "problem",
                "change_id",
                "cold_verdict",
                "hinted_verdict",
                "cold_work",
                "hinted_work",
                "hint_used",
            ])
            .expect("header writes");
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf8");
        format!("# seed {} scenario {}\n{body}", self.seed, self.config.scenario)
    }
}

struct Trial {
    change_id: String,
    cold: (bool, u64),
    hinted: (bool, u64, bool),
    reproducer: String,
}

fn sat_formula(rng: &mut impl Rng, cfg: &ExperimentConfig, min_clauses: usize) -> CnfFormula {
    let m = rng.gen_range(min_clauses.min(cfg.clauses)..=cfg.clauses);
    random_formula(rng, FormulaShape::new(cfg.vars, m, 3))
}

fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<Trial, HarnessError> {
    let mut rng = rng_for(cfg.seed, trial as u64);
    let cold_sat = |f: &CnfFormula| {
        let out = solve_dpll_counted(f);
        (out.model.is_some(), out.work_units())
    };
    Ok(match cfg.scenario {
        Scenario::RandomAdd => {
            // resample until satisfiable so a hint exists
            let (f, model) = loop {
                let f = sat_formula(&mut rng, cfg, 0);
                if let Some(m) = solve_dpll_counted(&f).model {
                    break (f, m);
                }
            };
            let len = rng.gen_range(1..=3.min(cfg.vars as usize));
            let changes = ChangeSet::adding([random_clause(&mut rng, cfg.vars, len)]);
            let out = reuse_model(&f, &changes, &model)?;
            Trial {
                change_id: write_changes(&changes).trim().to_owned(),
                cold: cold_sat(&apply_changes(&f, &changes)),
                hinted: (out.is_solved(), out.work_units, out.hint_used),
                reproducer: format!("{}{}", write_dimacs(&f), write_changes(&changes)),
            }
        }
        Scenario::FixedModel => {
            let g = sat_formula(&mut rng, cfg, 0);
            let inst = reduce_fixed_model(&g);
            let changes = inst.changes();
            let out = reuse_model(inst.formula(), &changes, inst.hint_model())?;
            Trial {
                change_id: write_changes(&changes).trim().to_owned(),
                cold: cold_sat(&inst.changed_formula()),
                hinted: (out.is_solved(), out.work_units, out.hint_used),
                reproducer: write_dimacs(&g),
            }
        }
        Scenario::UniqueModel => {
            let g = sat_formula(&mut rng, cfg, 0);
            let inst = reduce_unique_model(&g)?;
            let changes = inst.changes();
            let out = reuse_model(inst.formula(), &changes, &inst.expected_model())?;
            Trial {
                change_id: write_changes(&changes).trim().replace('\n', "; "),
                cold: cold_sat(&inst.changed_formula()),
                hinted: (out.is_solved(), out.work_units, out.hint_used),
                reproducer: write_dimacs(&g),
            }
        }
        Scenario::Table => {
            let base = sat_formula(&mut rng, cfg, 0);
            let candidates = random_candidates(&mut rng, &base, cfg.candidates, 3);
            let table = compile_table(&base, &candidates, cfg.bound)?;
            let mask = if candidates.is_empty() {
                0
            } else {
                rng.gen_range(0..1u64 << candidates.len())
            };
            let changes = table.changes_for(mask);
            let out = reuse_table(&table, &changes);
            Trial {
                change_id: format!("{mask:#x}"),
                cold: cold_sat(&apply_changes(&base, &changes)),
                hinted: (out.is_solved(), out.work_units, out.hint_used),
                reproducer: reoptlab_core::hint::write_table_json(&table),
            }
        }
        Scenario::AddEdge => {
            let graph = random_graph(&mut rng, cfg.nodes, 0.3);
            let missing: Vec<Edge> = non_edges(&graph);
            let (k, old) = min_cover(&graph);
            let mut changed = graph.clone();
            let mut added = BTreeSet::new();
            let change_id = match missing.iter().choose(&mut rng) {
                Some(e) => {
                    let (u, v) = e.endpoints();
                    changed.add_edge(u.clone(), v.clone())?;
                    added.insert(e.clone());
                    format!("+ {u} {v}")
                }
                None => "none".to_owned(),
            };
            let budget = CoverBudget(k);
            let cold = decide_cover_counted(&changed, budget);
            let out = warm_start_cover(&changed, &old, &added, budget)?;
            Trial {
                change_id,
                cold: (cold.cover.is_some(), cold.expanded),
                hinted: (out.is_solved(), out.work_units, out.hint_used),
                reproducer: format!(
                    "{}# budget {k}, added {}",
                    reoptlab_core::graph::write_edge_list(&graph),
                    added.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
                ),
            }
        }
        Scenario::SatReplanning => {
            let f = sat_formula(&mut rng, cfg, 1);
            let case = sat_to_replanning(&f);
            let changed = apply_initial_change(&case)?;
            let cold = plan_exists_counted(&changed, DEFAULT_STATE_BUDGET)?;
            let out = reuse_plan(&changed, case.original_plan())?;
            Trial {
                change_id: "- a".to_owned(),
                cold: (cold.plan.is_some(), cold.expanded),
                hinted: (out.is_solved(), out.work_units, out.hint_used),
                reproducer: write_dimacs(&f),
            }
        }
        Scenario::RandomInit => {
            let shape = StripsShape {
                conditions: cfg.conditions,
                operators: cfg.operators,
            };
            // resample until the original has a plan to reuse
            let (inst, plan) = loop {
                let inst = random_strips(&mut rng, shape);
                if let Some(p) = plan_exists_counted(&inst, DEFAULT_STATE_BUDGET)?.plan {
                    break (inst, p);
                }
            };
            let toggled: Condition = inst
                .conditions()
                .iter()
                .choose(&mut rng)
                .expect("conditions are nonempty")
                .clone();
            let mut initial = inst.initial().clone();
            let change_id = if initial.remove(&toggled) {
                format!("- {toggled}")
            } else {
                initial.insert(toggled.clone());
                format!("+ {toggled}")
            };
            let changed = inst.with_initial(initial)?;
            let cold = plan_exists_counted(&changed, DEFAULT_STATE_BUDGET)?;
            let out = reuse_plan(&changed, &plan)?;
            Trial {
                change_id,
                cold: (cold.plan.is_some(), cold.expanded),
                hinted: (out.is_solved(), out.work_units, out.hint_used),
                reproducer: format!("{}# plan {plan}", write_instance_json(&inst)),
            }
        }
    })
}

fn non_edges(g: &Graph) -> Vec<Edge> {
    let nodes: Vec<&NodeId> = g.nodes().iter().collect();
    let mut out = Vec::new();
    for (i, u) in nodes.iter().enumerate() {
        for v in &nodes[i + 1..] {
            if !g.has_edge((*u).clone(), (*v).clone()) {
                out.push(Edge::new((*u).clone(), (*v).clone()));
            }
        }
    }
    out
}

fn min_cover(g: &Graph) -> (usize, reoptlab_core::graph::Cover) {
    (0..=g.node_count())
        .find_map(|k| decide_cover_counted(g, CoverBudget(k)).cover.map(|c| (k, c)))
        .expect("all nodes form a cover")
}

/// Runs every trial, in parallel, and checks cold and hinted verdicts agree.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    cfg.validate()?;
    let trials: Vec<Trial> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, i))
        .collect::<Result<_, _>>()?;
    let mut rows = Vec::with_capacity(trials.len());
    for (i, t) in trials.into_iter().enumerate() {
        if t.cold.0 != t.hinted.0 {
            return Err(HarnessError::VerdictMismatch {
                trial: i,
                reproducer: t.reproducer,
            });
        }
        rows.push(Row {
            trial_id: i,
            problem: cfg.scenario.problem(),
            change_id: t.change_id,
            cold_verdict: t.cold.0,
            hinted_verdict: t.hinted.0,
            cold_work: t.cold.1,
            hinted_work: t.hinted.1,
            hint_used: t.hinted.2,
        });
    }
    let used = rows.iter().filter(|r| r.hint_used).count();
    let summary = Summary {
        rows: rows.len(),
        hint_used: used,
        hint_rate: if rows.is_empty() {
            0.0
        } else {
            used as f64 / rows.len() as f64
        },
        cold_work: rows.iter().map(|r| r.cold_work).sum(),
        hinted_work: rows.iter().map(|r| r.hinted_work).sum(),
    };
    Ok(ExperimentReport {
        seed: cfg.seed,
        config: cfg.clone(),
        rows,
        summary,
    })
}

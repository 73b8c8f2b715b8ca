//! Seeded instance files for `reoptlab generate`.

use rand::Rng;

use reoptlab_core::dimacs::write_dimacs;
use reoptlab_core::gadget::{build_gadget, write_gadget_json};
use reoptlab_core::graph::write_edge_list;
use reoptlab_core::hint::{compile_table, write_table_json};
use reoptlab_core::strips::write_instance_json;

use crate::gen::{
    random_candidates, random_formula, random_graph, random_strips, rng_for, FormulaShape,
    StripsShape,
};
use crate::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArtifactKind {
    Cnf,
    Graph,
    Gadget,
    Strips,
    Table,
}

impl ArtifactKind {
    pub fn extension(self) -> &'static str {
        match self {
            ArtifactKind::Cnf => "cnf",
            ArtifactKind::Graph => "edges",
            ArtifactKind::Gadget => "gadget.json",
            ArtifactKind::Strips => "strips.json",
            ArtifactKind::Table => "table.json",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenerateConfig {
    pub kind: ArtifactKind,
    pub seed: u64,
    pub count: usize,
    pub vars: u32,
    pub clauses: usize,
    pub clause_size: usize,
    pub nodes: usize,
    pub density: f64,
    pub conditions: usize,
    pub operators: usize,
    pub candidates: usize,
    pub bound: usize,
}

impl GenerateConfig {
    pub fn new(kind: ArtifactKind, seed: u64) -> Self {
        GenerateConfig {
            kind,
            seed,
            count: 1,
            vars: 3,
            clauses: 4,
            clause_size: 3,
            nodes: 8,
            density: 0.3,
            conditions: 5,
            operators: 5,
            candidates: 3,
            bound: 2,
        }
    }

    fn validate(&self) -> Result<(), HarnessError> {
        let bad = |field: &str, reason: String| {
            Err(HarnessError::InvalidConfig {
                field: field.to_owned(),
                reason,
            })
        };
        if self.kind == ArtifactKind::Gadget && self.clause_size > 3 {
            return bad(
                "clause-size",
                format!("gadgets take clauses of at most 3 literals, got {}", self.clause_size),
            );
        }
        if matches!(self.kind, ArtifactKind::Cnf | ArtifactKind::Gadget | ArtifactKind::Table)
            && self.clauses > 0
            && (self.vars == 0 || self.clause_size == 0)
        {
            return bad("vars", "clauses need at least one variable and literal".into());
        }
        if !(0.0..=1.0).contains(&self.density) {
            return bad("density", format!("{} is not a probability", self.density));
        }
        if self.kind == ArtifactKind::Table && self.candidates > 16 {
            return bad("candidates", format!("{} exceeds 16", self.candidates));
        }
        Ok(())
    }
}

/// `(file name, contents)` for each artifact; identical for identical configs.
pub fn generate(cfg: &GenerateConfig) -> Result<Vec<(String, String)>, HarnessError> {
    cfg.validate()?;
    (0..cfg.count)
        .map(|i| {
            let mut rng = rng_for(cfg.seed, i as u64);
            let formula = |rng: &mut rand_chacha::ChaCha8Rng| {
                let shape = FormulaShape {
                    vars: cfg.vars,
                    clauses: cfg.clauses,
                    min_len: 1,
                    max_len: cfg.clause_size,
                };
                random_formula(rng, shape)
            };
            let text = match cfg.kind {
                ArtifactKind::Cnf => write_dimacs(&formula(&mut rng)),
                ArtifactKind::Graph => write_edge_list(&random_graph(&mut rng, cfg.nodes, cfg.density)),
                ArtifactKind::Gadget => write_gadget_json(&build_gadget(&formula(&mut rng))?),
                ArtifactKind::Strips => {
                    let shape = StripsShape {
                        conditions: cfg.conditions,
                        operators: cfg.operators,
                    };
                    write_instance_json(&random_strips(&mut rng, shape))
                }
                ArtifactKind::Table => {
                    let base = formula(&mut rng);
                    let n = rng.gen_range(0..=cfg.candidates);
                    let candidates = random_candidates(&mut rng, &base, n, cfg.clause_size.max(1));
                    write_table_json(&compile_table(&base, &candidates, cfg.bound)?)
                }
            };
            Ok((format!("instance_{i:04}.{}", cfg.kind.extension()), text))
        })
        .collect()
}

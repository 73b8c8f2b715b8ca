//! CNF to vertex cover, with unit-clause edits as edge additions.
//!
//! For every variable `x` the graph has literal nodes `x`, `-x` joined by an
//! edge, plus spare nodes `x'`, `x''`, `-x'`, `-x''`. A clause of `j ≥ 2`
//! literals becomes a `j`-clique `c<i>_1..c<i>_j`, each member joined to its
//! literal node. A unit clause `l` is the single edge `(l, l')`.
//!
//! With `n` variables, `m` literal occurrences and `r` clauses, the formula is
//! satisfiable iff the graph has a cover of at most `k = n + m - r` nodes.
//! Adding unit `l` adds edge `(l, l')` and keeps `k`; removing unit `l` adds
//! edge `(l', l'')` and raises the budget by one.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cnf::{Clause, CnfFormula, Literal, Variable};
use crate::dimacs::{parse_dimacs, write_dimacs};
use crate::error::{Error, Result};
use crate::graph::{CoverBudget, Edge, Graph, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Literal,
    Prime,
    DoublePrime,
    ClauseMember,
}

/// A unit-clause edit applied after construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnitEdit {
    Add(Literal),
    Remove(Literal),
}

pub fn literal_node(lit: Literal) -> NodeId {
    NodeId::new(lit.to_string())
}

pub fn prime_node(lit: Literal) -> NodeId {
    NodeId::new(format!("{lit}'"))
}

pub fn double_prime_node(lit: Literal) -> NodeId {
    NodeId::new(format!("{lit}''"))
}

fn clause_member_node(clause_index: usize, position: usize) -> NodeId {
    NodeId::new(format!("c{clause_index}_{position}"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    graph: Graph,
    base_budget: usize,
    removals: usize,
    roles: BTreeMap<NodeId, Role>,
    source: CnfFormula,
    clause_nodes: BTreeMap<Clause, Vec<NodeId>>,
    built_from: CnfFormula,
    history: Vec<UnitEdit>,
}

impl Gadget {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// `n + m - r` of the formula the gadget was built from, plus one per
    /// removed unit.
    pub fn budget(&self) -> CoverBudget {
        CoverBudget(self.base_budget + self.removals)
    }

    pub fn base_budget(&self) -> usize {
        self.base_budget
    }

    pub fn removals(&self) -> usize {
        self.removals
    }

    pub fn roles(&self) -> &BTreeMap<NodeId, Role> {
        &self.roles
    }

    pub fn role(&self, node: &NodeId) -> Option<Role> {
        self.roles.get(node).copied()
    }

    /// The formula the gadget currently encodes.
    pub fn source(&self) -> &CnfFormula {
        &self.source
    }

    pub fn built_from(&self) -> &CnfFormula {
        &self.built_from
    }

    pub fn history(&self) -> &[UnitEdit] {
        &self.history
    }

    /// Clique members of a clause with at least two literals.
    pub fn clause_nodes(&self, clause: &Clause) -> Option<&[NodeId]> {
        self.clause_nodes.get(clause).map(Vec::as_slice)
    }

    fn add_node(&mut self, node: NodeId, role: Role) {
        self.graph.add_node(node.clone());
        self.roles.insert(node, role);
    }

    fn add_edge(&mut self, u: NodeId, v: NodeId) {
        self.graph.add_edge(u, v).expect("gadget nodes exist");
    }
}

fn check_clause(clause: &Clause) -> Result<()> {
    if clause.is_empty() {
        return Err(Error::EmptyClauseRejected);
    }
    if clause.len() > 3 {
        return Err(Error::ClauseTooLarge(clause.clone()));
    }
    if clause.is_tautology() {
        return Err(Error::TautologyRejected(clause.clone()));
    }
    Ok(())
}

/// `n + m - r` for a formula whose clauses are all nonempty.
pub fn cover_budget_of(f: &CnfFormula) -> usize {
    f.alphabet().len() + f.literal_occurrences() - f.len()
}

pub fn build_gadget(f: &CnfFormula) -> Result<Gadget> {
    f.clauses().iter().try_for_each(check_clause)?;

    let mut g = Gadget {
        graph: Graph::new(),
        base_budget: cover_budget_of(f),
        removals: 0,
        roles: BTreeMap::new(),
        source: f.clone(),
        clause_nodes: BTreeMap::new(),
        built_from: f.clone(),
        history: Vec::new(),
    };

    for &v in f.alphabet() {
        for lit in [v.positive(), v.negative()] {
            g.add_node(literal_node(lit), Role::Literal);
            g.add_node(prime_node(lit), Role::Prime);
            g.add_node(double_prime_node(lit), Role::DoublePrime);
        }
        g.add_edge(literal_node(v.positive()), literal_node(v.negative()));
    }

    for (ci, clause) in f.clauses().iter().enumerate() {
        if let Some(lit) = clause.as_unit() {
            g.add_edge(literal_node(lit), prime_node(lit));
            continue;
        }
        let members: Vec<NodeId> = (1..=clause.len())
            .map(|pos| clause_member_node(ci + 1, pos))
            .collect();
        for (node, &lit) in members.iter().zip(clause.literals()) {
            g.add_node(node.clone(), Role::ClauseMember);
            g.add_edge(node.clone(), literal_node(lit));
        }
        for (i, u) in members.iter().enumerate() {
            for v in &members[i + 1..] {
                g.add_edge(u.clone(), v.clone());
            }
        }
        g.clause_nodes.insert(clause.clone(), members);
    }
    Ok(g)
}

fn check_variable(g: &Gadget, lit: Literal) -> Result<()> {
    if g.source.alphabet().contains(&lit.var()) {
        Ok(())
    } else {
        Err(Error::OutsideAlphabet(lit))
    }
}

/// Adds unit clause `lit` as the edge `(lit, lit')`. A literal whose unit was
/// removed earlier cannot be re-added: its spare nodes are already wired.
pub fn gadget_add_unit(g: &Gadget, lit: Literal) -> Result<Gadget> {
    check_variable(g, lit)?;
    let unit = Clause::unit(lit);
    if g.source.contains(&unit) {
        return Err(Error::UnitAlreadyPresent(lit));
    }
    if g.graph.has_edge(literal_node(lit), prime_node(lit)) {
        return Err(Error::UnitSlotSpent(lit));
    }
    let mut out = g.clone();
    out.add_edge(literal_node(lit), prime_node(lit));
    out.source.insert(unit);
    out.history.push(UnitEdit::Add(lit));
    Ok(out)
}

/// Removes unit clause `lit` by adding the edge `(lit', lit'')`; the budget
/// grows by one.
pub fn gadget_remove_unit(g: &Gadget, lit: Literal) -> Result<Gadget> {
    check_variable(g, lit)?;
    let unit = Clause::unit(lit);
    if !g.source.contains(&unit) {
        return Err(Error::UnitNotPresent(lit));
    }
    let mut out = g.clone();
    out.add_edge(prime_node(lit), double_prime_node(lit));
    out.source.remove(&unit);
    out.removals += 1;
    out.history.push(UnitEdit::Remove(lit));
    Ok(out)
}

pub fn apply_unit_edit(g: &Gadget, edit: UnitEdit) -> Result<Gadget> {
    match edit {
        UnitEdit::Add(l) => gadget_add_unit(g, l),
        UnitEdit::Remove(l) => gadget_remove_unit(g, l),
    }
}

/// Every clause over three distinct variables of `alphabet`, all eight sign
/// patterns, in canonical order.
pub fn clause_universe(alphabet: &BTreeSet<Variable>) -> Vec<Clause> {
    let vars: Vec<Variable> = alphabet.iter().copied().collect();
    let mut out = BTreeSet::new();
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            for k in j + 1..vars.len() {
                for signs in 0..8u8 {
                    out.insert(Clause::new([
                        Literal::new(vars[i], signs & 1 != 0),
                        Literal::new(vars[j], signs & 2 != 0),
                        Literal::new(vars[k], signs & 4 != 0),
                    ]));
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Gadget of the formula holding every clause of [`clause_universe`]. Its
/// node set depends only on the alphabet size.
pub fn build_full_gadget(alphabet: &BTreeSet<Variable>) -> Gadget {
    let f = CnfFormula::new(alphabet.iter().copied(), clause_universe(alphabet))
        .expect("universe clauses use the alphabet");
    build_gadget(&f).expect("universe clauses are 3-literal and non-tautological")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub graph: Graph,
    pub budget: CoverBudget,
}

/// Drops the clause-to-literal edges of every universe clause outside `f`.
///
/// Dropped clauses keep their triangles, which still need two cover nodes
/// each, so the threshold stays the full gadget's `n + 2·|universe|`. Only
/// edges change between formulas over the same alphabet.
pub fn project_formula(full: &Gadget, f: &CnfFormula) -> Result<Projection> {
    if let Some(c) = f.clauses().iter().find(|c| !full.clause_nodes.contains_key(c)) {
        return Err(Error::ClauseOutsideUniverse(c.clone()));
    }
    let mut graph = full.graph.clone();
    for (clause, members) in &full.clause_nodes {
        if f.contains(clause) {
            continue;
        }
        for (node, &lit) in members.iter().zip(clause.literals()) {
            graph.remove_edge(&Edge::new(node.clone(), literal_node(lit)));
        }
    }
    Ok(Projection {
        graph,
        budget: full.budget(),
    })
}

#[derive(Serialize, Deserialize)]
struct GadgetDoc {
    built_from: String,
    edits: Vec<String>,
    budget: usize,
    nodes: BTreeMap<String, Role>,
    edges: Vec<(String, String)>,
}

fn edit_text(e: &UnitEdit) -> String {
    match e {
        UnitEdit::Add(l) => format!("+ {}", l.to_dimacs()),
        UnitEdit::Remove(l) => format!("- {}", l.to_dimacs()),
    }
}

/// JSON gadget file: the DIMACS text it was built from, the unit edits
/// applied since (`"+ <lit>"` / `"- <lit>"`), the budget, the role of every
/// node and the edge list.
pub fn write_gadget_json(g: &Gadget) -> String {
    let doc = GadgetDoc {
        built_from: write_dimacs(&g.built_from),
        edits: g.history.iter().map(edit_text).collect(),
        budget: g.budget().0,
        nodes: g
            .roles
            .iter()
            .map(|(n, r)| (n.as_str().to_owned(), *r))
            .collect(),
        edges: g
            .graph
            .edges()
            .iter()
            .map(|e| {
                let (u, v) = e.endpoints();
                (u.as_str().to_owned(), v.as_str().to_owned())
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    text.push('\n');
    text
}

/// Rebuilds the gadget by replaying the edits and checks that nodes, roles,
/// edges and budget match the file.
pub fn parse_gadget_json(text: &str) -> Result<Gadget> {
    let doc: GadgetDoc = serde_json::from_str(text)?;
    let mut g = build_gadget(&parse_dimacs(&doc.built_from)?)?;
    for (i, e) in doc.edits.iter().enumerate() {
        let (sign, lit) = e
            .split_once(' ')
            .ok_or_else(|| Error::Json(format!("edit {i}: expected `+ <lit>` or `- <lit>`")))?;
        let lit: i64 = lit
            .trim()
            .parse()
            .map_err(|_| Error::Json(format!("edit {i}: bad literal")))?;
        let lit = Literal::from_dimacs(lit)?;
        let edit = match sign {
            "+" => UnitEdit::Add(lit),
            "-" => UnitEdit::Remove(lit),
            _ => return Err(Error::Json(format!("edit {i}: unknown sign `{sign}`"))),
        };
        g = apply_unit_edit(&g, edit)?;
    }
    let roles: BTreeMap<String, Role> = g
        .roles
        .iter()
        .map(|(n, r)| (n.as_str().to_owned(), *r))
        .collect();
    let edges: BTreeSet<Edge> = doc
        .edges
        .iter()
        .map(|(u, v)| Edge::new(u.as_str(), v.as_str()))
        .collect();
    if roles != doc.nodes || &edges != g.graph.edges() || doc.budget != g.budget().0 {
        return Err(Error::Json(
            "nodes, edges or budget disagree with the replayed construction".into(),
        ));
    }
    Ok(g)
}

//! Undirected graphs with string-labelled nodes, vertex-cover checking,
//! an exhaustive minimum-cover oracle and a budgeted branch-and-bound solver.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::hint::ReuseOutcome;

pub const DEFAULT_COVER_ORACLE_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(label: impl Into<String>) -> Self {
        NodeId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Unordered pair, stored with the smaller label first.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(NodeId, NodeId);

impl Edge {
    pub fn new(u: impl Into<NodeId>, v: impl Into<NodeId>) -> Self {
        let (u, v) = (u.into(), v.into());
        if u <= v {
            Edge(u, v)
        } else {
            Edge(v, u)
        }
    }

    pub fn endpoints(&self) -> (&NodeId, &NodeId) {
        (&self.0, &self.1)
    }

    pub fn touches(&self, node: &NodeId) -> bool {
        &self.0 == node || &self.1 == node
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.0, self.1)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    nodes: BTreeSet<NodeId>,
    edges: BTreeSet<Edge>,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    /// Graph whose node set is exactly the edge endpoints.
    pub fn from_edges<U, V>(edges: impl IntoIterator<Item = (U, V)>) -> Result<Self>
    where
        U: Into<NodeId>,
        V: Into<NodeId>,
    {
        let mut g = Graph::new();
        for (u, v) in edges {
            let (u, v) = (u.into(), v.into());
            g.add_node(u.clone());
            g.add_node(v.clone());
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_node(&mut self, node: impl Into<NodeId>) -> bool {
        self.nodes.insert(node.into())
    }

    /// Both endpoints must already be nodes. Returns false if the edge existed.
    pub fn add_edge(&mut self, u: impl Into<NodeId>, v: impl Into<NodeId>) -> Result<bool> {
        let (u, v) = (u.into(), v.into());
        for n in [&u, &v] {
            if !self.nodes.contains(n) {
                return Err(Error::UnknownNode(n.to_string()));
            }
        }
        if u == v {
            return Err(Error::SelfLoop(u.to_string()));
        }
        Ok(self.edges.insert(Edge::new(u, v)))
    }

    pub fn remove_edge(&mut self, edge: &Edge) -> bool {
        self.edges.remove(edge)
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn contains_node(&self, node: &NodeId) -> bool {
        self.nodes.contains(node)
    }

    pub fn has_edge(&self, u: impl Into<NodeId>, v: impl Into<NodeId>) -> bool {
        self.edges.contains(&Edge::new(u, v))
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, node: &NodeId) -> usize {
        self.edges.iter().filter(|e| e.touches(node)).count()
    }

    /// The same graph without the given edges.
    pub fn without_edges<'a>(&self, removed: impl IntoIterator<Item = &'a Edge>) -> Graph {
        let mut g = self.clone();
        for e in removed {
            g.edges.remove(e);
        }
        g
    }

    fn index(&self) -> Indexed {
        let labels: Vec<NodeId> = self.nodes.iter().cloned().collect();
        let pos: BTreeMap<&NodeId, usize> =
            labels.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let mut adj = vec![Vec::new(); labels.len()];
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|e| {
                let (u, v) = (pos[&e.0], pos[&e.1]);
                adj[u].push(v);
                adj[v].push(u);
                (u, v)
            })
            .collect();
        Indexed { labels, adj, edges }
    }
}

struct Indexed {
    labels: Vec<NodeId>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl Indexed {
    /// Connected components of non-isolated nodes, each sorted ascending.
    fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.labels.len()];
        let mut out = Vec::new();
        for start in 0..self.labels.len() {
            if seen[start] || self.adj[start].is_empty() {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut i = 0;
            while i < comp.len() {
                for &w in &self.adj[comp[i]] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cover {
    members: BTreeSet<NodeId>,
}

impl Cover {
    pub fn new<N: Into<NodeId>>(members: impl IntoIterator<Item = N>) -> Self {
        Cover {
            members: members.into_iter().map(Into::into).collect(),
        }
    }

    pub fn members(&self) -> &BTreeSet<NodeId> {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.members.contains(node)
    }

    pub fn covers(&self, edge: &Edge) -> bool {
        self.members.contains(&edge.0) || self.members.contains(&edge.1)
    }
}

impl fmt::Display for Cover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.members.iter().map(NodeId::as_str).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// Upper bound `k` on the size of a cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoverBudget(pub usize);

impl CoverBudget {
    /// Checks `k ≤ |nodes|`.
    pub fn for_graph(k: usize, graph: &Graph) -> Result<Self> {
        if k > graph.node_count() {
            return Err(Error::BudgetTooLarge {
                budget: k,
                nodes: graph.node_count(),
            });
        }
        Ok(CoverBudget(k))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

fn check_members(graph: &Graph, candidate: &Cover) -> Result<()> {
    match candidate.members.iter().find(|n| !graph.contains_node(n)) {
        Some(n) => Err(Error::UnknownNode(n.to_string())),
        None => Ok(()),
    }
}

pub fn is_cover(graph: &Graph, candidate: &Cover) -> Result<bool> {
    check_members(graph, candidate)?;
    Ok(graph.edges.iter().all(|e| candidate.covers(e)))
}

/// Exhaustive minimum vertex cover.
///
/// Isolated nodes never belong to a minimum cover, and a minimum cover is the
/// union of minimum covers of the connected components, so enumeration runs
/// per component. Within a component subsets are tried by increasing size in
/// lexicographic order of labels; the union of per-component lexicographically
/// least covers is the globally least one because equal-size sets compare by
/// the smallest element of their symmetric difference.
#[derive(Clone, Copy, Debug)]
pub struct CoverOracle {
    limit: usize,
}

impl Default for CoverOracle {
    fn default() -> Self {
        CoverOracle {
            limit: DEFAULT_COVER_ORACLE_LIMIT,
        }
    }
}

impl CoverOracle {
    pub fn with_limit(limit: usize) -> Self {
        CoverOracle {
            limit: limit.min(63),
        }
    }

    pub fn min_cover(&self, graph: &Graph) -> Result<(usize, Cover)> {
        let idx = graph.index();
        let comps = idx.components();
        if let Some(big) = comps.iter().find(|c| c.len() > self.limit) {
            return Err(Error::GraphTooLarge {
                size: big.len(),
                limit: self.limit,
            });
        }
        let mut local = vec![usize::MAX; idx.labels.len()];
        let mut members = BTreeSet::new();
        for comp in &comps {
            for (i, &g) in comp.iter().enumerate() {
                local[g] = i;
            }
            let edge_masks: Vec<u64> = idx
                .edges
                .iter()
                .filter(|(u, _)| local[*u] != usize::MAX && comp.binary_search(u).is_ok())
                .map(|&(u, v)| 1u64 << local[u] | 1u64 << local[v])
                .collect();
            let best = min_component_cover(comp.len(), &edge_masks);
            members.extend(
                (0..comp.len())
                    .filter(|i| best >> i & 1 == 1)
                    .map(|i| idx.labels[comp[i]].clone()),
            );
        }
        Ok((members.len(), Cover { members }))
    }
}

/// Smallest, then lexicographically least, subset of `0..n` hitting every mask.
fn min_component_cover(n: usize, edge_masks: &[u64]) -> u64 {
    let hits_all = |mask: u64| edge_masks.iter().all(|&e| e & mask != 0);
    for size in 0..=n {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            let mask = comb.iter().fold(0u64, |m, &i| m | 1 << i);
            if hits_all(mask) {
                return mask;
            }
            // next combination in lexicographic order
            let Some(pos) = (0..size).rev().find(|&i| comb[i] < n - size + i) else {
                break;
            };
            comb[pos] += 1;
            for j in pos + 1..size {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
    unreachable!("the full node set covers every edge")
}

pub fn min_cover_brute(graph: &Graph) -> Result<(usize, Cover)> {
    CoverOracle::default().min_cover(graph)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSearch {
    pub cover: Option<Cover>,
    /// Search nodes expanded.
    pub expanded: u64,
}

struct BranchAndBound<'a> {
    idx: &'a Indexed,
    in_cover: Vec<bool>,
    expanded: u64,
}

impl BranchAndBound<'_> {
    fn residual_degree(&self, v: usize) -> usize {
        if self.in_cover[v] {
            return 0;
        }
        self.idx.adj[v].iter().filter(|&&w| !self.in_cover[w]).count()
    }

    fn search(&mut self, budget: usize) -> bool {
        self.expanded += 1;
        let n = self.idx.labels.len();
        let degrees: Vec<usize> = (0..n).map(|v| self.residual_degree(v)).collect();
        let uncovered: usize = degrees.iter().sum::<usize>() / 2;
        if uncovered == 0 {
            return true;
        }
        // highest residual degree, lowest label on ties
        let (pick, &max_deg) = degrees
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("nonempty");
        if budget == 0 || uncovered > budget * max_deg {
            return false;
        }

        self.in_cover[pick] = true;
        if self.search(budget - 1) {
            return true;
        }
        self.in_cover[pick] = false;

        // pick stays out, so every uncovered neighbour goes in
        let neighbours: Vec<usize> = self.idx.adj[pick]
            .iter()
            .copied()
            .filter(|&w| !self.in_cover[w])
            .collect();
        if neighbours.len() <= budget {
            for &w in &neighbours {
                self.in_cover[w] = true;
            }
            // pick is now isolated in the residual graph and never chosen again
            if self.search(budget - neighbours.len()) {
                return true;
            }
            for &w in &neighbours {
                self.in_cover[w] = false;
            }
        }
        false
    }
}

pub fn decide_cover_counted(graph: &Graph, budget: CoverBudget) -> CoverSearch {
    let idx = graph.index();
    let mut bb = BranchAndBound {
        idx: &idx,
        in_cover: vec![false; idx.labels.len()],
        expanded: 0,
    };
    let found = bb.search(budget.0);
    let cover = found.then(|| Cover {
        members: bb
            .in_cover
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(i, _)| idx.labels[i].clone())
            .collect(),
    });
    CoverSearch {
        cover,
        expanded: bb.expanded,
    }
}

/// A cover of size at most `budget`, if one exists.
pub fn decide_cover(graph: &Graph, budget: CoverBudget) -> Option<Cover> {
    decide_cover_counted(graph, budget).cover
}

/// Reuses `old_cover`, a cover of `graph` minus `added_edges`, when it still
/// covers the added edges within budget; otherwise solves from scratch.
pub fn warm_start_cover(
    graph: &Graph,
    old_cover: &Cover,
    added_edges: &BTreeSet<Edge>,
    budget: CoverBudget,
) -> Result<ReuseOutcome<Cover>> {
    check_members(graph, old_cover)
        .map_err(|e| Error::InvalidHint(format!("cover mentions a foreign node: {e}")))?;
    if let Some(e) = added_edges.iter().find(|e| !graph.edges.contains(e)) {
        return Err(Error::InvalidHint(format!("added edge {e} is not in the graph")));
    }
    let mut work = 0u64;
    for e in graph.edges.iter().filter(|e| !added_edges.contains(e)) {
        work += 1;
        if !old_cover.covers(e) {
            return Err(Error::InvalidHint(format!(
                "old cover misses edge {e} of the unchanged graph"
            )));
        }
    }
    work += added_edges.len() as u64;
    if old_cover.len() <= budget.0 && added_edges.iter().all(|e| old_cover.covers(e)) {
        return Ok(ReuseOutcome::hinted(Some(old_cover.clone()), work));
    }
    let search = decide_cover_counted(graph, budget);
    Ok(ReuseOutcome::cold(search.cover, work + search.expanded))
}

/// Edge-list text: one `u v` pair per line. A line holding a single label
/// declares a node without edges. `#` starts a comment line.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut g = Graph::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [n] => {
                g.add_node(*n);
            }
            [u, v] => {
                g.add_node(*u);
                g.add_node(*v);
                g.add_edge(*u, *v)
                    .map_err(|e| Error::parse(idx + 1, e.to_string()))?;
            }
            _ => return Err(Error::parse(idx + 1, "expected `u v` or a single node")),
        }
    }
    Ok(g)
}

/// Isolated nodes first, then edges, both sorted.
pub fn write_edge_list(graph: &Graph) -> String {
    let mut out = String::new();
    for n in graph.nodes.iter().filter(|n| graph.degree(n) == 0) {
        out.push_str(n.as_str());
        out.push('\n');
    }
    for e in &graph.edges {
        out.push_str(&format!("{e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges([("a", "b"), ("b", "c"), ("a", "c")]).unwrap()
    }

    #[test]
    fn is_cover_examples() {
        assert!(is_cover(&Graph::new(), &Cover::default()).unwrap());
        assert!(!is_cover(&triangle(), &Cover::new(["a"])).unwrap());
        assert!(is_cover(&triangle(), &Cover::new(["a", "b"])).unwrap());
        assert_eq!(
            is_cover(&triangle(), &Cover::new(["z"])),
            Err(Error::UnknownNode("z".into()))
        );
    }

    #[test]
    fn graph_rejects_bad_edges() {
        let mut g = Graph::new();
        g.add_node("a");
        assert!(matches!(g.add_edge("a", "a"), Err(Error::SelfLoop(_))));
        assert!(matches!(g.add_edge("a", "b"), Err(Error::UnknownNode(_))));
    }

    #[test]
    fn min_cover_examples() {
        assert_eq!(min_cover_brute(&Graph::new()).unwrap(), (0, Cover::default()));
        let edge = Graph::from_edges([("v", "u")]).unwrap();
        assert_eq!(min_cover_brute(&edge).unwrap(), (1, Cover::new(["u"])));
        assert_eq!(
            min_cover_brute(&triangle()).unwrap(),
            (2, Cover::new(["a", "b"]))
        );
    }

    #[test]
    fn min_cover_limit_is_per_component() {
        let star: Vec<(String, String)> =
            (0..30).map(|i| ("hub".to_owned(), format!("leaf{i:02}"))).collect();
        let err = min_cover_brute(&Graph::from_edges(star.clone()).unwrap()).unwrap_err();
        assert_eq!(err, Error::GraphTooLarge { size: 31, limit: 24 });
        // thirty disjoint edges are fine
        let matching: Vec<(String, String)> =
            (0..30).map(|i| (format!("a{i:02}"), format!("b{i:02}"))).collect();
        let (size, cover) = min_cover_brute(&Graph::from_edges(matching).unwrap()).unwrap();
        assert_eq!(size, 30);
        assert!(cover.members().iter().all(|n| n.as_str().starts_with('a')));
    }

    #[test]
    fn decide_cover_examples() {
        let c = decide_cover(&triangle(), CoverBudget(2)).unwrap();
        assert!(c.len() <= 2 && is_cover(&triangle(), &c).unwrap());
        assert_eq!(decide_cover(&triangle(), CoverBudget(1)), None);
        assert_eq!(decide_cover(&Graph::new(), CoverBudget(0)), Some(Cover::default()));
    }

    #[test]
    fn budget_bound_checked() {
        assert!(CoverBudget::for_graph(3, &triangle()).is_ok());
        assert!(CoverBudget::for_graph(4, &triangle()).is_err());
    }

    #[test]
    fn warm_start_fast_path() {
        let path = Graph::from_edges([("a", "b"), ("b", "c")]).unwrap();
        let added: BTreeSet<Edge> = [Edge::new("b", "c")].into_iter().collect();
        let out = warm_start_cover(&path, &Cover::new(["b"]), &added, CoverBudget(1)).unwrap();
        assert!(out.hint_used);
        assert_eq!(out.solution, Some(Cover::new(["b"])));
    }

    #[test]
    fn warm_start_fallback_and_invalid_hint() {
        let path = Graph::from_edges([("a", "b"), ("b", "c")]).unwrap();
        let added: BTreeSet<Edge> = [Edge::new("b", "c")].into_iter().collect();
        let out = warm_start_cover(&path, &Cover::new(["a"]), &added, CoverBudget(1)).unwrap();
        assert!(!out.hint_used);
        assert_eq!(out.solution.map(|c| c.len()), Some(1));

        let out = warm_start_cover(&path, &Cover::new(["a"]), &added, CoverBudget(2)).unwrap();
        let cover = out.solution.unwrap();
        assert!(cover.len() <= 2 && is_cover(&path, &cover).unwrap());

        let err = warm_start_cover(&path, &Cover::new(["c"]), &added, CoverBudget(2));
        assert!(matches!(err, Err(Error::InvalidHint(_))));
    }

    #[test]
    fn edge_list_keeps_isolated_nodes() {
        let mut g = triangle();
        g.add_node("z");
        let text = write_edge_list(&g);
        assert_eq!(text, "z\na b\na c\nb c\n");
        assert_eq!(parse_edge_list(&text).unwrap(), g);
        assert!(parse_edge_list("a b c\n").is_err());
        assert!(parse_edge_list("a a\n").is_err());
    }
}

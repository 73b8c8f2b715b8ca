//! Graphviz export of gadget graphs.

use std::fmt::Write;

use reoptlab_core::gadget::{Gadget, Role};

fn style(role: Option<Role>) -> &'static str {
    match role {
        Some(Role::Literal) => "shape=circle, style=filled, fillcolor=lightblue",
        Some(Role::Prime) => "shape=box, style=filled, fillcolor=khaki",
        Some(Role::DoublePrime) => "shape=diamond, style=filled, fillcolor=salmon",
        Some(Role::ClauseMember) => "shape=ellipse, style=filled, fillcolor=palegreen",
        None => "shape=point",
    }
}

fn quote(label: &str) -> String {
    format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Undirected DOT graph, nodes styled by role, edges in canonical order.
pub fn gadget_to_dot(g: &Gadget) -> String {
    let mut out = String::from("graph gadget {\n");
    if g.graph().node_count() > 0 {
        writeln!(out, "  label=\"budget {}\";", g.budget().get()).unwrap();
    }
    for node in g.graph().nodes() {
        writeln!(out, "  {} [{}];", quote(node.as_str()), style(g.role(node))).unwrap();
    }
    for edge in g.graph().edges() {
        let (u, v) = edge.endpoints();
        writeln!(out, "  {} -- {};", quote(u.as_str()), quote(v.as_str())).unwrap();
    }
    out.push_str("}\n");
    out
}

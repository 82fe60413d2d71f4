//! Graphviz renderings of a tree and of its Markov graph.

use std::fmt::Write;

use crate::orbits::MarkovGraph;
use crate::scalar::Scalar;
use crate::tree::{MarkedTreeMap, Tag};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Undirected tree. Vertices carry their tag, edges their subdivision weights.
pub fn tree_dot<S: Scalar>(tm: &MarkedTreeMap<S>) -> String {
    let tree = tm.tree();
    let mut out = String::from("graph tree {\n");
    for (_, v) in tree.vertices() {
        let shape = match v.tag {
            Tag::Fatou => "circle",
            Tag::Julia => "doublecircle",
            Tag::Untagged => "box",
        };
        let _ = writeln!(
            out,
            "  {} [label={}, shape={shape}];",
            quote(&v.name),
            quote(&format!("{} ({})", v.name, v.tag.as_str()))
        );
    }
    for (e, [a, b]) in tree.edges() {
        let weights: Vec<String> = tm.segments_of(e).iter().map(|s| s.weight.to_string()).collect();
        let _ = writeln!(
            out,
            "  {} -- {} [label={}];",
            quote(&tree.vertex(a).name),
            quote(&tree.vertex(b).name),
            quote(&format!("{e} [{}]", weights.join(", ")))
        );
    }
    out.push_str("}\n");
    out
}

/// Directed segment graph: one node per segment, an arc `J → K` when `τ(J) ⊇ K`.
pub fn markov_dot(graph: &MarkovGraph) -> String {
    let mut out = String::from("digraph markov {\n");
    for n in &graph.nodes {
        let _ = writeln!(out, "  {} [label={}];", quote(&n.label), quote(&format!("{} -> {}", n.label, n.image)));
    }
    for (a, b) in graph.arcs() {
        let _ = writeln!(out, "  {} -> {};", quote(&graph.nodes[a].label), quote(&graph.nodes[b].label));
    }
    out.push_str("}\n");
    out
}

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::tree::{BasicEventKind, ConstructionStep, FaultTree, GateKind, Node, NodeBody};

/// Dot text for `tree`. Nodes owned by a component are grouped in a
/// `cluster_<component>` subgraph; shared events stay at the top level.
pub fn export_graph(tree: &FaultTree) -> String {
    let live = tree.descendants(&tree.top);
    let nodes: Vec<&Node> = live.iter().filter_map(|id| tree.nodes.get(id)).collect();

    let mut clusters: BTreeMap<&str, Vec<&Node>> = BTreeMap::new();
    let mut loose = Vec::new();
    for n in &nodes {
        match &n.owner {
            Some(o) => clusters.entry(o.as_str()).or_default().push(n),
            None => loose.push(*n),
        }
    }

    let mut out = String::new();
    let _ = writeln!(out, "digraph {} {{", quote(&tree.name));
    out.push_str("  rankdir=TB;\n  node [fontname=\"Helvetica\", fontsize=10];\n");
    for n in &loose {
        node_line(&mut out, "  ", n, tree);
    }
    for (owner, members) in &clusters {
        let _ = writeln!(out, "  subgraph {} {{", quote(&format!("cluster_{owner}")));
        let _ = writeln!(out, "    label={};", quote(owner));
        for n in members {
            node_line(&mut out, "    ", n, tree);
        }
        out.push_str("  }\n");
    }
    for n in &nodes {
        let mut seen = Vec::new();
        for c in n.children() {
            if !seen.contains(&c) && live.contains(c) {
                seen.push(c);
                let _ = writeln!(out, "  {} -> {};", quote(&n.id), quote(c));
            }
        }
    }
    out.push_str("}\n");
    out
}

fn node_line(out: &mut String, indent: &str, n: &Node, tree: &FaultTree) {
    let step = tree.provenance.get(&n.id).copied();
    let attrs = match &n.body {
        NodeBody::Gate { kind, .. } => {
            let shape = match kind {
                GateKind::Or => "trapezium",
                GateKind::And => "house",
            };
            let color = match step {
                Some(ConstructionStep::HardwareBranch) => "#4a6fa5",
                Some(ConstructionStep::SoftwareBranch) => "#d9822b",
                Some(ConstructionStep::DependencyBranch) => "#3c8d5a",
                _ => "#333333",
            };
            format!("shape={shape}, color=\"{color}\"")
        }
        NodeBody::Basic { event } => {
            let (shape, fill) = match event {
                BasicEventKind::HardwareFailure => ("circle", "#c6d4ea"),
                BasicEventKind::SoftwareInternal { .. } => ("circle", "#f6d2a8"),
                BasicEventKind::ProceduralFailure { .. } => ("circle", "#f3e6a0"),
                BasicEventKind::TransmissionFailure { .. } => ("circle", "#bfe3c9"),
                BasicEventKind::SharedCcf { .. } => ("doublecircle", "#f2a7a0"),
            };
            format!("shape={shape}, style=filled, fillcolor=\"{fill}\"")
        }
        NodeBody::Reference { target } => format!("shape=box, style=dashed, tooltip={}", quote(target)),
    };
    let _ = writeln!(out, "{indent}{} [label={}, {attrs}];", quote(&n.id), quote(&n.label));
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

//! Open-PSA model-exchange XML.
//!
//! Gates become `define-gate` elements with an `or`/`and` formula. Basic
//! events are defined under `model-data`; taxonomy data (event kind, UCA or
//! UIF type, divisions, owner) travels as extra XML attributes on each
//! `define-basic-event`. Loop references are exported as house events fixed
//! to false.

use std::collections::BTreeSet;
use std::fmt::Write;

use thiserror::Error;

use crate::taxonomy::{Flavor, MechanismGroup, UcaType, UifType, UnsafeFlowRecord};
use crate::tree::{BasicEventKind, ConstructionStep, FaultTree, GateKind, Node, NodeBody};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExchangeError {
    #[error("XML error: {0}")]
    Xml(String),
    #[error("{0}")]
    Structure(String),
}

pub fn export_exchange(tree: &FaultTree) -> String {
    let live = tree.descendants(&tree.top);
    let nodes: Vec<&Node> = live.iter().filter_map(|id| tree.nodes.get(id)).collect();

    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<opsa-mef>\n");
    let _ = writeln!(out, "  <define-fault-tree name=\"{}\" top=\"{}\">", esc(&tree.name), esc(&tree.top));
    for n in nodes.iter().filter(|n| n.is_gate()) {
        let NodeBody::Gate { kind, children } = &n.body else { continue };
        let _ = write!(out, "    <define-gate name=\"{}\"", esc(&n.id));
        owner_attrs(&mut out, n);
        out.push_str(">\n");
        let _ = writeln!(out, "      <label>{}</label>", esc(&n.label));
        let op = match kind {
            GateKind::Or => "or",
            GateKind::And => "and",
        };
        let _ = writeln!(out, "      <{op}>");
        for c in children {
            let tag = match tree.nodes.get(c).map(|n| &n.body) {
                Some(NodeBody::Gate { .. }) => "gate",
                Some(NodeBody::Reference { .. }) => "house-event",
                _ => "basic-event",
            };
            let _ = writeln!(out, "        <{tag} name=\"{}\"/>", esc(c));
        }
        let _ = writeln!(out, "      </{op}>");
        out.push_str("    </define-gate>\n");
    }
    out.push_str("  </define-fault-tree>\n  <model-data>\n");
    for n in &nodes {
        match &n.body {
            NodeBody::Basic { event } => {
                let _ = write!(out, "    <define-basic-event name=\"{}\"", esc(&n.id));
                event_attrs(&mut out, n, event);
                out.push_str(">\n");
                let _ = writeln!(out, "      <label>{}</label>", esc(&n.label));
                out.push_str("    </define-basic-event>\n");
            }
            NodeBody::Reference { target } => {
                let _ = writeln!(out, "    <define-house-event name=\"{}\" target=\"{}\">", esc(&n.id), esc(target));
                let _ = writeln!(out, "      <label>{}</label>", esc(&n.label));
                out.push_str("      <constant value=\"false\"/>\n    </define-house-event>\n");
            }
            NodeBody::Gate { .. } => {}
        }
    }
    out.push_str("  </model-data>\n</opsa-mef>\n");
    out
}

fn owner_attrs(out: &mut String, n: &Node) {
    if let Some(o) = &n.owner {
        let _ = write!(out, " component=\"{}\"", esc(o));
    }
    if let Some(d) = &n.division {
        let _ = write!(out, " division=\"{}\"", esc(d));
    }
}

fn event_attrs(out: &mut String, n: &Node, event: &BasicEventKind) {
    let _ = write!(out, " event-kind=\"{}\"", event.keyword());
    owner_attrs(out, n);
    if let BasicEventKind::TransmissionFailure { signal, .. } = event {
        let _ = write!(out, " signal=\"{}\"", esc(signal));
    }
    if let Some(r) = event.record() {
        let (subject_key, subject) = match &r.flavor {
            Flavor::Uca { control_action, .. } => ("control-action", control_action),
            Flavor::Uif { signal, .. } => ("uif-signal", signal),
        };
        let _ = write!(
            out,
            " record=\"{}\" owner=\"{}\" type=\"{}\" {subject_key}=\"{}\" mechanism=\"{}\"",
            esc(&r.id),
            esc(&r.owner),
            r.flavor.tag(),
            esc(subject),
            r.mechanism_group.keyword()
        );
        if !r.context.is_empty() {
            let _ = write!(out, " context=\"{}\"", esc(&r.context));
        }
        if !r.shared_divisions.is_empty() {
            let _ = write!(out, " divisions=\"{}\"", esc(&r.shared_divisions.join(",")));
        }
        if !r.top_events.is_empty() {
            let _ = write!(out, " top-events=\"{}\"", esc(&r.top_events.join(",")));
        }
    }
    if let BasicEventKind::SharedCcf { merged, .. } = event {
        if !merged.is_empty() {
            let _ = write!(out, " merged=\"{}\"", esc(&merged.join(",")));
        }
    }
}

fn esc(s: &str) -> String {
    let mut o = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => o.push_str("&amp;"),
            '<' => o.push_str("&lt;"),
            '>' => o.push_str("&gt;"),
            '"' => o.push_str("&quot;"),
            '\'' => o.push_str("&apos;"),
            '\n' => o.push_str("&#10;"),
            '\r' => o.push_str("&#13;"),
            '\t' => o.push_str("&#9;"),
            c => o.push(c),
        }
    }
    o
}

/// Read back a tree written by [`export_exchange`]. Plain Open-PSA files
/// without the extra attributes import too; their basic events become
/// hardware failures.
pub fn import_exchange(xml: &str) -> Result<FaultTree, ExchangeError> {
    let doc = roxmltree::Document::parse(xml).map_err(|e| ExchangeError::Xml(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "opsa-mef" {
        return Err(ExchangeError::Structure(format!("root element is <{}>, expected <opsa-mef>", root.tag_name().name())));
    }
    let trees: Vec<_> = root.children().filter(|n| n.has_tag_name("define-fault-tree")).collect();
    let [ft] = trees.as_slice() else {
        return Err(ExchangeError::Structure(format!("expected one define-fault-tree, found {}", trees.len())));
    };
    let name = ft.attribute("name").unwrap_or("imported").to_string();

    let mut tree = FaultTree::new(name, "");
    let mut referenced = BTreeSet::new();
    let mut gate_order = Vec::new();
    for g in ft.children().filter(|n| n.has_tag_name("define-gate")) {
        let id = required(&g, "name")?;
        let formula = g
            .children()
            .find(|c| c.is_element() && !c.has_tag_name("label") && !c.has_tag_name("attributes"))
            .ok_or_else(|| ExchangeError::Structure(format!("gate `{id}` has no formula")))?;
        let (kind, args): (GateKind, Vec<roxmltree::Node>) = match formula.tag_name().name() {
            "or" => (GateKind::Or, formula.children().filter(|c| c.is_element()).collect()),
            "and" => (GateKind::And, formula.children().filter(|c| c.is_element()).collect()),
            "gate" | "basic-event" | "house-event" => (GateKind::Or, vec![formula]),
            other => return Err(ExchangeError::Structure(format!("gate `{id}`: unsupported formula <{other}>"))),
        };
        let mut children = Vec::new();
        for a in args {
            match a.tag_name().name() {
                "gate" | "basic-event" | "house-event" => {
                    let c = required(&a, "name")?.to_string();
                    referenced.insert(c.clone());
                    children.push(c);
                }
                other => return Err(ExchangeError::Structure(format!("gate `{id}`: unsupported argument <{other}>"))),
            }
        }
        let mut node = Node::gate(id, kind, children).with_label(label(&g).unwrap_or(id));
        node.owner = g.attribute("component").map(str::to_string);
        node.division = g.attribute("division").map(str::to_string);
        gate_order.push(id.to_string());
        tree.insert(node, ConstructionStep::Imported);
    }

    for md in root.children().filter(|n| n.has_tag_name("model-data")) {
        for e in md.children().filter(|n| n.is_element()) {
            let id = required(&e, "name")?;
            let node = match e.tag_name().name() {
                "define-basic-event" => {
                    let mut n = Node::event(id, event_kind(&e)?).with_label(label(&e).unwrap_or(id));
                    n.owner = e.attribute("component").map(str::to_string);
                    n.division = e.attribute("division").map(str::to_string);
                    n
                }
                "define-house-event" => Node {
                    id: id.to_string(),
                    label: label(&e).unwrap_or(id).to_string(),
                    owner: None,
                    division: None,
                    body: NodeBody::Reference { target: e.attribute("target").unwrap_or("").to_string() },
                },
                _ => continue,
            };
            tree.insert(node, ConstructionStep::Imported);
        }
    }

    tree.top = match ft.attribute("top") {
        Some(t) => t.to_string(),
        None => {
            let roots: Vec<&String> = gate_order.iter().filter(|g| !referenced.contains(*g)).collect();
            match roots.as_slice() {
                [one] => one.to_string(),
                _ => return Err(ExchangeError::Structure(format!("cannot determine top gate ({} candidates)", roots.len()))),
            }
        }
    };
    tree.check().map_err(|e| ExchangeError::Structure(e.to_string()))?;
    Ok(tree)
}

fn required<'a>(n: &roxmltree::Node<'a, '_>, attr: &str) -> Result<&'a str, ExchangeError> {
    n.attribute(attr).ok_or_else(|| {
        let pos = n.document().text_pos_at(n.range().start);
        ExchangeError::Structure(format!("<{}> at {pos} lacks `{attr}`", n.tag_name().name()))
    })
}

fn label<'a>(n: &roxmltree::Node<'a, '_>) -> Option<&'a str> {
    n.children().find(|c| c.has_tag_name("label")).and_then(|l| l.text())
}

fn split(v: Option<&str>) -> Vec<String> {
    v.filter(|s| !s.is_empty()).map(|s| s.split(',').map(str::to_string).collect()).unwrap_or_default()
}

fn event_kind(e: &roxmltree::Node) -> Result<BasicEventKind, ExchangeError> {
    let id = e.attribute("name").unwrap_or("");
    let kind = e.attribute("event-kind").unwrap_or("hardware");
    let record = match e.attribute("record") {
        None => None,
        Some(rid) => {
            let bad = |what: &str| ExchangeError::Structure(format!("basic event `{id}`: {what}"));
            let tag = e.attribute("type").ok_or_else(|| bad("record without type"))?;
            let flavor = match tag.split_once('-') {
                Some(("UCA", l)) => Flavor::Uca {
                    control_action: e.attribute("control-action").unwrap_or("").to_string(),
                    uca_type: UcaType::from_letter(l).ok_or_else(|| bad("invalid type"))?,
                },
                Some(("UIF", l)) => Flavor::Uif {
                    signal: e.attribute("uif-signal").unwrap_or("").to_string(),
                    uif_type: UifType::from_letter(l).ok_or_else(|| bad("invalid type"))?,
                },
                _ => return Err(bad("invalid type")),
            };
            Some(UnsafeFlowRecord {
                id: rid.to_string(),
                owner: e.attribute("owner").unwrap_or("").to_string(),
                flavor,
                context: e.attribute("context").unwrap_or("").to_string(),
                mechanism_group: e
                    .attribute("mechanism")
                    .and_then(MechanismGroup::from_keyword)
                    .unwrap_or(MechanismGroup::Group1Internal),
                shared_divisions: split(e.attribute("divisions")),
                top_events: split(e.attribute("top-events")),
            })
        }
    };
    let need = |r: Option<UnsafeFlowRecord>| {
        r.ok_or_else(|| ExchangeError::Structure(format!("basic event `{id}` of kind `{kind}` lacks a record")))
    };
    Ok(match kind {
        "hardware" => BasicEventKind::HardwareFailure,
        "software-internal" => BasicEventKind::SoftwareInternal { record: need(record)? },
        "procedural" => BasicEventKind::ProceduralFailure { record: need(record)? },
        "transmission" => BasicEventKind::TransmissionFailure {
            signal: e.attribute("signal").unwrap_or("").to_string(),
            record,
        },
        "shared-ccf" => BasicEventKind::SharedCcf { record: need(record)?, merged: split(e.attribute("merged")) },
        other => return Err(ExchangeError::Structure(format!("basic event `{id}`: unknown event-kind `{other}`"))),
    })
}

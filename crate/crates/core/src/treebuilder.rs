//! Integrated fault-tree construction.
//!
//! Every component on the way to a top event expands into an OR over up to
//! three branches: its hardware failures, its software failure branch
//! (Group 1 UCAs and UIFs, or procedural failures for a human operator) and
//! its dependency branch. The dependency branch holds the subtree of every
//! component feeding it information plus one transmission failure per
//! incoming signal, recursively, until components with no inputs are reached.
//!
//! Node ids are derived from component, branch and record ids, so building
//! the same model twice yields identical trees.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::model::{validate, Component, ComponentKind, Finding, SystemModel};
use crate::taxonomy::{trace_uif, Flavor, MechanismGroup, UnsafeFlowRecord};
use crate::tree::{BasicEventKind, ConstructionStep, FaultTree, GateKind, Node, NodeBody};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("unknown top event `{0}`")]
    UnknownTopEvent(String),
    #[error("model has {} validation error(s); first: {}", .0.len(), .0[0])]
    InvalidModel(Vec<Finding>),
    #[error("fragment `{0}` contains no UCA to relocate dependencies under")]
    NoUcas(String),
    #[error("fragment top `{0}` is not a gate")]
    NotAGate(String),
}

pub fn top_gate_id(top_event: &str) -> String {
    format!("top-{top_event}")
}

pub fn component_gate_id(component: &str) -> String {
    format!("g-{component}")
}

/// Build the integrated fault tree of `top_event_id` from the given records
/// (usually the model's declared UCAs and UIFs).
pub fn build(model: &SystemModel, top_event_id: &str, records: &[UnsafeFlowRecord]) -> Result<FaultTree, BuildError> {
    let report = validate(model);
    if !report.errors.is_empty() {
        return Err(BuildError::InvalidModel(report.errors));
    }
    let top = model
        .top_event(top_event_id)
        .ok_or_else(|| BuildError::UnknownTopEvent(top_event_id.to_string()))?;

    let mut internal: HashMap<&str, Vec<&UnsafeFlowRecord>> = HashMap::new();
    let mut external: HashMap<&str, Vec<&UnsafeFlowRecord>> = HashMap::new();
    let mut dropped = Vec::new();
    for rec in records.iter().filter(|r| r.relevant_to(top_event_id)) {
        if let Flavor::Uif { signal, .. } = &rec.flavor {
            // validated above, so tracing cannot fail
            if trace_uif(model, rec).map(|p| p.is_empty()).unwrap_or(true) {
                dropped.push(rec.id.clone());
                continue;
            }
            if rec.mechanism_group == MechanismGroup::Group2External {
                external.entry(signal.as_str()).or_default().push(rec);
                continue;
            }
        }
        internal.entry(rec.owner.as_str()).or_default().push(rec);
    }
    for v in internal.values_mut().chain(external.values_mut()) {
        v.sort_by(|a, b| a.id.cmp(&b.id));
    }

    let mut b = Builder {
        model,
        tree: FaultTree::new(top_event_id, top_gate_id(top_event_id)),
        internal,
        external,
        upstream: HashMap::new(),
        memo: HashMap::new(),
        stack: Vec::new(),
    };
    for id in dropped {
        b.tree.warnings.push(format!("UIF `{id}` has no path to a consuming controller; excluded"));
    }

    let mut children = Vec::new();
    for h in &top.hazard_components {
        if let Some(g) = b.expand(h) {
            if !children.contains(&g) {
                children.push(g);
            }
        }
    }
    let top_node = Node::gate(top_gate_id(top_event_id), GateKind::Or, children).with_label(top.description.clone());
    b.tree.insert(top_node, ConstructionStep::TopEvent);
    b.tree.warnings.sort();
    b.tree.warnings.dedup();
    Ok(b.tree)
}

/// [`build`] with the model's own declared records.
pub fn build_declared(model: &SystemModel, top_event_id: &str) -> Result<FaultTree, BuildError> {
    let records: Vec<UnsafeFlowRecord> = model.declared_records().cloned().collect();
    build(model, top_event_id, &records)
}

struct Builder<'m> {
    model: &'m SystemModel,
    tree: FaultTree,
    internal: HashMap<&'m str, Vec<&'m UnsafeFlowRecord>>,
    external: HashMap<&'m str, Vec<&'m UnsafeFlowRecord>>,
    upstream: HashMap<&'m str, BTreeSet<&'m str>>,
    memo: HashMap<String, Option<String>>,
    stack: Vec<&'m str>,
}

impl<'m> Builder<'m> {
    /// Components whose failures can reach `id` through feedback signals.
    fn upstream_of(&mut self, id: &'m str) -> &BTreeSet<&'m str> {
        if !self.upstream.contains_key(id) {
            let mut seen = BTreeSet::new();
            let mut stack = vec![id];
            while let Some(cur) = stack.pop() {
                for s in self.model.feedback_inputs(cur) {
                    if seen.insert(s.source.as_str()) {
                        stack.push(s.source.as_str());
                    }
                }
            }
            self.upstream.insert(id, seen);
        }
        &self.upstream[id]
    }

    /// Gate id of the component's subtree, or `None` when it has nothing to contribute.
    fn expand(&mut self, comp_id: &'m str) -> Option<String> {
        // Ancestors this component can reach again form loops; they are cut,
        // which makes the subtree depend on exactly that set.
        let stack = self.stack.clone();
        let up = self.upstream_of(comp_id);
        let cut: Vec<&str> = stack.iter().copied().filter(|a| up.contains(a)).collect::<BTreeSet<_>>().into_iter().collect();
        let base = if cut.is_empty() {
            component_gate_id(comp_id)
        } else {
            format!("{}-loop-{}", component_gate_id(comp_id), cut.join("-"))
        };
        if let Some(done) = self.memo.get(&base) {
            return done.clone();
        }

        let comp = self.model.component(comp_id).expect("validated model");
        self.stack.push(comp_id);
        let mut branches = Vec::new();
        if let Some(hw) = self.hardware_branch(comp) {
            branches.push(hw);
        }
        if let Some(sw) = self.software_branch(comp) {
            branches.push(sw);
        }
        if let Some(dep) = self.dependency_branch(comp, &base) {
            branches.push(dep);
        }
        self.stack.pop();

        let result = (!branches.is_empty()).then(|| {
            let node = Node::gate(base.clone(), GateKind::Or, branches)
                .with_label(comp.name.clone())
                .with_owner(comp.id.clone(), comp.division.clone());
            self.tree.insert(node, ConstructionStep::Component);
            base.clone()
        });
        self.memo.insert(base, result.clone());
        result
    }

    fn hardware_branch(&mut self, comp: &Component) -> Option<String> {
        if comp.hardware_failure_modes.is_empty() {
            return None;
        }
        let mut used = BTreeSet::new();
        let mut children = Vec::new();
        for mode in &comp.hardware_failure_modes {
            let slug = slugify(mode);
            let mut id = format!("hw-{}-{slug}", comp.id);
            let mut n = 2;
            while !used.insert(id.clone()) {
                id = format!("hw-{}-{slug}_{n}", comp.id);
                n += 1;
            }
            let node = Node::event(id.clone(), BasicEventKind::HardwareFailure)
                .with_label(format!("{}: {mode}", comp.name))
                .with_owner(comp.id.clone(), comp.division.clone());
            self.tree.insert(node, ConstructionStep::HardwareEvent);
            children.push(id);
        }
        let gid = format!("{}-hw", component_gate_id(&comp.id));
        let node = Node::gate(gid.clone(), GateKind::Or, children)
            .with_label(format!("{} hardware failure", comp.name))
            .with_owner(comp.id.clone(), comp.division.clone());
        self.tree.insert(node, ConstructionStep::HardwareBranch);
        Some(gid)
    }

    fn software_branch(&mut self, comp: &Component) -> Option<String> {
        let records = self.internal.get(comp.id.as_str())?.clone();
        if records.is_empty() {
            return None;
        }
        let procedural = comp.kind == ComponentKind::HumanOperator;
        let mut children = Vec::new();
        for rec in records {
            let label = record_label(rec, comp.division.as_deref());
            let (id, kind, step) = if rec.shared_divisions.len() >= 2 {
                let id = format!("ccf-{}", rec.id);
                (id, BasicEventKind::SharedCcf { record: rec.clone(), merged: Vec::new() }, ConstructionStep::SoftwareEvent)
            } else if procedural {
                (format!("proc-{}", rec.id), BasicEventKind::ProceduralFailure { record: rec.clone() }, ConstructionStep::ProceduralEvent)
            } else {
                (format!("sw-{}", rec.id), BasicEventKind::SoftwareInternal { record: rec.clone() }, ConstructionStep::SoftwareEvent)
            };
            let mut node = Node::event(id.clone(), kind).with_label(label);
            if rec.shared_divisions.len() < 2 {
                node = node.with_owner(comp.id.clone(), comp.division.clone());
            }
            self.tree.insert(node, step);
            children.push(id);
        }
        let gid = format!("{}-sw", component_gate_id(&comp.id));
        let what = if procedural { "procedural failure" } else { "software failure" };
        let node = Node::gate(gid.clone(), GateKind::Or, children)
            .with_label(format!("{} {what}", comp.name))
            .with_owner(comp.id.clone(), comp.division.clone());
        self.tree.insert(node, ConstructionStep::SoftwareBranch);
        Some(gid)
    }

    fn dependency_branch(&mut self, comp: &'m Component, base: &str) -> Option<String> {
        let inputs = self.model.feedback_inputs(&comp.id);
        if inputs.is_empty() {
            return None;
        }
        let mut children: Vec<String> = Vec::new();
        let push = |children: &mut Vec<String>, id: String| {
            if !children.contains(&id) {
                children.push(id);
            }
        };
        for sig in inputs {
            let src = sig.source.as_str();
            if self.stack.contains(&src) {
                let rid = format!("ref-{src}");
                if !self.tree.nodes.contains_key(&rid) {
                    let node = Node {
                        id: rid.clone(),
                        label: format!("see {src}"),
                        owner: None,
                        division: None,
                        body: NodeBody::Reference { target: component_gate_id(src) },
                    };
                    self.tree.insert(node, ConstructionStep::LoopReference);
                }
                self.tree.warnings.push(format!("feedback loop through `{src}` cut while expanding `{}`", comp.id));
                push(&mut children, rid);
            } else if let Some(g) = self.expand(src) {
                push(&mut children, g);
            }

            let tx = format!("tx-{}", sig.id);
            if !self.tree.nodes.contains_key(&tx) {
                let what = if sig.description.is_empty() { sig.id.as_str() } else { sig.description.as_str() };
                let src_div = self.model.component(src).and_then(|c| c.division.clone());
                let node = Node::event(tx.clone(), BasicEventKind::TransmissionFailure { signal: sig.id.clone(), record: None })
                    .with_label(format!("Transmission failure: {what}"));
                let node = Node { division: src_div, ..node };
                self.tree.insert(node, ConstructionStep::TransmissionEvent);
            }
            push(&mut children, tx);

            for rec in self.external.get(sig.id.as_str()).cloned().unwrap_or_default() {
                let id = format!("tx-{}-{}", sig.id, rec.id);
                if !self.tree.nodes.contains_key(&id) {
                    let src_div = self.model.component(src).and_then(|c| c.division.clone());
                    let node = Node::event(
                        id.clone(),
                        BasicEventKind::TransmissionFailure { signal: sig.id.clone(), record: Some(rec.clone()) },
                    )
                    .with_label(record_label(rec, src_div.as_deref()));
                    let node = Node { division: src_div, ..node };
                    self.tree.insert(node, ConstructionStep::TransmissionEvent);
                }
                push(&mut children, id);
            }
        }
        let gid = format!("{base}-dep");
        let node = Node::gate(gid.clone(), GateKind::Or, children)
            .with_label(format!("{} dependency failure", comp.name))
            .with_owner(comp.id.clone(), comp.division.clone());
        self.tree.insert(node, ConstructionStep::DependencyBranch);
        Some(gid)
    }
}

/// `Division A HJTC calculators ... (UIF-D)`; without a division just the context and tag.
fn record_label(rec: &UnsafeFlowRecord, division: Option<&str>) -> String {
    let body = if rec.context.is_empty() { rec.owner.as_str() } else { rec.context.as_str() };
    let divisions = if rec.shared_divisions.len() >= 2 {
        Some(rec.shared_divisions.join("&"))
    } else {
        division.map(str::to_string)
    };
    match divisions {
        Some(d) => format!("Division {d} {body} ({})", rec.flavor.tag()),
        None => format!("{body} ({})", rec.flavor.tag()),
    }
}

fn slugify(s: &str) -> String {
    let mut out = String::new();
    for ch in s.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('_') && !out.is_empty() {
            out.push('_');
        }
    }
    while out.ends_with('_') {
        out.pop();
    }
    if out.is_empty() {
        out.push_str("mode");
    }
    out
}

/// Replace software events that are identical across non-diverse divisions
/// with a single shared common-cause event.
///
/// Two events match when their owners share a diversity group, sit in
/// different divisions and their records agree on flavor, type, context and
/// mechanism group. Divisions declared diverse are never merged.
pub fn unify_ccf(tree: &FaultTree, model: &SystemModel) -> FaultTree {
    type Key<'a> = (&'a str, String, &'a str, MechanismGroup);
    let mut groups: BTreeMap<Key, Vec<(&str, &str, &UnsafeFlowRecord)>> = BTreeMap::new();

    for node in tree.nodes.values() {
        let Some(BasicEventKind::SoftwareInternal { record }) = node.basic() else {
            continue;
        };
        let Some(owner) = model.component(&record.owner) else {
            continue;
        };
        let (Some(div), Some(group)) = (owner.division.as_deref(), owner.diversity_group.as_deref()) else {
            continue;
        };
        let flavor = match &record.flavor {
            Flavor::Uca { uca_type, .. } => uca_type.to_string(),
            Flavor::Uif { uif_type, .. } => uif_type.to_string(),
        };
        groups
            .entry((group, flavor, record.context.as_str(), record.mechanism_group))
            .or_default()
            .push((div, node.id.as_str(), record));
    }

    let mut replace: HashMap<String, String> = HashMap::new();
    let mut shared: Vec<Node> = Vec::new();
    for (_, mut members) in groups {
        members.sort_by(|a, b| a.0.cmp(b.0).then(a.1.cmp(b.1)));
        let mut clusters: Vec<Vec<(&str, &str, &UnsafeFlowRecord)>> = Vec::new();
        for m in members {
            let home = clusters
                .iter_mut()
                .find(|c| c.iter().all(|o| o.0 != m.0 && !model.are_diverse(o.0, m.0)));
            match home {
                Some(c) => c.push(m),
                None => clusters.push(vec![m]),
            }
        }
        for c in clusters.into_iter().filter(|c| c.len() >= 2) {
            let ids: Vec<&str> = c.iter().map(|m| m.2.id.as_str()).collect();
            let id = format!("ccf-{}", ids.join("-"));
            let mut record = c[0].2.clone();
            record.id = id.clone();
            record.shared_divisions = c.iter().map(|m| m.0.to_string()).collect();
            let label = record_label(&record, None);
            let merged = ids.iter().map(|s| s.to_string()).collect();
            shared.push(Node::event(id.clone(), BasicEventKind::SharedCcf { record, merged }).with_label(label));
            for m in &c {
                replace.insert(m.1.to_string(), id.clone());
            }
        }
    }

    if replace.is_empty() {
        return tree.clone();
    }
    let mut out = tree.clone();
    for old in replace.keys() {
        out.nodes.remove(old);
        out.provenance.remove(old);
    }
    for node in out.nodes.values_mut() {
        if let NodeBody::Gate { children, .. } = &mut node.body {
            let mut next: Vec<String> = Vec::with_capacity(children.len());
            for c in children.iter() {
                let c = replace.get(c).unwrap_or(c);
                if !next.contains(c) {
                    next.push(c.clone());
                }
            }
            *children = next;
        }
    }
    if let Some(t) = replace.get(&out.top) {
        out.top = t.clone();
    }
    for n in shared {
        out.insert(n, ConstructionStep::CcfUnification);
    }
    out
}

/// Reorganise a component fragment so every dependency item sits beneath
/// every UCA of the component: each UCA becomes an OR gate over the UCA event
/// and the dependency branch's children. Only used to check that both
/// organisations have the same minimal cut sets.
pub fn build_alternative_config(fragment: &FaultTree) -> Result<FaultTree, BuildError> {
    let top = fragment
        .get(&fragment.top)
        .ok_or_else(|| BuildError::NotAGate(fragment.top.clone()))?;
    let NodeBody::Gate { children, .. } = &top.body else {
        return Err(BuildError::NotAGate(fragment.top.clone()));
    };

    let is_uca = |id: &str| {
        fragment
            .get(id)
            .and_then(Node::basic)
            .and_then(BasicEventKind::record)
            .is_some_and(|r| matches!(r.flavor, Flavor::Uca { .. }))
    };
    let step = |id: &str| fragment.provenance.get(id).copied();

    let mut ucas: Vec<String> = Vec::new();
    let mut deps: Vec<String> = Vec::new();
    let mut kept: Vec<String> = Vec::new();
    let mut software_rest: Vec<(String, Vec<String>)> = Vec::new();
    for c in children {
        if is_uca(c) {
            ucas.push(c.clone());
        } else if step(c) == Some(ConstructionStep::SoftwareBranch) {
            let inner = fragment.get(c).map(Node::children).unwrap_or(&[]);
            let (u, rest): (Vec<String>, Vec<String>) = inner.iter().cloned().partition(|x| is_uca(x));
            ucas.extend(u);
            if !rest.is_empty() {
                software_rest.push((c.clone(), rest));
            }
        } else if step(c) == Some(ConstructionStep::DependencyBranch) {
            deps.extend(fragment.get(c).map(Node::children).unwrap_or(&[]).iter().cloned());
        } else {
            kept.push(c.clone());
        }
    }
    if ucas.is_empty() {
        return Err(BuildError::NoUcas(fragment.name.clone()));
    }
    if deps.is_empty() {
        return Ok(fragment.clone());
    }

    let mut out = fragment.clone();
    out.name = format!("{}-alt", fragment.name);
    let mut top_children = kept;
    for (gate, rest) in software_rest {
        if let Some(n) = out.nodes.get_mut(&gate) {
            n.body = NodeBody::Gate { kind: GateKind::Or, children: rest };
        }
        top_children.push(gate);
    }
    for u in &ucas {
        let gid = format!("alt-{u}");
        let mut kids = vec![u.clone()];
        kids.extend(deps.iter().cloned());
        let label = format!("{} caused by internal or dependency failure", fragment.nodes[u].label);
        out.insert(Node::gate(gid.clone(), GateKind::Or, kids).with_label(label), ConstructionStep::AlternativeConfiguration);
        top_children.push(gid);
    }
    let alt_top = format!("alt-{}", fragment.top);
    out.insert(
        Node::gate(alt_top.clone(), GateKind::Or, top_children).with_label(top.label.clone()),
        ConstructionStep::AlternativeConfiguration,
    );
    out.top = alt_top;
    let live = out.descendants(&out.top);
    out.nodes.retain(|id, _| live.contains(id));
    out.provenance.retain(|id, _| live.contains(id));
    Ok(out)
}

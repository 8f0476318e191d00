//! Fault tree representation shared by the builder, the cut-set engines and
//! the exporters.
//!
//! Nodes live in a map keyed by id and gates refer to children by id, so a
//! subtree that is needed in several places is stored once and referenced
//! from every parent. Semantically that is the same as repeating it.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::taxonomy::{Flavor, MechanismGroup, UnsafeFlowRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    And,
    Or,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasicEventKind {
    HardwareFailure,
    SoftwareInternal { record: UnsafeFlowRecord },
    ProceduralFailure { record: UnsafeFlowRecord },
    /// Loss or corruption of a signal in transit. `record` is set when the
    /// analyst declared an explicit external mechanism for the signal.
    TransmissionFailure { signal: String, record: Option<UnsafeFlowRecord> },
    /// One software failure shared by non-diverse divisions. `merged` lists
    /// the per-division record ids it replaced.
    SharedCcf { record: UnsafeFlowRecord, merged: Vec<String> },
}

impl BasicEventKind {
    /// Software-class events: internal software, procedural and shared CCF.
    pub fn is_software_class(&self) -> bool {
        matches!(
            self,
            BasicEventKind::SoftwareInternal { .. }
                | BasicEventKind::ProceduralFailure { .. }
                | BasicEventKind::SharedCcf { .. }
        )
    }

    pub fn record(&self) -> Option<&UnsafeFlowRecord> {
        match self {
            BasicEventKind::HardwareFailure => None,
            BasicEventKind::SoftwareInternal { record }
            | BasicEventKind::ProceduralFailure { record }
            | BasicEventKind::SharedCcf { record, .. } => Some(record),
            BasicEventKind::TransmissionFailure { record, .. } => record.as_ref(),
        }
    }

    pub fn mechanism_group(&self) -> MechanismGroup {
        match self {
            BasicEventKind::TransmissionFailure { .. } => MechanismGroup::Group2External,
            _ => MechanismGroup::Group1Internal,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            BasicEventKind::HardwareFailure => "hardware",
            BasicEventKind::SoftwareInternal { .. } => "software-internal",
            BasicEventKind::ProceduralFailure { .. } => "procedural",
            BasicEventKind::TransmissionFailure { .. } => "transmission",
            BasicEventKind::SharedCcf { .. } => "shared-ccf",
        }
    }

    pub fn is_uif(&self) -> bool {
        self.record().is_some_and(|r| matches!(r.flavor, Flavor::Uif { .. }))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum NodeBody {
    Gate { kind: GateKind, children: Vec<String> },
    Basic { event: BasicEventKind },
    /// Loop-breaking leaf pointing at an ancestor already being expanded.
    /// Evaluates to false: the cycle adds no failure not already covered.
    Reference { target: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Node {
    pub id: String,
    pub label: String,
    pub owner: Option<String>,
    pub division: Option<String>,
    pub body: NodeBody,
}

impl Node {
    pub fn gate(id: impl Into<String>, kind: GateKind, children: Vec<String>) -> Self {
        let id = id.into();
        Node { label: id.clone(), id, owner: None, division: None, body: NodeBody::Gate { kind, children } }
    }

    pub fn event(id: impl Into<String>, event: BasicEventKind) -> Self {
        let id = id.into();
        Node { label: id.clone(), id, owner: None, division: None, body: NodeBody::Basic { event } }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_owner(mut self, owner: impl Into<String>, division: Option<String>) -> Self {
        self.owner = Some(owner.into());
        self.division = division;
        self
    }

    pub fn children(&self) -> &[String] {
        match &self.body {
            NodeBody::Gate { children, .. } => children,
            _ => &[],
        }
    }

    pub fn basic(&self) -> Option<&BasicEventKind> {
        match &self.body {
            NodeBody::Basic { event } => Some(event),
            _ => None,
        }
    }

    pub fn is_gate(&self) -> bool {
        matches!(self.body, NodeBody::Gate { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionStep {
    TopEvent,
    Component,
    HardwareBranch,
    SoftwareBranch,
    DependencyBranch,
    HardwareEvent,
    SoftwareEvent,
    ProceduralEvent,
    TransmissionEvent,
    LoopReference,
    CcfUnification,
    AlternativeConfiguration,
    Imported,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaultTree {
    pub name: String,
    pub top: String,
    pub nodes: BTreeMap<String, Node>,
    pub provenance: BTreeMap<String, ConstructionStep>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("top node `{0}` does not exist")]
    MissingTop(String),
    #[error("gate `{gate}` references missing child `{child}`")]
    DanglingChild { gate: String, child: String },
    #[error("cycle through node `{0}`")]
    Cycle(String),
}

impl FaultTree {
    pub fn new(name: impl Into<String>, top: impl Into<String>) -> Self {
        FaultTree {
            name: name.into(),
            top: top.into(),
            nodes: BTreeMap::new(),
            provenance: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn insert(&mut self, node: Node, step: ConstructionStep) {
        self.provenance.insert(node.id.clone(), step);
        self.nodes.insert(node.id.clone(), node);
    }

    pub fn get(&self, id: &str) -> Option<&Node> {
        self.nodes.get(id)
    }

    /// Check that the top exists, every child resolves and the graph is acyclic.
    pub fn check(&self) -> Result<(), TreeError> {
        if !self.nodes.contains_key(&self.top) {
            return Err(TreeError::MissingTop(self.top.clone()));
        }
        for n in self.nodes.values() {
            for c in n.children() {
                if !self.nodes.contains_key(c) {
                    return Err(TreeError::DanglingChild { gate: n.id.clone(), child: c.clone() });
                }
            }
        }
        self.topological_order().map(|_| ())
    }

    /// Nodes reachable from the top, children before parents.
    pub fn topological_order(&self) -> Result<Vec<&str>, TreeError> {
        let mut order = Vec::new();
        let mut done: HashSet<&str> = HashSet::new();
        let mut active: HashSet<&str> = HashSet::new();
        // (node, next child index)
        let mut stack: Vec<(&str, usize)> = vec![(self.top.as_str(), 0)];
        active.insert(self.top.as_str());
        while let Some((id, idx)) = stack.pop() {
            let node = self.nodes.get(id).ok_or_else(|| TreeError::MissingTop(id.to_string()))?;
            let children = node.children();
            if idx < children.len() {
                stack.push((id, idx + 1));
                let c = children[idx].as_str();
                if done.contains(c) {
                    continue;
                }
                if active.contains(c) {
                    return Err(TreeError::Cycle(c.to_string()));
                }
                if !self.nodes.contains_key(c) {
                    return Err(TreeError::DanglingChild { gate: id.to_string(), child: c.to_string() });
                }
                active.insert(c);
                stack.push((c, 0));
            } else {
                active.remove(id);
                done.insert(id);
                order.push(id);
            }
        }
        Ok(order)
    }

    /// Ids of nodes reachable from `from` (inclusive).
    pub fn descendants(&self, from: &str) -> BTreeSet<String> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![from];
        while let Some(id) = stack.pop() {
            if !seen.insert(id.to_string()) {
                continue;
            }
            if let Some(n) = self.nodes.get(id) {
                stack.extend(n.children().iter().map(String::as_str));
            }
        }
        seen
    }

    /// Basic events reachable from the top, sorted by id.
    pub fn basic_events(&self) -> Vec<&Node> {
        self.descendants(&self.top)
            .iter()
            .filter_map(|id| self.nodes.get(id))
            .filter(|n| n.basic().is_some())
            .collect()
    }

    /// Copy of the subtree rooted at `root`, sharing node ids with this tree.
    pub fn subtree(&self, root: &str) -> FaultTree {
        let mut t = FaultTree::new(format!("{}:{root}", self.name), root);
        for id in self.descendants(root) {
            if let Some(n) = self.nodes.get(&id) {
                t.nodes.insert(id.clone(), n.clone());
                if let Some(p) = self.provenance.get(&id) {
                    t.provenance.insert(id, *p);
                }
            }
        }
        t
    }

    /// Evaluate the tree's boolean function; `failed` holds the ids of
    /// basic events that occurred.
    pub fn evaluate(&self, failed: &HashSet<&str>) -> Result<bool, TreeError> {
        let order = self.topological_order()?;
        let mut value: std::collections::HashMap<&str, bool> = std::collections::HashMap::new();
        for id in order {
            let n = &self.nodes[id];
            let v = match &n.body {
                NodeBody::Basic { .. } => failed.contains(id),
                NodeBody::Reference { .. } => false,
                NodeBody::Gate { kind: GateKind::And, children } => children.iter().all(|c| value[c.as_str()]),
                NodeBody::Gate { kind: GateKind::Or, children } => children.iter().any(|c| value[c.as_str()]),
            };
            value.insert(id, v);
        }
        Ok(value[self.top.as_str()])
    }
}

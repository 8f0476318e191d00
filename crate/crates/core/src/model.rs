//! Domain model of a DI&C architecture: components, signals, control actions,
//! divisions and top events, plus structural validation.
//!
//! A [`SystemModel`] is plain data. Nothing in it is checked on construction;
//! call [`validate`] before handing a model to the tree builder.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::taxonomy::{Flavor, MechanismGroup, UifType, UnsafeFlowRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Sensor,
    IntermediateProcessor,
    Controller,
    HumanOperator,
    Actuator,
    ControlledProcess,
}

impl ComponentKind {
    pub const ALL: [ComponentKind; 6] = [
        ComponentKind::Sensor,
        ComponentKind::IntermediateProcessor,
        ComponentKind::Controller,
        ComponentKind::HumanOperator,
        ComponentKind::Actuator,
        ComponentKind::ControlledProcess,
    ];

    /// Only controllers and human operators have authority over a process.
    pub fn has_control_authority(self) -> bool {
        matches!(self, ComponentKind::Controller | ComponentKind::HumanOperator)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            ComponentKind::Sensor => "sensor",
            ComponentKind::IntermediateProcessor => "intermediate_processor",
            ComponentKind::Controller => "controller",
            ComponentKind::HumanOperator => "human_operator",
            ComponentKind::Actuator => "actuator",
            ComponentKind::ControlledProcess => "controlled_process",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Component {
    pub id: String,
    pub name: String,
    pub kind: ComponentKind,
    pub division: Option<String>,
    /// Components sharing a group are identical implementations.
    pub diversity_group: Option<String>,
    pub has_software: bool,
    pub hardware_failure_modes: Vec<String>,
    pub outputs: Vec<String>,
}

impl Component {
    pub fn new(id: impl Into<String>, kind: ComponentKind) -> Self {
        let id = id.into();
        Self {
            name: id.clone(),
            id,
            kind,
            division: None,
            diversity_group: None,
            has_software: false,
            hardware_failure_modes: Vec::new(),
            outputs: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ControlAction,
    Feedback,
}

impl Direction {
    pub fn keyword(self) -> &'static str {
        match self {
            Direction::ControlAction => "control_action",
            Direction::Feedback => "feedback",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "control_action" => Some(Direction::ControlAction),
            "feedback" => Some(Direction::Feedback),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Continuity {
    Continuous,
    OnDemand,
}

impl Continuity {
    pub fn keyword(self) -> &'static str {
        match self {
            Continuity::Continuous => "continuous",
            Continuity::OnDemand => "on_demand",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "continuous" => Some(Continuity::Continuous),
            "on_demand" => Some(Continuity::OnDemand),
            _ => None,
        }
    }
}

/// One signal is one batch: every variable it carries fails together.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Signal {
    pub id: String,
    pub source: String,
    pub destinations: Vec<String>,
    pub direction: Direction,
    pub continuity: Continuity,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ControlAction {
    pub id: String,
    pub controller: String,
    pub action_name: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Division {
    pub id: String,
    /// Divisions declared design-diverse from this one. Empty means identical
    /// to its peers.
    pub diverse_with: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopEvent {
    pub id: String,
    pub description: String,
    pub hazard_components: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SystemModel {
    pub name: String,
    /// Analyst recommendations carried into the report verbatim.
    pub notes: Vec<String>,
    pub components: Vec<Component>,
    pub signals: Vec<Signal>,
    pub control_actions: Vec<ControlAction>,
    pub divisions: Vec<Division>,
    pub top_events: Vec<TopEvent>,
    pub declared_ucas: Vec<UnsafeFlowRecord>,
    pub declared_uifs: Vec<UnsafeFlowRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
}

impl SystemModel {
    pub fn component(&self, id: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn signal(&self, id: &str) -> Option<&Signal> {
        self.signals.iter().find(|s| s.id == id)
    }

    pub fn control_action(&self, id: &str) -> Option<&ControlAction> {
        self.control_actions.iter().find(|c| c.id == id)
    }

    pub fn division(&self, id: &str) -> Option<&Division> {
        self.divisions.iter().find(|d| d.id == id)
    }

    pub fn top_event(&self, id: &str) -> Option<&TopEvent> {
        self.top_events.iter().find(|t| t.id == id)
    }

    pub fn declared_records(&self) -> impl Iterator<Item = &UnsafeFlowRecord> {
        self.declared_ucas.iter().chain(self.declared_uifs.iter())
    }

    /// Symmetric closure of the declared `diverse_with` lists.
    pub fn are_diverse(&self, a: &str, b: &str) -> bool {
        if a == b {
            return false;
        }
        let lists = |x: &str, y: &str| {
            self.division(x)
                .is_some_and(|d| d.diverse_with.iter().any(|o| o == y))
        };
        lists(a, b) || lists(b, a)
    }

    /// Feedback signals whose source is `id`, in declaration order.
    pub fn feedback_outputs<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Signal> + 'a {
        self.signals
            .iter()
            .filter(move |s| s.source == id && s.direction == Direction::Feedback)
    }

    /// Feedback signals arriving at `id`, sorted by signal id.
    pub fn feedback_inputs(&self, id: &str) -> Vec<&Signal> {
        let mut v: Vec<&Signal> = self
            .signals
            .iter()
            .filter(|s| s.direction == Direction::Feedback && s.destinations.iter().any(|d| d == id))
            .collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    }

    /// Adjacency over feedback signals, source -> sorted, deduplicated destinations.
    pub(crate) fn feedback_graph(&self) -> BTreeMap<&str, BTreeSet<&str>> {
        let mut g: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for s in self.signals.iter().filter(|s| s.direction == Direction::Feedback) {
            let e = g.entry(s.source.as_str()).or_default();
            for d in &s.destinations {
                if *d != s.source {
                    e.insert(d.as_str());
                }
            }
        }
        g
    }
}

/// Components affected by a failure of `component_id`: the component itself
/// plus everything downstream of it on feedback signals. Traversal does not
/// enter controllers or human operators, so the set is the information-system
/// side of a shared-dependency (intra-division) common cause.
pub fn dependency_closure(model: &SystemModel, component_id: &str) -> Result<BTreeSet<String>, ModelError> {
    if model.component(component_id).is_none() {
        return Err(ModelError::UnknownComponent(component_id.to_string()));
    }
    let graph = model.feedback_graph();
    let kinds: HashMap<&str, ComponentKind> = model.components.iter().map(|c| (c.id.as_str(), c.kind)).collect();

    let mut seen = BTreeSet::new();
    seen.insert(component_id.to_string());
    let mut stack = vec![component_id];
    while let Some(cur) = stack.pop() {
        for &next in graph.get(cur).into_iter().flatten() {
            let authority = kinds.get(next).is_some_and(|k| k.has_control_authority());
            if authority || seen.contains(next) {
                continue;
            }
            seen.insert(next.to_string());
            stack.push(next);
        }
    }
    Ok(seen)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    fn error(&mut self, code: &'static str, message: String) {
        self.errors.push(Finding { code, message });
    }

    fn warn(&mut self, code: &'static str, message: String) {
        self.warnings.push(Finding { code, message });
    }
}

/// Check every structural invariant of the model. Never fails; all problems
/// are reported as findings.
pub fn validate(model: &SystemModel) -> ValidationReport {
    let mut r = ValidationReport::default();

    check_unique(&mut r, "division", model.divisions.iter().map(|d| d.id.as_str()));
    check_unique(&mut r, "component", model.components.iter().map(|c| c.id.as_str()));
    check_unique(&mut r, "signal", model.signals.iter().map(|s| s.id.as_str()));
    check_unique(&mut r, "control action", model.control_actions.iter().map(|c| c.id.as_str()));
    check_unique(&mut r, "top event", model.top_events.iter().map(|t| t.id.as_str()));
    check_unique(&mut r, "flow record", model.declared_records().map(|u| u.id.as_str()));

    for d in &model.divisions {
        for other in &d.diverse_with {
            if model.division(other).is_none() {
                r.error("unknown-division", format!("division `{}` is diverse with unknown division `{other}`", d.id));
            } else if *other == d.id {
                r.error("self-diverse", format!("division `{}` lists itself as diverse", d.id));
            }
        }
    }

    for c in &model.components {
        if let Some(div) = &c.division {
            if model.division(div).is_none() {
                r.error("unknown-division", format!("component `{}` references unknown division `{div}`", c.id));
            }
        }
        for out in &c.outputs {
            match model.signal(out) {
                None => r.error("unknown-signal", format!("component `{}` lists unknown output signal `{out}`", c.id)),
                Some(s) if s.source != c.id => r.error(
                    "output-source-mismatch",
                    format!("component `{}` lists output `{out}` whose source is `{}`", c.id, s.source),
                ),
                Some(_) => {}
            }
        }
    }

    for s in &model.signals {
        match model.component(&s.source) {
            None => r.error("unknown-component", format!("signal `{}` has unknown source `{}`", s.id, s.source)),
            Some(src) => {
                if s.direction == Direction::ControlAction && !src.kind.has_control_authority() {
                    r.error(
                        "control-signal-from-non-controller",
                        format!("control-action signal `{}` originates at {} `{}`", s.id, src.kind, src.id),
                    );
                }
            }
        }
        if s.destinations.is_empty() {
            r.error("no-destination", format!("signal `{}` has no destinations", s.id));
        }
        for d in &s.destinations {
            if *d == s.source {
                r.error("self-loop", format!("signal `{}` loops back to its source `{d}`", s.id));
            } else if model.component(d).is_none() {
                r.error("unknown-component", format!("signal `{}` has unknown destination `{d}`", s.id));
            }
        }
    }

    for ca in &model.control_actions {
        match model.component(&ca.controller) {
            None => r.error(
                "unknown-component",
                format!("control action `{}` references unknown controller `{}`", ca.id, ca.controller),
            ),
            Some(c) if !c.kind.has_control_authority() => r.error(
                "control-action-non-controller",
                format!("control action on non-controller: `{}` is owned by {} `{}`", ca.id, c.kind, c.id),
            ),
            Some(_) => {}
        }
        if model.component(&ca.target).is_none() {
            r.error("unknown-component", format!("control action `{}` targets unknown component `{}`", ca.id, ca.target));
        }
    }

    if model.top_events.is_empty() {
        r.error("no-top-event", "model declares no top event".to_string());
    }
    for t in &model.top_events {
        if t.hazard_components.is_empty() {
            r.error("empty-top-event", format!("top event `{}` lists no hazard components", t.id));
        }
        for h in &t.hazard_components {
            if model.component(h).is_none() {
                r.error("unknown-component", format!("top event `{}` references unknown component `{h}`", t.id));
            }
        }
    }

    for rec in model.declared_records() {
        validate_record(model, rec, &mut r);
    }

    feedback_warnings(model, &mut r);
    r
}

fn check_unique<'a>(r: &mut ValidationReport, what: &str, ids: impl Iterator<Item = &'a str>) {
    let mut seen = HashSet::new();
    let mut reported = HashSet::new();
    for id in ids {
        if !seen.insert(id) && reported.insert(id) {
            r.error("duplicate-id", format!("duplicate {what} id `{id}`"));
        }
    }
}

fn validate_record(model: &SystemModel, rec: &UnsafeFlowRecord, r: &mut ValidationReport) {
    let Some(owner) = model.component(&rec.owner) else {
        r.error("unknown-component", format!("flow record `{}` has unknown owner `{}`", rec.id, rec.owner));
        return;
    };
    match &rec.flavor {
        Flavor::Uca { control_action, .. } => {
            if rec.mechanism_group == MechanismGroup::Group2External {
                r.error(
                    "uca-external-mechanism",
                    format!("UCA `{}` is a failure mode; external mechanisms are declared as UIFs", rec.id),
                );
            }
            if !owner.kind.has_control_authority() {
                r.error(
                    "uca-non-controller",
                    format!("UCA `{}` is owned by {} `{}`, which has no control authority", rec.id, owner.kind, owner.id),
                );
            } else if owner.kind == ComponentKind::Controller && !owner.has_software {
                r.error(
                    "uca-without-software",
                    format!("UCA `{}` is owned by controller `{}`, which has no software", rec.id, owner.id),
                );
            }
            match model.control_action(control_action) {
                None => r.error(
                    "unknown-control-action",
                    format!("UCA `{}` references unknown control action `{control_action}`", rec.id),
                ),
                Some(ca) if ca.controller != owner.id => r.error(
                    "uca-owner-mismatch",
                    format!("UCA `{}` is owned by `{}` but control action `{}` belongs to `{}`", rec.id, owner.id, ca.id, ca.controller),
                ),
                Some(_) => {}
            }
        }
        Flavor::Uif { signal, uif_type } => {
            if !owner.has_software {
                r.error(
                    "uif-without-software",
                    format!("UIF `{}` is owned by `{}`, which has no software", rec.id, owner.id),
                );
            }
            match model.signal(signal) {
                None => r.error("unknown-signal", format!("UIF `{}` references unknown signal `{signal}`", rec.id)),
                Some(s) => {
                    if s.source != owner.id {
                        r.error(
                            "uif-owner-mismatch",
                            format!("UIF `{}` is owned by `{}` but signal `{}` originates at `{}`", rec.id, owner.id, s.id, s.source),
                        );
                    }
                    if s.direction != Direction::Feedback {
                        r.error(
                            "uif-on-control-signal",
                            format!("UIF `{}` is declared on control-action signal `{}`", rec.id, s.id),
                        );
                    }
                    if !UifType::applicable(s.continuity).contains(uif_type) {
                        r.warn(
                            "uif-type-continuity",
                            format!("UIF `{}` is {uif_type} on {} signal `{}`", rec.id, s.continuity.keyword().replace('_', "-"), s.id),
                        );
                    }
                }
            }
        }
    }
    for d in &rec.shared_divisions {
        if model.division(d).is_none() {
            r.error("unknown-division", format!("flow record `{}` references unknown division `{d}`", rec.id));
        }
    }
    for t in &rec.top_events {
        if model.top_event(t).is_none() {
            r.error("unknown-top-event", format!("flow record `{}` references unknown top event `{t}`", rec.id));
        }
    }
}

fn feedback_warnings(model: &SystemModel, r: &mut ValidationReport) {
    let graph = model.feedback_graph();
    let kinds: HashMap<&str, ComponentKind> = model.components.iter().map(|c| (c.id.as_str(), c.kind)).collect();

    for c in model.components.iter().filter(|c| c.has_software) {
        if model.feedback_outputs(&c.id).next().is_none() {
            continue;
        }
        let mut seen = HashSet::from([c.id.as_str()]);
        let mut stack = vec![c.id.as_str()];
        let mut found = false;
        while let Some(cur) = stack.pop() {
            for &n in graph.get(cur).into_iter().flatten() {
                if kinds.get(n).is_some_and(|k| k.has_control_authority()) {
                    found = true;
                    break;
                }
                if seen.insert(n) {
                    stack.push(n);
                }
            }
            if found {
                break;
            }
        }
        if !found {
            r.warn(
                "no-consuming-controller",
                format!("UIF modeling pointless: no consuming controller reachable from `{}`", c.id),
            );
        }
    }

    for cycle in feedback_cycles(&graph) {
        r.warn("feedback-cycle", format!("feedback cycle: {}", cycle.join(" -> ")));
    }
}

/// One representative cycle per strongly connected component, reported
/// starting at its smallest id.
fn feedback_cycles(graph: &BTreeMap<&str, BTreeSet<&str>>) -> Vec<Vec<String>> {
    let mut nodes: BTreeSet<&str> = graph.keys().copied().collect();
    for dests in graph.values() {
        nodes.extend(dests.iter().copied());
    }
    let mut reported: HashSet<&str> = HashSet::new();
    let mut out = Vec::new();
    for &start in &nodes {
        if reported.contains(start) {
            continue;
        }
        if let Some(path) = cycle_through(graph, start) {
            reported.extend(path.iter().copied());
            let mut names: Vec<String> = path.iter().map(|s| s.to_string()).collect();
            names.push(start.to_string());
            out.push(names);
        }
    }
    out
}

/// Shortest cycle returning to `start`, found breadth-first.
fn cycle_through<'a>(graph: &BTreeMap<&'a str, BTreeSet<&'a str>>, start: &'a str) -> Option<Vec<&'a str>> {
    let mut parent: HashMap<&str, &str> = HashMap::new();
    let mut queue = std::collections::VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        for &n in graph.get(cur).into_iter().flatten() {
            if n == start {
                let mut path = vec![cur];
                let mut p = cur;
                while p != start {
                    p = parent[p];
                    path.push(p);
                }
                path.reverse();
                return Some(path);
            }
            if n != start && !parent.contains_key(n) {
                parent.insert(n, cur);
                queue.push_back(n);
            }
        }
    }
    None
}

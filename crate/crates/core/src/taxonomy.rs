//! Unsafe control action (UCA) and unsafe information flow (UIF) taxonomy:
//! the four failure types of each, candidate generation, and tracing of a
//! UIF to the controller that consumes it.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{Continuity, Direction, SystemModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum UcaType {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum UifType {
    A,
    B,
    C,
    D,
}

impl UcaType {
    pub const ALL: [UcaType; 4] = [UcaType::A, UcaType::B, UcaType::C, UcaType::D];

    pub fn description(self) -> &'static str {
        match self {
            UcaType::A => "Control action not provided causing hazard.",
            UcaType::B => "Control action provided causing hazard.",
            UcaType::C => "Control action is early, late, or out-of-order.",
            UcaType::D => "Control action is stopped too soon or applied too long.",
        }
    }

    pub fn letter(self) -> char {
        match self {
            UcaType::A => 'A',
            UcaType::B => 'B',
            UcaType::C => 'C',
            UcaType::D => 'D',
        }
    }

    pub fn from_letter(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| s.len() == 1 && s.starts_with(t.letter()))
    }
}

impl UifType {
    pub const ALL: [UifType; 4] = [UifType::A, UifType::B, UifType::C, UifType::D];

    pub fn description(self) -> &'static str {
        match self {
            UifType::A => "Feedback is missing when needed causing hazard.",
            UifType::B => "Feedback is provided when not needed causing hazard.",
            UifType::C => "Feedback is early, late, out-of-sync, or out-of-order.",
            UifType::D => "Feedback value is too low, too high, NaN, or Inf.",
        }
    }

    pub fn letter(self) -> char {
        match self {
            UifType::A => 'A',
            UifType::B => 'B',
            UifType::C => 'C',
            UifType::D => 'D',
        }
    }

    pub fn from_letter(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| s.len() == 1 && s.starts_with(t.letter()))
    }

    /// Types that apply to a feedback signal of the given continuity.
    /// Spurious delivery (B) only makes sense for sporadic signals; timing
    /// and value faults (C, D) only for continuous state streams.
    pub fn applicable(continuity: Continuity) -> &'static [UifType] {
        match continuity {
            Continuity::Continuous => &[UifType::A, UifType::C, UifType::D],
            Continuity::OnDemand => &[UifType::A, UifType::B],
        }
    }
}

impl fmt::Display for UcaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UCA-{}", self.letter())
    }
}

impl fmt::Display for UifType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UIF-{}", self.letter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MechanismGroup {
    /// Control algorithm, process model, design or implementation defects and
    /// platform hardware faults of the component itself.
    Group1Internal,
    /// Transmission infrastructure and dependent-device failures.
    Group2External,
}

impl MechanismGroup {
    pub fn keyword(self) -> &'static str {
        match self {
            MechanismGroup::Group1Internal => "group1",
            MechanismGroup::Group2External => "group2",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "group1" => Some(MechanismGroup::Group1Internal),
            "group2" => Some(MechanismGroup::Group2External),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "flavor", rename_all = "snake_case")]
pub enum Flavor {
    Uca { control_action: String, uca_type: UcaType },
    Uif { signal: String, uif_type: UifType },
}

impl Flavor {
    /// Short tag such as `UIF-D`.
    pub fn tag(&self) -> String {
        match self {
            Flavor::Uca { uca_type, .. } => uca_type.to_string(),
            Flavor::Uif { uif_type, .. } => uif_type.to_string(),
        }
    }

    pub fn is_uif(&self) -> bool {
        matches!(self, Flavor::Uif { .. })
    }
}

/// An analyst-declared UCA or UIF.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct UnsafeFlowRecord {
    pub id: String,
    pub owner: String,
    pub flavor: Flavor,
    pub context: String,
    pub mechanism_group: MechanismGroup,
    /// Two or more entries mark an event unified across divisions.
    pub shared_divisions: Vec<String>,
    /// Top events this record is relevant to. Empty means every top event.
    pub top_events: Vec<String>,
}

impl UnsafeFlowRecord {
    pub fn relevant_to(&self, top_event: &str) -> bool {
        self.top_events.is_empty() || self.top_events.iter().any(|t| t == top_event)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaxonomyError {
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("`{0}` is not a controller or human operator")]
    NotAController(String),
    #[error("record `{0}` is a UCA; only UIFs are traced")]
    NotAUif(String),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CandidateOptions {
    /// Emit all four UIF types regardless of signal continuity.
    pub allow_all_uif_types: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UifCandidate {
    pub owner: String,
    pub signal: String,
    pub uif_type: UifType,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UcaCandidate {
    pub controller: String,
    pub control_action: String,
    pub uca_type: UcaType,
    pub description: String,
}

pub fn candidate_uifs(
    model: &SystemModel,
    component_id: &str,
    opts: CandidateOptions,
) -> Result<Vec<UifCandidate>, TaxonomyError> {
    let comp = model
        .component(component_id)
        .ok_or_else(|| TaxonomyError::UnknownComponent(component_id.to_string()))?;
    if !comp.has_software {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for s in model.feedback_outputs(component_id) {
        let types: &[UifType] = if opts.allow_all_uif_types {
            &UifType::ALL
        } else {
            UifType::applicable(s.continuity)
        };
        let what = if s.description.is_empty() { s.id.as_str() } else { s.description.as_str() };
        for &t in types {
            let description = match t {
                UifType::A => format!("{} does not provide {what} when needed", comp.name),
                UifType::B => format!("{} provides {what} when not needed", comp.name),
                UifType::C => format!("{} provides {what} early, late, out of sync, or out of order", comp.name),
                UifType::D => format!("{} provides {what} too low, too high, NaN, or Inf", comp.name),
            };
            out.push(UifCandidate {
                owner: comp.id.clone(),
                signal: s.id.clone(),
                uif_type: t,
                description,
            });
        }
    }
    Ok(out)
}

pub fn candidate_ucas(model: &SystemModel, controller_id: &str) -> Result<Vec<UcaCandidate>, TaxonomyError> {
    let comp = model
        .component(controller_id)
        .ok_or_else(|| TaxonomyError::UnknownComponent(controller_id.to_string()))?;
    if !comp.kind.has_control_authority() {
        return Err(TaxonomyError::NotAController(controller_id.to_string()));
    }
    let mut out = Vec::new();
    for ca in model.control_actions.iter().filter(|ca| ca.controller == comp.id) {
        let act = &ca.action_name;
        for t in UcaType::ALL {
            let description = match t {
                UcaType::A => format!("{} does not provide {act} when needed", comp.name),
                UcaType::B => format!("{} provides {act} when it causes a hazard", comp.name),
                UcaType::C => format!("{} provides {act} too early, too late, or out of order", comp.name),
                UcaType::D => format!("{} stops {act} too soon or applies it too long", comp.name),
            };
            out.push(UcaCandidate {
                controller: comp.id.clone(),
                control_action: ca.id.clone(),
                uca_type: t,
                description,
            });
        }
    }
    Ok(out)
}

/// Every simple feedback path from the UIF's owner to a consuming controller
/// or human operator. An empty result means the UIF cannot influence any
/// control action.
pub fn trace_uif(model: &SystemModel, uif: &UnsafeFlowRecord) -> Result<Vec<Vec<String>>, TaxonomyError> {
    let Flavor::Uif { signal, .. } = &uif.flavor else {
        return Err(TaxonomyError::NotAUif(uif.id.clone()));
    };
    if model.component(&uif.owner).is_none() {
        return Err(TaxonomyError::UnknownComponent(uif.owner.clone()));
    }
    let graph = model.feedback_graph();
    let authority: HashMap<&str, bool> = model
        .components
        .iter()
        .map(|c| (c.id.as_str(), c.kind.has_control_authority()))
        .collect();

    // The first hop is along the declared signal only.
    let first: Vec<&str> = match model.signal(signal) {
        Some(s) if s.direction == Direction::Feedback && s.source == uif.owner => {
            let mut d: Vec<&str> = s.destinations.iter().map(String::as_str).filter(|d| *d != uif.owner).collect();
            d.sort_unstable();
            d.dedup();
            d
        }
        _ => Vec::new(),
    };

    let mut paths = Vec::new();
    let mut path = vec![uif.owner.as_str()];
    for next in first {
        walk(next, &graph, &authority, &mut path, &mut paths);
    }
    Ok(paths)
}

fn walk<'a>(
    node: &'a str,
    graph: &std::collections::BTreeMap<&'a str, std::collections::BTreeSet<&'a str>>,
    authority: &HashMap<&str, bool>,
    path: &mut Vec<&'a str>,
    out: &mut Vec<Vec<String>>,
) {
    if path.contains(&node) {
        return;
    }
    path.push(node);
    if authority.get(node).copied().unwrap_or(false) {
        out.push(path.iter().map(|s| s.to_string()).collect());
    } else {
        for &n in graph.get(node).into_iter().flatten() {
            walk(n, graph, authority, path, out);
        }
    }
    path.pop();
}

/// Does the component sit on a feedback path (emits at least one feedback signal)?
pub fn on_feedback_path(model: &SystemModel, component_id: &str) -> bool {
    model.feedback_outputs(component_id).next().is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Component, ComponentKind, ControlAction, Signal};

    fn model() -> SystemModel {
        let mut sensor = Component::new("sensor", ComponentKind::Sensor);
        sensor.name = "Analog sensor".into();
        let mut smart = Component::new("smart", ComponentKind::Sensor);
        smart.has_software = true;
        let mut alarm = Component::new("alarm", ComponentKind::IntermediateProcessor);
        alarm.has_software = true;
        alarm.name = "Alarm".into();
        let mut ctl = Component::new("ctl", ComponentKind::Controller);
        ctl.has_software = true;
        ctl.name = "Pressurizer controller".into();
        let idle = Component { has_software: true, ..Component::new("idle", ComponentKind::Controller) };
        let sig = |id: &str, src: &str, dst: &str, c| Signal {
            id: id.into(),
            source: src.into(),
            destinations: vec![dst.into()],
            direction: Direction::Feedback,
            continuity: c,
            description: String::new(),
        };
        SystemModel {
            name: "t".into(),
            components: vec![sensor, smart, alarm, ctl, idle, Component::new("valve", ComponentKind::Actuator)],
            signals: vec![
                sig("raw", "sensor", "smart", Continuity::Continuous),
                sig("data", "smart", "alarm", Continuity::Continuous),
                sig("alert", "alarm", "ctl", Continuity::OnDemand),
            ],
            control_actions: vec![ControlAction {
                id: "spray_on".into(),
                controller: "ctl".into(),
                action_name: "the SPRAY ON control signal".into(),
                target: "valve".into(),
            }],
            ..Default::default()
        }
    }

    fn uif(owner: &str, signal: &str) -> UnsafeFlowRecord {
        UnsafeFlowRecord {
            id: format!("{owner}_uif"),
            owner: owner.into(),
            flavor: Flavor::Uif { signal: signal.into(), uif_type: UifType::A },
            context: String::new(),
            mechanism_group: MechanismGroup::Group1Internal,
            shared_divisions: vec![],
            top_events: vec![],
        }
    }

    #[test]
    fn uif_types_follow_continuity() {
        let m = model();
        let types = |id| -> Vec<UifType> {
            candidate_uifs(&m, id, CandidateOptions::default()).unwrap().iter().map(|c| c.uif_type).collect()
        };
        assert_eq!(types("smart"), vec![UifType::A, UifType::C, UifType::D]);
        assert_eq!(types("alarm"), vec![UifType::A, UifType::B]);
        assert!(types("sensor").is_empty());
        let all = candidate_uifs(&m, "alarm", CandidateOptions { allow_all_uif_types: true }).unwrap();
        assert_eq!(all.len(), 4);
        assert!(matches!(candidate_uifs(&m, "nope", CandidateOptions::default()), Err(TaxonomyError::UnknownComponent(_))));
    }

    #[test]
    fn uca_candidates() {
        let m = model();
        let c = candidate_ucas(&m, "ctl").unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c[0].uca_type, UcaType::A);
        assert!(c[0].description.contains("does not provide the SPRAY ON control signal"));
        assert!(candidate_ucas(&m, "idle").unwrap().is_empty());
        assert_eq!(candidate_ucas(&m, "alarm"), Err(TaxonomyError::NotAController("alarm".into())));
    }

    #[test]
    fn traces_end_at_controller() {
        let m = model();
        let p = trace_uif(&m, &uif("smart", "data")).unwrap();
        assert_eq!(p, vec![vec!["smart".to_string(), "alarm".into(), "ctl".into()]]);
        assert_eq!(trace_uif(&m, &uif("alarm", "alert")).unwrap(), vec![vec!["alarm".to_string(), "ctl".into()]]);
        // ctl emits no feedback
        assert!(trace_uif(&m, &uif("ctl", "missing")).unwrap().is_empty());
    }

    #[test]
    fn tracing_a_uca_is_an_error() {
        let m = model();
        let mut r = uif("ctl", "x");
        r.flavor = Flavor::Uca { control_action: "spray_on".into(), uca_type: UcaType::A };
        assert_eq!(trace_uif(&m, &r), Err(TaxonomyError::NotAUif(r.id.clone())));
    }

    #[test]
    fn table_descriptions() {
        assert_eq!(UcaType::A.description(), "Control action not provided causing hazard.");
        assert_eq!(UifType::A.description(), "Feedback is missing when needed causing hazard.");
        assert_eq!(UifType::D.to_string(), "UIF-D");
        assert_eq!(UifType::from_letter("C"), Some(UifType::C));
        assert_eq!(UifType::from_letter("CC"), None);
    }
}

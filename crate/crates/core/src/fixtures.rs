//! Bundled example models and the canonical two-UCA, two-UIF fragment.

use crate::model::SystemModel;
use crate::taxonomy::{Flavor, MechanismGroup, UcaType, UifType, UnsafeFlowRecord};
use crate::tree::{BasicEventKind, ConstructionStep, FaultTree, GateKind, Node};

pub const PRESSURIZER: &str = include_str!("../examples/pressurizer.dicm");
pub const VCU_SENSOR: &str = include_str!("../examples/vcu_sensor.dicm");
pub const QIASP_HSI: &str = include_str!("../examples/qiasp_hsi.dicm");

/// `(file name, text)` of every bundled example.
pub const ALL: [(&str, &str); 3] = [
    ("pressurizer.dicm", PRESSURIZER),
    ("vcu_sensor.dicm", VCU_SENSOR),
    ("qiasp_hsi.dicm", QIASP_HSI),
];

fn load(name: &str, text: &str) -> SystemModel {
    crate::parser::parse_named(name, text).unwrap_or_else(|e| panic!("bundled {name} does not parse: {}", e[0]))
}

pub fn pressurizer() -> SystemModel {
    load("pressurizer.dicm", PRESSURIZER)
}

pub fn vcu_sensor() -> SystemModel {
    load("vcu_sensor.dicm", VCU_SENSOR)
}

pub fn qiasp_hsi() -> SystemModel {
    load("qiasp_hsi.dicm", QIASP_HSI)
}

/// One controller's fragment: a software branch holding its UCAs and a
/// dependency branch holding the UIFs of the device it depends on.
pub fn controller_fragment(ucas: &[UcaType], uifs: &[UifType]) -> FaultTree {
    let record = |id: String, flavor| UnsafeFlowRecord {
        id,
        owner: "controller".into(),
        flavor,
        context: String::new(),
        mechanism_group: MechanismGroup::Group1Internal,
        shared_divisions: Vec::new(),
        top_events: Vec::new(),
    };
    let mut t = FaultTree::new("fragment", "g-controller");
    let mut sw = Vec::new();
    for (i, &u) in ucas.iter().enumerate() {
        let id = format!("sw-uca_{}{i}", u.letter().to_ascii_lowercase());
        let rec = record(id.clone(), Flavor::Uca { control_action: "act".into(), uca_type: u });
        sw.push(id.clone());
        t.insert(
            Node::event(id, BasicEventKind::SoftwareInternal { record: rec }).with_label(u.to_string()),
            ConstructionStep::SoftwareEvent,
        );
    }
    let mut dep = Vec::new();
    for (i, &u) in uifs.iter().enumerate() {
        let id = format!("sw-uif_{}{i}", u.letter().to_ascii_lowercase());
        let mut rec = record(id.clone(), Flavor::Uif { signal: "feedback".into(), uif_type: u });
        rec.owner = "device".into();
        dep.push(id.clone());
        t.insert(
            Node::event(id, BasicEventKind::SoftwareInternal { record: rec }).with_label(u.to_string()),
            ConstructionStep::SoftwareEvent,
        );
    }
    let mut top = Vec::new();
    if !sw.is_empty() {
        t.insert(Node::gate("g-controller-sw", GateKind::Or, sw), ConstructionStep::SoftwareBranch);
        top.push("g-controller-sw".to_string());
    }
    if !dep.is_empty() {
        t.insert(Node::gate("g-controller-dep", GateKind::Or, dep), ConstructionStep::DependencyBranch);
        top.push("g-controller-dep".to_string());
    }
    t.insert(Node::gate("g-controller", GateKind::Or, top), ConstructionStep::Component);
    t
}

/// The {UCA-A, UCA-B} x {UIF-A, UIF-B} fragment.
pub fn canonical_fragment() -> FaultTree {
    controller_fragment(&[UcaType::A, UcaType::B], &[UifType::A, UifType::B])
}

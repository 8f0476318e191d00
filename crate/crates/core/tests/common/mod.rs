//! Random trees and models shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use resha_core::model::{Continuity, ControlAction, Direction, Division, Signal, TopEvent};
use resha_core::taxonomy::{Flavor, MechanismGroup};
use resha_core::tree::{ConstructionStep, Node, NodeBody};
use resha_core::{BasicEventKind, Component, ComponentKind, FaultTree, GateKind, SystemModel, UcaType, UifType, UnsafeFlowRecord};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn record(id: &str, owner: &str, flavor: Flavor) -> UnsafeFlowRecord {
    UnsafeFlowRecord {
        id: id.into(),
        owner: owner.into(),
        flavor,
        context: String::new(),
        mechanism_group: MechanismGroup::Group1Internal,
        shared_divisions: Vec::new(),
        top_events: Vec::new(),
    }
}

fn random_event(rng: &mut StdRng, id: &str) -> BasicEventKind {
    let uif = Flavor::Uif { signal: "s".into(), uif_type: UifType::D };
    match rng.gen_range(0..5) {
        0 | 1 => BasicEventKind::HardwareFailure,
        2 => BasicEventKind::SoftwareInternal { record: record(id, "c", uif) },
        3 => BasicEventKind::TransmissionFailure { signal: "s".into(), record: None },
        _ => BasicEventKind::SharedCcf { record: record(id, "c", uif), merged: vec![] },
    }
}

/// A random DAG-shaped tree with at most `max_events` basic events and at
/// most `max_depth` levels. Events and gates are shared between parents, and
/// a few loop-reference leaves are mixed in.
pub fn random_tree(rng: &mut StdRng, max_events: usize, max_depth: usize) -> FaultTree {
    let n = rng.gen_range(1..=max_events);
    let mut t = FaultTree::new("random", "top");
    let events: Vec<String> = (0..n).map(|i| format!("e{i:02}")).collect();
    for e in &events {
        let kind = random_event(rng, e);
        t.insert(Node::event(e.clone(), kind), ConstructionStep::Imported);
    }
    let mut gates: Vec<(String, usize)> = Vec::new();
    let mut counter = 0;
    let top = gen_gate(rng, &mut t, &events, &mut gates, &mut counter, 1, max_depth);
    t.top = top;
    t
}

fn gen_gate(
    rng: &mut StdRng,
    t: &mut FaultTree,
    events: &[String],
    gates: &mut Vec<(String, usize)>,
    counter: &mut usize,
    depth: usize,
    max_depth: usize,
) -> String {
    let id = if depth == 1 { "top".to_string() } else { format!("g{counter}") };
    *counter += 1;
    let arity = rng.gen_range(1..=4);
    let mut children = Vec::new();
    for _ in 0..arity {
        let roll: f64 = rng.gen();
        let child = if depth + 1 >= max_depth || roll < 0.45 {
            events.choose(rng).unwrap().clone()
        } else if roll < 0.5 {
            let rid = format!("ref{counter}");
            *counter += 1;
            t.insert(
                Node { id: rid.clone(), label: rid.clone(), owner: None, division: None, body: NodeBody::Reference { target: "top".into() } },
                ConstructionStep::LoopReference,
            );
            rid
        } else if roll < 0.6 && !gates.is_empty() {
            // reuse a gate whose subtree still fits under this depth
            let fits: Vec<&(String, usize)> = gates.iter().filter(|(_, h)| depth + h <= max_depth).collect();
            match fits.choose(rng) {
                Some((g, _)) => g.clone(),
                None => events.choose(rng).unwrap().clone(),
            }
        } else {
            gen_gate(rng, t, events, gates, counter, depth + 1, max_depth)
        };
        children.push(child);
    }
    let kind = if rng.gen_bool(0.5) { GateKind::And } else { GateKind::Or };
    let height = children
        .iter()
        .map(|c| gates.iter().find(|(g, _)| g == c).map(|(_, h)| *h).unwrap_or(1))
        .max()
        .unwrap_or(1)
        + 1;
    t.insert(Node::gate(id.clone(), kind, children), ConstructionStep::Imported);
    gates.push((id.clone(), height));
    id
}

/// Nesting depth of the tree, counting the top as level 1.
pub fn depth(t: &FaultTree) -> usize {
    fn go(t: &FaultTree, id: &str) -> usize {
        1 + t.nodes[id].children().iter().map(|c| go(t, c)).max().unwrap_or(0)
    }
    go(t, &t.top)
}

const TEXT_PIECES: [&str; 10] = ["pressure", " ", "\"quoted\"", "back\\slash", "é", "#", "{x}", "\n", "tab\t", "low"];

pub fn random_text(rng: &mut StdRng) -> String {
    (0..rng.gen_range(1..5)).map(|_| *TEXT_PIECES.choose(rng).unwrap()).collect()
}

/// A random model that passes validation. Components are layered so that
/// feedback flows from sensors through processors towards controllers;
/// `cyclic` adds a few backward feedback edges between processors.
pub fn random_model(rng: &mut StdRng, cyclic: bool) -> SystemModel {
    let mut m = SystemModel { name: random_text(rng), ..Default::default() };
    let two_divisions = rng.gen_bool(0.4);
    if two_divisions {
        let diverse = rng.gen_bool(0.3);
        m.divisions.push(Division { id: "A".into(), diverse_with: if diverse { vec!["B".into()] } else { vec![] } });
        m.divisions.push(Division { id: "B".into(), diverse_with: vec![] });
    }

    let n_sensors = rng.gen_range(1..=3);
    let n_procs = rng.gen_range(0..=4);
    let n_ctrl = rng.gen_range(0..=2);
    let mut layers: Vec<Vec<String>> = vec![Vec::new(); 4];
    let mut push = |m: &mut SystemModel, layer: usize, id: String, kind: ComponentKind, sw: bool, rng: &mut StdRng| {
        let mut c = Component::new(id.clone(), kind);
        c.name = random_text(rng);
        c.has_software = sw;
        c.hardware_failure_modes = (0..rng.gen_range(0..3)).map(|i| format!("mode {i} {}", random_text(rng))).collect();
        if two_divisions {
            c.division = Some(if rng.gen_bool(0.5) { "A" } else { "B" }.to_string());
            c.diversity_group = Some(format!("grp{}", rng.gen_range(0..2)));
        }
        m.components.push(c);
        layers[layer].push(id);
    };
    for i in 0..n_sensors {
        let sw = rng.gen_bool(0.5);
        push(&mut m, 0, format!("sensor{i}"), ComponentKind::Sensor, sw, rng);
    }
    for i in 0..n_procs {
        let sw = rng.gen_bool(0.8);
        push(&mut m, 1, format!("proc{i}"), ComponentKind::IntermediateProcessor, sw, rng);
    }
    for i in 0..n_ctrl {
        let (kind, sw) = if rng.gen_bool(0.3) {
            (ComponentKind::HumanOperator, false)
        } else {
            (ComponentKind::Controller, rng.gen_bool(0.9))
        };
        push(&mut m, 2, format!("ctrl{i}"), kind, sw, rng);
    }
    push(&mut m, 3, "plant".into(), ComponentKind::Actuator, false, rng);

    // feedback signals: each non-controller emits one signal to 1-2 later components
    let mut sig_n = 0;
    for layer in 0..2 {
        for src in layers[layer].clone() {
            let later: Vec<String> = layers[layer + 1..3].iter().flatten().cloned().collect();
            if later.is_empty() || rng.gen_bool(0.1) {
                continue;
            }
            let k = rng.gen_range(1..=later.len().min(2));
            let mut dst: Vec<String> = later.choose_multiple(rng, k).cloned().collect();
            dst.sort();
            let id = format!("sig{sig_n}");
            sig_n += 1;
            m.signals.push(Signal {
                id: id.clone(),
                source: src.clone(),
                destinations: dst,
                direction: Direction::Feedback,
                continuity: if rng.gen_bool(0.3) { Continuity::OnDemand } else { Continuity::Continuous },
                description: random_text(rng),
            });
            m.components.iter_mut().find(|c| c.id == src).unwrap().outputs.push(id);
        }
    }
    if cyclic && layers[1].len() >= 2 {
        let (a, b) = (layers[1][1].clone(), layers[1][0].clone());
        let id = format!("sig{sig_n}");
        m.signals.push(Signal {
            id: id.clone(),
            source: a.clone(),
            destinations: vec![b],
            direction: Direction::Feedback,
            continuity: Continuity::Continuous,
            description: String::new(),
        });
        m.components.iter_mut().find(|c| c.id == a).unwrap().outputs.push(id);
    }

    // control actions
    for (i, ctrl) in layers[2].clone().into_iter().enumerate() {
        let id = format!("cmd{i}");
        m.signals.push(Signal {
            id: id.clone(),
            source: ctrl.clone(),
            destinations: vec!["plant".into()],
            direction: Direction::ControlAction,
            continuity: Continuity::OnDemand,
            description: String::new(),
        });
        m.components.iter_mut().find(|c| c.id == ctrl).unwrap().outputs.push(id);
        m.control_actions.push(ControlAction {
            id: format!("act{i}"),
            controller: ctrl.clone(),
            action_name: random_text(rng),
            target: "plant".into(),
        });
    }

    // declared records, only of types applicable to the signal
    let mut rec_n = 0;
    for s in m.signals.clone().iter().filter(|s| s.direction == Direction::Feedback) {
        let owner = m.component(&s.source).unwrap().clone();
        if !owner.has_software || !rng.gen_bool(0.7) {
            continue;
        }
        let t = *UifType::applicable(s.continuity).choose(rng).unwrap();
        let mut r = record(&format!("uif{rec_n}"), &owner.id, Flavor::Uif { signal: s.id.clone(), uif_type: t });
        rec_n += 1;
        r.context = random_text(rng);
        if rng.gen_bool(0.15) {
            r.mechanism_group = MechanismGroup::Group2External;
        }
        m.declared_uifs.push(r);
    }
    for ca in m.control_actions.clone() {
        let owner = m.component(&ca.controller).unwrap().clone();
        if owner.kind == ComponentKind::Controller && !owner.has_software {
            continue;
        }
        for t in UcaType::ALL {
            if rng.gen_bool(0.4) {
                let mut r = record(&format!("uca{rec_n}"), &owner.id, Flavor::Uca { control_action: ca.id.clone(), uca_type: t });
                rec_n += 1;
                r.context = random_text(rng);
                m.declared_ucas.push(r);
            }
        }
    }

    let candidates: Vec<String> = layers[2].iter().chain(layers[3].iter()).cloned().collect();
    let k = rng.gen_range(1..=candidates.len().min(2));
    let mut hazard: Vec<String> = candidates.choose_multiple(rng, k).cloned().collect();
    hazard.sort();
    m.top_events.push(TopEvent { id: "loss".into(), description: random_text(rng), hazard_components: hazard });
    m
}

/// `tree` with every non-software leaf replaced by a false reference, so its
/// minimal cut sets are exactly the all-software cut sets of `tree`.
pub fn software_restriction(tree: &FaultTree) -> FaultTree {
    let mut out = tree.clone();
    for node in out.nodes.values_mut() {
        if let NodeBody::Basic { event } = &node.body {
            if !event.is_software_class() {
                node.body = NodeBody::Reference { target: String::new() };
            }
        }
    }
    out
}

/// Ids of events set to true by a random assignment with probability `p`.
pub fn random_assignment<'a>(rng: &mut StdRng, events: &'a [String], p: f64) -> HashSet<&'a str> {
    events.iter().filter(|_| rng.gen_bool(p)).map(String::as_str).collect()
}

use std::fmt::Write;

use crate::model::SystemModel;
use crate::taxonomy::{Flavor, UnsafeFlowRecord};

/// Canonical text for a model. `parse(&serialize(m))` yields `m` again, and
/// serializing that result gives the same bytes.
pub fn serialize(model: &SystemModel) -> String {
    let mut w = Writer::default();
    w.open("system", &quote(&model.name));
    w.strings("notes", &model.notes);
    w.close();

    for d in &model.divisions {
        w.open("division", &d.id);
        w.idents("diverse_with", &d.diverse_with);
        w.close();
    }
    for c in &model.components {
        w.open("component", &c.id);
        w.field("name", &quote(&c.name));
        w.field("kind", c.kind.keyword());
        if let Some(d) = &c.division {
            w.field("division", d);
        }
        if let Some(g) = &c.diversity_group {
            w.field("diversity_group", g);
        }
        w.field("has_software", if c.has_software { "true" } else { "false" });
        w.strings("hardware_failure_modes", &c.hardware_failure_modes);
        w.idents("outputs", &c.outputs);
        w.close();
    }
    for s in &model.signals {
        w.open("signal", &s.id);
        w.field("source", &s.source);
        w.field("destinations", &list(s.destinations.iter().map(String::as_str)));
        w.field("direction", s.direction.keyword());
        w.field("continuity", s.continuity.keyword());
        if !s.description.is_empty() {
            w.field("description", &quote(&s.description));
        }
        w.close();
    }
    for ca in &model.control_actions {
        w.open("control_action", &ca.id);
        w.field("controller", &ca.controller);
        w.field("action_name", &quote(&ca.action_name));
        w.field("target", &ca.target);
        w.close();
    }
    for t in &model.top_events {
        w.open("top_event", &t.id);
        w.field("description", &quote(&t.description));
        w.field("hazard_components", &list(t.hazard_components.iter().map(String::as_str)));
        w.close();
    }
    for r in &model.declared_ucas {
        w.record("uca", r);
    }
    for r in &model.declared_uifs {
        w.record("uif", r);
    }
    w.out
}

#[derive(Default)]
struct Writer {
    out: String,
}

impl Writer {
    fn open(&mut self, keyword: &str, name: &str) {
        if !self.out.is_empty() {
            self.out.push('\n');
        }
        let _ = writeln!(self.out, "{keyword} {name} {{");
    }

    fn close(&mut self) {
        self.out.push_str("}\n");
    }

    fn field(&mut self, key: &str, value: &str) {
        let _ = writeln!(self.out, "  {key}: {value}");
    }

    fn idents(&mut self, key: &str, items: &[String]) {
        if !items.is_empty() {
            self.field(key, &list(items.iter().map(String::as_str)));
        }
    }

    fn strings(&mut self, key: &str, items: &[String]) {
        if !items.is_empty() {
            let quoted: Vec<String> = items.iter().map(|s| quote(s)).collect();
            self.field(key, &list(quoted.iter().map(String::as_str)));
        }
    }

    fn record(&mut self, keyword: &str, r: &UnsafeFlowRecord) {
        self.open(keyword, &r.id);
        self.field("owner", &r.owner);
        match &r.flavor {
            Flavor::Uca { control_action, uca_type } => {
                self.field("control_action", control_action);
                self.field("type", &uca_type.letter().to_string());
            }
            Flavor::Uif { signal, uif_type } => {
                self.field("signal", signal);
                self.field("type", &uif_type.letter().to_string());
            }
        }
        if !r.context.is_empty() {
            self.field("context", &quote(&r.context));
        }
        self.field("mechanism", r.mechanism_group.keyword());
        self.idents("shared_divisions", &r.shared_divisions);
        self.idents("top_events", &r.top_events);
        self.close();
    }
}

fn list<'a>(items: impl Iterator<Item = &'a str>) -> String {
    format!("[{}]", items.collect::<Vec<_>>().join(", "))
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{{{:x}}}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

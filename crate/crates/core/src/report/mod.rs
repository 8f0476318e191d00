//! Analysis reports and machine-readable exports.
//!
//! [`AnalysisReport`] is the structured result of [`crate::analyze`]. It
//! renders as plain text with [`render_text`] and as JSON with
//! [`export_object`]. Individual trees export to dot ([`export_graph`]) and
//! to Open-PSA model-exchange XML ([`export_exchange`]).

mod dot;
mod exchange;

use std::fmt::Write;

use serde::Serialize;

use crate::cutset::CutSetCollection;
use crate::model::ValidationReport;

pub use dot::export_graph;
pub use exchange::{export_exchange, import_exchange, ExchangeError};

pub const NO_FINDINGS: &str = "(no findings)";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub model: ModelSummary,
    pub validation: ValidationReport,
    pub uca_candidates: Vec<CandidateRow>,
    pub uif_candidates: Vec<CandidateRow>,
    pub traceability: Vec<TraceRow>,
    pub top_events: Vec<TopEventSection>,
    pub ccf: CcfFindings,
    /// Analyst text carried over from the model's `notes`.
    pub recommendations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelSummary {
    pub name: String,
    pub components: usize,
    pub signals: usize,
    pub control_actions: usize,
    pub divisions: Vec<String>,
    pub top_events: Vec<String>,
    pub declared_ucas: usize,
    pub declared_uifs: usize,
}

/// One generated UCA or UIF candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateRow {
    pub owner: String,
    /// Control action id for UCAs, signal id for UIFs.
    pub subject: String,
    /// `UCA-A` .. `UIF-D`.
    pub tag: String,
    pub description: String,
    /// Id of the declared record matching owner, subject and type, if any.
    /// Candidates without one are review items.
    pub declared: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceRow {
    pub record: String,
    pub owner: String,
    pub signal: String,
    pub tag: String,
    /// Component paths from the owner to a consuming controller.
    pub paths: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopEventSection {
    pub id: String,
    pub description: String,
    pub nodes: usize,
    pub basic_events: usize,
    pub cut_sets: CutSetCollection,
    pub software_cut_sets: CutSetCollection,
    /// Labels of every basic event that appears in a cut set, by id.
    pub labels: std::collections::BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CcfFindings {
    pub inter_division: Vec<SharedEventFinding>,
    pub intra_division: Vec<SharedDependencyFinding>,
}

/// A software failure common to non-diverse divisions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SharedEventFinding {
    pub event: String,
    pub label: String,
    pub divisions: Vec<String>,
    /// Per-division records the shared event stands for.
    pub merged: Vec<String>,
    pub top_events: Vec<String>,
}

/// A component whose failure propagates to others in its own division.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SharedDependencyFinding {
    pub component: String,
    pub division: Option<String>,
    pub closure_size: usize,
    pub affected: Vec<String>,
    /// Basic events owned by the component, across all analysed top events.
    pub events: Vec<String>,
}

/// JSON dump of the report. Field names are part of the public interface.
pub fn export_object(report: &AnalysisReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn render_text(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let o = &mut out;
    let m = &report.model;

    heading(o, &format!("Hazard analysis: {}", m.name));
    let _ = writeln!(o, "components: {}", m.components);
    let _ = writeln!(o, "signals: {}", m.signals);
    let _ = writeln!(o, "control actions: {}", m.control_actions);
    let _ = writeln!(o, "divisions: {}", list_or_none(&m.divisions));
    let _ = writeln!(o, "top events: {}", list_or_none(&m.top_events));
    let _ = writeln!(o, "declared UCAs: {}, declared UIFs: {}", m.declared_ucas, m.declared_uifs);

    heading(o, "Validation");
    if report.validation.errors.is_empty() && report.validation.warnings.is_empty() {
        let _ = writeln!(o, "{NO_FINDINGS}");
    }
    for f in &report.validation.errors {
        let _ = writeln!(o, "error {f}");
    }
    for f in &report.validation.warnings {
        let _ = writeln!(o, "warning {f}");
    }

    for (title, rows) in [("UCA candidates", &report.uca_candidates), ("UIF candidates", &report.uif_candidates)] {
        heading(o, title);
        if rows.is_empty() {
            let _ = writeln!(o, "{NO_FINDINGS}");
        }
        for r in rows {
            let status = match &r.declared {
                Some(id) => format!("declared as {id}"),
                None => "review".to_string(),
            };
            let _ = writeln!(o, "{} {} {}: {} [{status}]", r.tag, r.owner, r.subject, r.description);
        }
    }

    heading(o, "Traceability");
    if report.traceability.is_empty() {
        let _ = writeln!(o, "{NO_FINDINGS}");
    }
    for t in &report.traceability {
        let _ = writeln!(o, "{} ({} on {} from {})", t.record, t.tag, t.signal, t.owner);
        if t.paths.is_empty() {
            let _ = writeln!(o, "  no consuming controller");
        }
        for p in &t.paths {
            let _ = writeln!(o, "  {}", p.join(" -> "));
        }
    }

    if report.top_events.is_empty() {
        heading(o, "Top events");
        let _ = writeln!(o, "{NO_FINDINGS}");
    }
    for te in &report.top_events {
        heading(o, &format!("Top event {}: {}", te.id, te.description));
        let _ = writeln!(o, "tree: {} nodes, {} basic events", te.nodes, te.basic_events);
        for w in &te.warnings {
            let _ = writeln!(o, "warning: {w}");
        }
        cut_set_block(o, "Minimal cut sets", &te.cut_sets, te);
        cut_set_block(o, "Software cut sets", &te.software_cut_sets, te);
    }

    heading(o, "Common cause failures");
    let _ = writeln!(o, "inter-division:");
    if report.ccf.inter_division.is_empty() {
        let _ = writeln!(o, "  {NO_FINDINGS}");
    }
    for f in &report.ccf.inter_division {
        let _ = writeln!(o, "  {}: {}", f.event, f.label);
        let _ = writeln!(o, "    divisions: {}; replaces: {}", f.divisions.join(", "), list_or_none(&f.merged));
    }
    let _ = writeln!(o, "intra-division:");
    if report.ccf.intra_division.is_empty() {
        let _ = writeln!(o, "  {NO_FINDINGS}");
    }
    for f in &report.ccf.intra_division {
        let div = f.division.as_ref().map(|d| format!(" (division {d})")).unwrap_or_default();
        let _ = writeln!(o, "  {}{div}: closure size {}", f.component, f.closure_size);
        let _ = writeln!(o, "    affected: {}", f.affected.join(", "));
        let _ = writeln!(o, "    events: {}", list_or_none(&f.events));
    }

    heading(o, "Recommendations");
    if report.recommendations.is_empty() {
        let _ = writeln!(o, "(none recorded; add `notes` to the system block)");
    }
    for r in &report.recommendations {
        let _ = writeln!(o, "- {r}");
    }
    out
}

fn heading(o: &mut String, title: &str) {
    if !o.is_empty() {
        o.push('\n');
    }
    let _ = writeln!(o, "== {title} ==");
}

fn list_or_none(items: &[String]) -> String {
    if items.is_empty() {
        "none".to_string()
    } else {
        items.join(", ")
    }
}

fn cut_set_block(o: &mut String, title: &str, c: &CutSetCollection, te: &TopEventSection) {
    let trunc = match c.truncation {
        Some(n) => format!(", truncated at order {n}"),
        None => String::new(),
    };
    let _ = writeln!(o, "{title} ({}{trunc}):", c.len());
    if c.is_empty() {
        let _ = writeln!(o, "  {NO_FINDINGS}");
    }
    for (i, cs) in c.cut_sets.iter().enumerate() {
        let names: Vec<&str> = cs
            .events
            .iter()
            .map(|e| te.labels.get(e).map(String::as_str).unwrap_or(e.as_str()))
            .collect();
        let ccf = if cs.ccf_bearing { " ccf" } else { "" };
        let _ = writeln!(o, "  #{} [{}{ccf}] {}", i + 1, cs.events.join(" "), names.join(" AND "));
    }
}

//! The full pipeline: validate, build, unify, cut sets, report.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::cutset::{default_max_order, minimal_cut_sets, software_cut_sets, CutSetError, SoftwareFilter};
use crate::model::{dependency_closure, validate, SystemModel, ValidationReport};
use crate::report::{
    AnalysisReport, CandidateRow, CcfFindings, ModelSummary, SharedDependencyFinding, SharedEventFinding, TopEventSection,
    TraceRow,
};
use crate::taxonomy::{candidate_ucas, candidate_uifs, trace_uif, CandidateOptions, Flavor};
use crate::tree::{BasicEventKind, FaultTree};
use crate::treebuilder::{build_declared, unify_ccf, BuildError};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Analyse only this top event; all of them when `None`.
    pub top: Option<String>,
    /// Cut-set order limit; `None` uses [`default_max_order`].
    pub max_order: Option<usize>,
    /// Count cut sets with at least one software event as software cut sets.
    pub include_mixed: bool,
    pub allow_all_uif_types: bool,
    pub no_ccf_unify: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("model is invalid ({} error(s))", .0.errors.len())]
    Invalid(ValidationReport),
    #[error("unknown top event `{0}`")]
    UnknownTopEvent(String),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    CutSets(#[from] CutSetError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Analysis {
    pub report: AnalysisReport,
    /// One tree per analysed top event, in report order.
    pub trees: Vec<FaultTree>,
}

pub fn analyze(model: &SystemModel, opts: &AnalysisOptions) -> Result<Analysis, AnalysisError> {
    let validation = validate(model);
    if !validation.is_ok() {
        return Err(AnalysisError::Invalid(validation));
    }
    let tops: Vec<&str> = match &opts.top {
        Some(t) if model.top_event(t).is_none() => return Err(AnalysisError::UnknownTopEvent(t.clone())),
        Some(t) => vec![t.as_str()],
        None => model.top_events.iter().map(|t| t.id.as_str()).collect(),
    };

    let mut trees = Vec::new();
    let mut sections = Vec::new();
    for top in tops {
        let mut tree = build_declared(model, top)?;
        if !opts.no_ccf_unify {
            tree = unify_ccf(&tree, model);
        }
        let max_order = opts.max_order.or_else(|| default_max_order(&tree));
        let cut_sets = minimal_cut_sets(&tree, max_order)?;
        let filter = if opts.include_mixed { SoftwareFilter::IncludeMixed } else { SoftwareFilter::AllSoftware };
        let software = software_cut_sets(&cut_sets, filter);
        let labels = cut_sets
            .cut_sets
            .iter()
            .flat_map(|c| c.events.iter())
            .map(|e| (e.clone(), tree.nodes[e].label.clone()))
            .collect();
        let te = model.top_event(top).expect("checked above");
        sections.push(TopEventSection {
            id: te.id.clone(),
            description: te.description.clone(),
            nodes: tree.descendants(&tree.top).len(),
            basic_events: tree.basic_events().len(),
            cut_sets,
            software_cut_sets: software,
            labels,
            warnings: tree.warnings.clone(),
        });
        trees.push(tree);
    }

    let report = AnalysisReport {
        model: summary(model),
        validation,
        uca_candidates: uca_rows(model),
        uif_candidates: uif_rows(model, opts),
        traceability: trace_rows(model),
        ccf: ccf_findings(model, &trees),
        top_events: sections,
        recommendations: model.notes.clone(),
    };
    Ok(Analysis { report, trees })
}

fn summary(model: &SystemModel) -> ModelSummary {
    ModelSummary {
        name: model.name.clone(),
        components: model.components.len(),
        signals: model.signals.len(),
        control_actions: model.control_actions.len(),
        divisions: model.divisions.iter().map(|d| d.id.clone()).collect(),
        top_events: model.top_events.iter().map(|t| t.id.clone()).collect(),
        declared_ucas: model.declared_ucas.len(),
        declared_uifs: model.declared_uifs.len(),
    }
}

fn declared_match(model: &SystemModel, owner: &str, subject: &str, tag: &str) -> Option<String> {
    model
        .declared_records()
        .find(|r| {
            let s = match &r.flavor {
                Flavor::Uca { control_action, .. } => control_action,
                Flavor::Uif { signal, .. } => signal,
            };
            r.owner == owner && s == subject && r.flavor.tag() == tag
        })
        .map(|r| r.id.clone())
}

fn uca_rows(model: &SystemModel) -> Vec<CandidateRow> {
    let mut rows = Vec::new();
    for c in model.components.iter().filter(|c| c.kind.has_control_authority()) {
        for cand in candidate_ucas(model, &c.id).unwrap_or_default() {
            let tag = cand.uca_type.to_string();
            rows.push(CandidateRow {
                declared: declared_match(model, &cand.controller, &cand.control_action, &tag),
                owner: cand.controller,
                subject: cand.control_action,
                tag,
                description: cand.description,
            });
        }
    }
    rows
}

fn uif_rows(model: &SystemModel, opts: &AnalysisOptions) -> Vec<CandidateRow> {
    let copts = CandidateOptions { allow_all_uif_types: opts.allow_all_uif_types };
    let mut rows = Vec::new();
    for c in &model.components {
        for cand in candidate_uifs(model, &c.id, copts).unwrap_or_default() {
            let tag = cand.uif_type.to_string();
            rows.push(CandidateRow {
                declared: declared_match(model, &cand.owner, &cand.signal, &tag),
                owner: cand.owner,
                subject: cand.signal,
                tag,
                description: cand.description,
            });
        }
    }
    rows
}

fn trace_rows(model: &SystemModel) -> Vec<TraceRow> {
    model
        .declared_uifs
        .iter()
        .map(|r| {
            let signal = match &r.flavor {
                Flavor::Uif { signal, .. } => signal.clone(),
                Flavor::Uca { .. } => String::new(),
            };
            TraceRow {
                record: r.id.clone(),
                owner: r.owner.clone(),
                signal,
                tag: r.flavor.tag(),
                paths: trace_uif(model, r).unwrap_or_default(),
            }
        })
        .collect()
}

fn ccf_findings(model: &SystemModel, trees: &[FaultTree]) -> CcfFindings {
    let mut shared: BTreeMap<String, SharedEventFinding> = BTreeMap::new();
    let mut owned: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for t in trees {
        for n in t.basic_events() {
            if let Some(BasicEventKind::SharedCcf { record, merged }) = n.basic() {
                let f = shared.entry(n.id.clone()).or_insert_with(|| SharedEventFinding {
                    event: n.id.clone(),
                    label: n.label.clone(),
                    divisions: record.shared_divisions.clone(),
                    merged: merged.clone(),
                    top_events: Vec::new(),
                });
                f.top_events.push(t.name.clone());
                for r in model.declared_records().filter(|r| merged.contains(&r.id)) {
                    owned.entry(r.owner.as_str()).or_default().insert(n.id.clone());
                }
            }
            if let Some(o) = &n.owner {
                owned.entry(o.as_str()).or_default().insert(n.id.clone());
            }
        }
    }

    let mut intra = Vec::new();
    for c in model.components.iter().filter(|c| !c.kind.has_control_authority()) {
        let closure = dependency_closure(model, &c.id).expect("component exists");
        if closure.len() < 2 {
            continue;
        }
        intra.push(SharedDependencyFinding {
            component: c.id.clone(),
            division: c.division.clone(),
            closure_size: closure.len(),
            affected: closure.into_iter().collect(),
            events: owned.get(c.id.as_str()).map(|s| s.iter().cloned().collect()).unwrap_or_default(),
        });
    }
    intra.sort_by(|a, b| b.closure_size.cmp(&a.closure_size).then_with(|| a.component.cmp(&b.component)));
    CcfFindings { inter_division: shared.into_values().collect(), intra_division: intra }
}

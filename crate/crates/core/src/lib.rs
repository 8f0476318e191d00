//! Qualitative hazard analysis of digital instrumentation and control
//! architectures.
//!
//! A system description ([`model::SystemModel`], usually parsed from a
//! `.dicm` file) is turned into an integrated fault tree whose basic events
//! are hardware failures, unsafe control actions (UCAs), unsafe information
//! flows (UIFs), procedural failures and transmission failures. Minimal cut
//! sets and common-cause findings are then derived from that tree.

pub mod analysis;
pub mod cutset;
pub mod fixtures;
pub mod model;
pub mod parser;
pub mod report;
pub mod taxonomy;
pub mod tree;
pub mod treebuilder;

pub use analysis::{analyze, Analysis, AnalysisError, AnalysisOptions};
pub use cutset::{brute_force_cut_sets, minimal_cut_sets, software_cut_sets, CutSet, CutSetCollection, CutSetKind, SoftwareFilter};
pub use model::{dependency_closure, validate, Component, ComponentKind, SystemModel, ValidationReport};
pub use parser::{parse, parse_named, serialize, ParseError, SourceSpan};
pub use report::{export_exchange, export_graph, export_object, import_exchange, render_text, AnalysisReport};
pub use taxonomy::{candidate_ucas, candidate_uifs, trace_uif, UcaType, UifType, UnsafeFlowRecord};
pub use tree::{BasicEventKind, FaultTree, GateKind};
pub use treebuilder::{build, build_alternative_config, build_declared, unify_ccf};

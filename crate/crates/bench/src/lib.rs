//! Inputs shared by the benchmarks.

use resha_core::cutset::ORACLE_MAX_EVENTS;
use resha_core::treebuilder::{build_declared, unify_ccf};
use resha_core::{fixtures, FaultTree};

/// The unified QIAS-P tree for `reactor_fails_to_trip`.
pub fn qiasp_tree() -> FaultTree {
    let m = fixtures::qiasp_hsi();
    unify_ccf(&build_declared(&m, "reactor_fails_to_trip").expect("fixture builds"), &m)
}

/// The largest component subtree of `tree` small enough for the exhaustive oracle.
pub fn largest_oracle_subtree(tree: &FaultTree) -> FaultTree {
    tree.nodes
        .values()
        .filter(|n| n.is_gate())
        .map(|n| tree.subtree(&n.id))
        .filter(|s| s.basic_events().len() <= ORACLE_MAX_EVENTS)
        .max_by_key(|s| (s.basic_events().len(), s.top.clone()))
        .expect("some gate fits")
}

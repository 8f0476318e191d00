//! Minimal cut sets of a fault tree.
//!
//! [`minimal_cut_sets`] expands gates top-down, memoising the reduced cut-set
//! family of every gate so a shared subtree is expanded once. Each family is
//! kept free of duplicates (idempotence) and supersets (absorption).
//! [`brute_force_cut_sets`] is an independent truth-table oracle for small trees.

mod bitset;
mod oracle;

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::tree::{BasicEventKind, FaultTree, GateKind, NodeBody, TreeError};

pub use oracle::{brute_force_cut_sets, ORACLE_MAX_EVENTS};

use bitset::EventSet;

/// Trees with more basic events than this get [`DEFAULT_MAX_ORDER`] unless
/// the caller asks otherwise.
pub const LARGE_TREE_EVENTS: usize = 256;
pub const DEFAULT_MAX_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutSetKind {
    AllSoftware,
    AllHardware,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutSet {
    /// Basic-event ids, sorted.
    pub events: Vec<String>,
    pub order: usize,
    pub kind: CutSetKind,
    pub ccf_bearing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutSetCollection {
    pub source: String,
    /// Sorted by order, then lexicographically by event ids.
    pub cut_sets: Vec<CutSet>,
    pub truncation: Option<usize>,
}

impl CutSetCollection {
    pub fn len(&self) -> usize {
        self.cut_sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cut_sets.is_empty()
    }

    /// The cut sets as plain sorted id lists, for comparisons.
    pub fn as_sets(&self) -> Vec<Vec<String>> {
        self.cut_sets.iter().map(|c| c.events.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutSetError {
    #[error("malformed tree: {0}")]
    Malformed(#[from] TreeError),
    #[error("{found} basic events exceed the exhaustive-enumeration limit of {limit}")]
    TooManyEvents { found: usize, limit: usize },
}

/// [`DEFAULT_MAX_ORDER`] for trees above [`LARGE_TREE_EVENTS`], otherwise unbounded.
pub fn default_max_order(tree: &FaultTree) -> Option<usize> {
    (tree.basic_events().len() > LARGE_TREE_EVENTS).then_some(DEFAULT_MAX_ORDER)
}

pub fn minimal_cut_sets(tree: &FaultTree, max_order: Option<usize>) -> Result<CutSetCollection, CutSetError> {
    tree.check()?;
    let events: Vec<&str> = tree.basic_events().iter().map(|n| n.id.as_str()).collect();
    let index: HashMap<&str, usize> = events.iter().enumerate().map(|(i, e)| (*e, i)).collect();

    let mut exp = Expander {
        tree,
        index: &index,
        width: events.len(),
        max_order,
        memo: HashMap::new(),
    };
    let family = exp.expand(&tree.top);
    let sets: Vec<Vec<usize>> = family.iter().map(|s| s.iter().collect()).collect();
    Ok(collect(tree, &events, sets, max_order))
}

struct Expander<'a> {
    tree: &'a FaultTree,
    index: &'a HashMap<&'a str, usize>,
    width: usize,
    max_order: Option<usize>,
    memo: HashMap<&'a str, std::rc::Rc<Vec<EventSet>>>,
}

impl<'a> Expander<'a> {
    fn expand(&mut self, id: &'a str) -> std::rc::Rc<Vec<EventSet>> {
        if let Some(f) = self.memo.get(id) {
            return f.clone();
        }
        let node = &self.tree.nodes[id];
        let family = match &node.body {
            NodeBody::Basic { .. } => {
                let mut s = EventSet::new(self.width);
                s.insert(self.index[id]);
                vec![s]
            }
            NodeBody::Reference { .. } => Vec::new(),
            NodeBody::Gate { kind: GateKind::Or, children } => {
                let mut acc = Vec::new();
                for c in children {
                    acc.extend(self.expand(c).iter().cloned());
                }
                minimize(acc)
            }
            NodeBody::Gate { kind: GateKind::And, children } => {
                let mut acc = vec![EventSet::new(self.width)];
                for c in children {
                    let f = self.expand(c);
                    let mut next = Vec::with_capacity(acc.len() * f.len());
                    for a in &acc {
                        for b in f.iter() {
                            let u = a.union(b);
                            if self.max_order.is_none_or(|m| u.len() <= m) {
                                next.push(u);
                            }
                        }
                    }
                    acc = minimize(next);
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
        };
        let family = match self.max_order {
            Some(m) => family.into_iter().filter(|s| s.len() <= m).collect(),
            None => family,
        };
        let rc = std::rc::Rc::new(family);
        self.memo.insert(id, rc.clone());
        rc
    }
}

/// Remove duplicates and supersets.
fn minimize(mut sets: Vec<EventSet>) -> Vec<EventSet> {
    let mut seen = HashSet::new();
    sets.retain(|s| seen.insert(s.clone()));
    sets.sort_by_key(|s| s.len());
    let mut kept: Vec<EventSet> = Vec::with_capacity(sets.len());
    for s in sets {
        if !kept.iter().any(|k| k.is_subset(&s)) {
            kept.push(s);
        }
    }
    kept
}

/// Turn index sets into a sorted, classified collection.
pub(crate) fn collect(
    tree: &FaultTree,
    events: &[&str],
    sets: Vec<Vec<usize>>,
    truncation: Option<usize>,
) -> CutSetCollection {
    let mut cut_sets: Vec<CutSet> = sets
        .into_iter()
        .map(|idx| {
            let mut ids: Vec<String> = idx.iter().map(|&i| events[i].to_string()).collect();
            ids.sort();
            classify(tree, ids)
        })
        .collect();
    cut_sets.sort_by(|a, b| a.order.cmp(&b.order).then_with(|| a.events.cmp(&b.events)));
    CutSetCollection { source: tree.name.clone(), cut_sets, truncation }
}

fn classify(tree: &FaultTree, events: Vec<String>) -> CutSet {
    let kinds: Vec<&BasicEventKind> = events.iter().filter_map(|e| tree.nodes.get(e)).filter_map(|n| n.basic()).collect();
    let sw = kinds.iter().filter(|k| k.is_software_class()).count();
    let kind = if sw == kinds.len() {
        CutSetKind::AllSoftware
    } else if sw == 0 {
        CutSetKind::AllHardware
    } else {
        CutSetKind::Mixed
    };
    let ccf_bearing = kinds.iter().any(|k| matches!(k, BasicEventKind::SharedCcf { .. }));
    CutSet { order: events.len(), events, kind, ccf_bearing }
}

/// Which cut sets count as software cut sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SoftwareFilter {
    /// Every member is a software-class event.
    #[default]
    AllSoftware,
    /// At least one member is a software-class event.
    IncludeMixed,
}

pub fn software_cut_sets(collection: &CutSetCollection, filter: SoftwareFilter) -> CutSetCollection {
    let keep = |c: &CutSet| match filter {
        SoftwareFilter::AllSoftware => c.kind == CutSetKind::AllSoftware,
        SoftwareFilter::IncludeMixed => c.kind != CutSetKind::AllHardware,
    };
    CutSetCollection {
        source: collection.source.clone(),
        cut_sets: collection.cut_sets.iter().filter(|c| keep(c)).cloned().collect(),
        truncation: collection.truncation,
    }
}

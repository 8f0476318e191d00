//! Exhaustive truth-table oracle. Evaluates the tree on all 2^n event
//! assignments, 64 at a time, and keeps the true assignments from which no
//! single event can be removed. For a monotone function those are exactly
//! the minimal cut sets.

use super::{collect, CutSetCollection, CutSetError};
use crate::tree::{FaultTree, GateKind, NodeBody};

pub const ORACLE_MAX_EVENTS: usize = 22;

/// Bit `j` of `LOW_PATTERNS[i]` is bit `i` of `j`.
const LOW_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

pub fn brute_force_cut_sets(tree: &FaultTree) -> Result<CutSetCollection, CutSetError> {
    let order = tree.topological_order()?;
    tree.check()?;
    let events: Vec<&str> = tree.basic_events().iter().map(|n| n.id.as_str()).collect();
    let n = events.len();
    if n > ORACLE_MAX_EVENTS {
        return Err(CutSetError::TooManyEvents { found: n, limit: ORACLE_MAX_EVENTS });
    }

    let pos: std::collections::HashMap<&str, usize> = order.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let event_slot: std::collections::HashMap<&str, usize> = events.iter().enumerate().map(|(i, e)| (*e, i)).collect();

    enum Op {
        Event(usize),
        False,
        And(Vec<usize>),
        Or(Vec<usize>),
    }
    let ops: Vec<Op> = order
        .iter()
        .map(|id| match &tree.nodes[*id].body {
            NodeBody::Basic { .. } => Op::Event(event_slot[id]),
            NodeBody::Reference { .. } => Op::False,
            NodeBody::Gate { kind, children } => {
                let c = children.iter().map(|c| pos[c.as_str()]).collect();
                match kind {
                    GateKind::And => Op::And(c),
                    GateKind::Or => Op::Or(c),
                }
            }
        })
        .collect();

    let total: u64 = 1 << n;
    let blocks = total.div_ceil(64) as usize;
    let valid = if total >= 64 { u64::MAX } else { (1u64 << total) - 1 };

    let mut truth = vec![0u64; blocks];
    let mut vals = vec![0u64; ops.len()];
    for (b, word) in truth.iter_mut().enumerate() {
        for (i, op) in ops.iter().enumerate() {
            vals[i] = match op {
                Op::Event(e) if *e < 6 => LOW_PATTERNS[*e],
                Op::Event(e) => {
                    if (b >> (e - 6)) & 1 == 1 {
                        u64::MAX
                    } else {
                        0
                    }
                }
                Op::False => 0,
                Op::And(c) => c.iter().fold(u64::MAX, |acc, &j| acc & vals[j]),
                Op::Or(c) => c.iter().fold(0, |acc, &j| acc | vals[j]),
            };
        }
        *word = vals[ops.len() - 1] & valid;
    }

    // x is non-minimal if some x - {i} is also true.
    let mut reducible = vec![0u64; blocks];
    for i in 0..n {
        if let Some(pattern) = LOW_PATTERNS.get(i) {
            let shift = 1u32 << i;
            for (r, t) in reducible.iter_mut().zip(&truth) {
                *r |= (t << shift) & pattern;
            }
        } else {
            let stride = 1usize << (i - 6);
            for b in 0..blocks {
                if b & stride != 0 {
                    reducible[b] |= truth[b ^ stride];
                }
            }
        }
    }

    let mut sets = Vec::new();
    for (b, (t, r)) in truth.iter().zip(&reducible).enumerate() {
        let mut m = t & !r;
        while m != 0 {
            let j = m.trailing_zeros() as usize;
            m &= m - 1;
            let assignment = (b * 64 + j) as u64;
            sets.push((0..n).filter(|k| assignment >> k & 1 == 1).collect());
        }
    }
    Ok(collect(tree, &events, sets, None))
}

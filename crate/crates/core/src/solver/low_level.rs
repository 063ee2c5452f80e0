use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::time::Instant;

use super::constraints::ConstraintTable;
use super::instance::AgentEdges;
use crate::mapf::TailSemantics;

/// Result of a single-agent space-time search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LowLevelResult<V> {
    /// One vertex per timestep, start first, goal last.
    Found(Vec<V>),
    NoPath,
    Timeout,
}

impl<V> LowLevelResult<V> {
    pub fn found(self) -> Option<Vec<V>> {
        match self {
            Self::Found(p) => Some(p),
            _ => None,
        }
    }
}

/// Limits shared by every low-level call of one solve.
#[derive(Debug, Clone, Copy, Default)]
pub struct SearchLimits {
    pub semantics: TailSemantics,
    /// Largest admissible arrival timestep.
    pub horizon_cap: Option<usize>,
    pub deadline: Option<Instant>,
}

struct Node<V> {
    vertex: V,
    time: usize,
    parent: usize,
}

const NO_PARENT: usize = usize::MAX;

/// Space-time A* for one agent.
///
/// Returns a minimum-arrival-time path that respects `table`. Ties on `f`
/// are broken by the smaller heuristic value, then the smaller vertex, then
/// moving before waiting, then insertion order.
pub fn low_level_search<I: AgentEdges>(
    instance: &I,
    agent: usize,
    table: &ConstraintTable,
    limits: SearchLimits,
) -> LowLevelResult<I::Vertex> {
    let start = instance.start(agent);
    let goal = instance.goal(agent);
    let goal_loc = instance.location(goal);
    if table.vertex_blocked(instance.location(start), 0) {
        return LowLevelResult::NoPath;
    }
    let h0 = instance.lower_bound(agent, start);
    if h0 == u32::MAX {
        return LowLevelResult::NoPath;
    }
    let ready_at = match limits.semantics {
        TailSemantics::StayAtGoal => match table.free_from(goal_loc) {
            Some(t) => t,
            None => return LowLevelResult::NoPath,
        },
        TailSemantics::DisappearAtGoal => 0,
    };
    let cap = limits.horizon_cap.unwrap_or(usize::MAX);
    if h0 as usize > cap {
        return LowLevelResult::NoPath;
    }
    let stable = table.latest().saturating_add(1);

    let mut nodes = vec![Node {
        vertex: start,
        time: 0,
        parent: NO_PARENT,
    }];
    let mut open = BinaryHeap::new();
    let mut seq = 0u64;
    open.push(Reverse((h0 as usize, h0, start, false, seq, 0usize)));
    let mut closed: HashSet<(I::Vertex, usize)> = HashSet::new();
    let mut succ = Vec::new();
    let mut pops = 0u32;

    while let Some(Reverse((_, _, v, _, _, idx))) = open.pop() {
        pops = pops.wrapping_add(1);
        if pops % 1024 == 0 && limits.deadline.is_some_and(|d| Instant::now() >= d) {
            return LowLevelResult::Timeout;
        }
        let t = nodes[idx].time;
        if !closed.insert((v, t.min(stable))) {
            continue;
        }
        if v == goal && t >= ready_at {
            return LowLevelResult::Found(reconstruct(&nodes, idx));
        }
        let nt = t + 1;
        if nt > cap {
            continue;
        }
        let loc = instance.location(v);
        succ.clear();
        instance.successors(agent, v, &mut succ);
        for &w in &succ {
            let wloc = instance.location(w);
            if table.vertex_blocked(wloc, nt) || table.edge_blocked(loc, wloc, t) {
                continue;
            }
            let h = instance.lower_bound(agent, w);
            if h == u32::MAX || nt.saturating_add(h as usize) > cap {
                continue;
            }
            if closed.contains(&(w, nt.min(stable))) {
                continue;
            }
            nodes.push(Node {
                vertex: w,
                time: nt,
                parent: idx,
            });
            seq += 1;
            let waits = wloc == loc;
            open.push(Reverse((nt + h as usize, h, w, waits, seq, nodes.len() - 1)));
        }
    }
    LowLevelResult::NoPath
}

fn reconstruct<V: Copy>(nodes: &[Node<V>], mut idx: usize) -> Vec<V> {
    let mut out = Vec::with_capacity(nodes[idx].time + 1);
    while idx != NO_PARENT {
        out.push(nodes[idx].vertex);
        idx = nodes[idx].parent;
    }
    out.reverse();
    out
}

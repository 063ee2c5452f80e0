use std::time::Instant;

use thiserror::Error;

use super::constraints::ConstraintTable;
use super::instance::AgentEdges;
use super::low_level::{low_level_search, LowLevelResult, SearchLimits};
use super::{Solution, SolveOptions, SolveStatus, SolverStats};
use crate::mapf::TailSemantics;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("order is not a permutation of 0..{agents}")]
pub struct InvalidOrder {
    pub agents: usize,
}

/// Plans agents one at a time in `order`, each avoiding the paths fixed
/// before it. Sound but neither complete nor optimal.
pub fn prioritized_solve<I: AgentEdges>(
    instance: &I,
    order: &[usize],
    options: &SolveOptions,
) -> Result<Solution<I::Vertex>, InvalidOrder> {
    let n = instance.agent_count();
    let mut seen = vec![false; n];
    if order.len() != n || !order.iter().all(|&a| a < n && !std::mem::replace(&mut seen[a], true)) {
        return Err(InvalidOrder { agents: n });
    }

    let started = Instant::now();
    let deadline = options.time_limit.map(|d| started + d);
    let limits = SearchLimits {
        semantics: options.semantics,
        horizon_cap: options.horizon_cap,
        deadline,
    };
    let mut stats = SolverStats::default();
    let mut reserved = ConstraintTable::new();
    let mut paths = vec![Vec::new(); n];

    for &agent in order {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Ok(Solution::failed(SolveStatus::Timeout, stats, started));
        }
        stats.low_level_calls += 1;
        let path = match low_level_search(instance, agent, &reserved, limits) {
            LowLevelResult::Found(p) => p,
            LowLevelResult::NoPath => {
                return Ok(Solution::failed(SolveStatus::Infeasible, stats, started))
            }
            LowLevelResult::Timeout => {
                return Ok(Solution::failed(SolveStatus::Timeout, stats, started))
            }
        };
        let locs: Vec<_> = path.iter().map(|&v| instance.location(v)).collect();
        for (t, &v) in locs.iter().enumerate() {
            reserved.block_vertex(v, t);
        }
        for (t, w) in locs.windows(2).enumerate() {
            if w[0] != w[1] {
                reserved.block_edge(w[1], w[0], t);
            }
        }
        if options.semantics == TailSemantics::StayAtGoal {
            reserved.block_vertex_from(locs[locs.len() - 1], locs.len() - 1);
        }
        paths[agent] = path;
    }

    stats.wall = started.elapsed();
    Ok(Solution {
        status: SolveStatus::Solved,
        soc: paths.iter().map(|p| p.len() as u64 - 1).sum(),
        paths,
        stats,
    })
}

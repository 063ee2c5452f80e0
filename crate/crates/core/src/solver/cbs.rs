use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::Arc;
use std::time::Instant;

use super::constraints::{Constraint, ConstraintTable};
use super::instance::AgentEdges;
use super::low_level::{low_level_search, LowLevelResult, SearchLimits};
use super::{Solution, SolveOptions, SolveStatus, SolverStats};
use crate::mapf::{Conflict, ConflictScanner, VertexId};

struct AgentPath<V> {
    vertices: Vec<V>,
    locations: Vec<VertexId>,
}

struct ChainLink {
    constraint: Constraint,
    parent: Option<Arc<ChainLink>>,
}

struct CtNode<V> {
    constraints: Option<Arc<ChainLink>>,
    paths: Vec<Arc<AgentPath<V>>>,
    cost: u64,
    first_conflict: Option<Conflict>,
}

fn table_for(chain: &Option<Arc<ChainLink>>, agent: usize) -> ConstraintTable {
    let mut table = ConstraintTable::new();
    let mut link = chain.as_deref();
    while let Some(l) = link {
        if l.constraint.agent == agent {
            table.add(&l.constraint);
        }
        link = l.parent.as_deref();
    }
    table
}

fn wrap<I: AgentEdges>(instance: &I, vertices: Vec<I::Vertex>) -> Arc<AgentPath<I::Vertex>> {
    let locations = vertices.iter().map(|&v| instance.location(v)).collect();
    Arc::new(AgentPath {
        vertices,
        locations,
    })
}

fn path_cost<V>(p: &AgentPath<V>) -> u64 {
    p.vertices.len() as u64 - 1
}

/// Conflict-Based Search minimising the sum of costs.
///
/// The high level is best-first on cost, preferring fewer conflicts and
/// then the older node; the chronologically first conflict is always the one
/// split.
pub fn cbs_solve<I: AgentEdges>(instance: &I, options: &SolveOptions) -> Solution<I::Vertex> {
    let started = Instant::now();
    let deadline = options.time_limit.map(|d| started + d);
    let limits = SearchLimits {
        semantics: options.semantics,
        horizon_cap: options.horizon_cap,
        deadline,
    };
    let mut stats = SolverStats::default();
    let mut scanner = ConflictScanner::default();
    let n = instance.agent_count();

    let finish = |status, stats: SolverStats| Solution::failed(status, stats, started);

    let mut root_paths = Vec::with_capacity(n);
    for agent in 0..n {
        stats.low_level_calls += 1;
        match low_level_search(instance, agent, &ConstraintTable::new(), limits) {
            LowLevelResult::Found(p) => root_paths.push(wrap(instance, p)),
            LowLevelResult::NoPath => return finish(SolveStatus::Infeasible, stats),
            LowLevelResult::Timeout => return finish(SolveStatus::Timeout, stats),
        }
    }

    let mut evaluate = |paths: &[Arc<AgentPath<I::Vertex>>]| -> (usize, Option<Conflict>) {
        let views: Vec<&[VertexId]> = paths.iter().map(|p| p.locations.as_slice()).collect();
        let all = scanner.scan(&views, options.semantics, false);
        (all.len(), all.first().copied())
    };

    let (count, first) = evaluate(&root_paths);
    let root = CtNode {
        constraints: None,
        cost: root_paths.iter().map(|p| path_cost(p)).sum(),
        paths: root_paths,
        first_conflict: first,
    };
    let mut arena: Vec<Option<CtNode<I::Vertex>>> = vec![Some(root)];
    let mut open = BinaryHeap::new();
    open.push(Reverse((arena[0].as_ref().unwrap().cost, count, 0usize)));
    stats.generated = 1;

    while let Some(Reverse((_, _, id))) = open.pop() {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return finish(SolveStatus::Timeout, stats);
        }
        let node = arena[id].take().expect("each node is popped once");
        let Some(conflict) = node.first_conflict else {
            stats.wall = started.elapsed();
            return Solution {
                status: SolveStatus::Solved,
                soc: node.cost,
                paths: node
                    .paths
                    .iter()
                    .map(|p| p.vertices.clone())
                    .collect(),
                stats,
            };
        };
        stats.expansions += 1;
        for constraint in Constraint::split(&conflict) {
            let agent = constraint.agent;
            let chain = Some(Arc::new(ChainLink {
                constraint,
                parent: node.constraints.clone(),
            }));
            let table = table_for(&chain, agent);
            stats.low_level_calls += 1;
            let new_path = match low_level_search(instance, agent, &table, limits) {
                LowLevelResult::Found(p) => wrap(instance, p),
                LowLevelResult::NoPath => continue,
                LowLevelResult::Timeout => return finish(SolveStatus::Timeout, stats),
            };
            let mut paths = node.paths.clone();
            let cost = node.cost - path_cost(&paths[agent]) + path_cost(&new_path);
            paths[agent] = new_path;
            let (count, first) = evaluate(&paths);
            arena.push(Some(CtNode {
                constraints: chain,
                paths,
                cost,
                first_conflict: first,
            }));
            stats.generated += 1;
            open.push(Reverse((cost, count, arena.len() - 1)));
        }
    }
    finish(SolveStatus::Infeasible, stats)
}

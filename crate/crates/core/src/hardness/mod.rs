//! Instance generator turning a minimum sum coloring question into a delay
//! repair question.
//!
//! Every vertex of the input graph becomes an agent with a private start.
//! Each agent then walks `block_count` identical blocks of `m` vertices,
//! where `m` is the number of input edges. Inside a block the `r`-th vertex
//! of agents `i` and `j` is the same vertex exactly when `e_r = {i, j}`.
//! Agents waiting different amounts at their starts never meet, so proper
//! colorings are repairs of equal cost.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::mapf::{
    apply_plan_delays, find_conflicts, Conflict, DelayAssignment, DelayPermissions, Graph, Path,
    Plan, TailSemantics, VertexId,
};
use crate::oracle::UndirectedGraph;

/// Largest accepted threshold.
pub const MAX_THRESHOLD: u64 = 50;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HardnessError {
    #[error("threshold {0} exceeds the supported maximum of {MAX_THRESHOLD}")]
    ThresholdTooLarge(u64),
    #[error("coloring has {given} entries for {vertices} vertices")]
    ColoringLengthMismatch { given: usize, vertices: usize },
    #[error("coloring is improper: {0}")]
    ColoringImproper(Conflict),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReductionOptions {
    /// Permit waiting only at each agent's start vertex.
    pub start_only_delays: bool,
    /// Append a private goal vertex to every path so that agents parked at
    /// their goals never share a vertex.
    pub private_goals: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutput {
    pub graph: Graph,
    pub plan: Plan,
    pub permissions: DelayPermissions,
    pub block_count: usize,
    /// Vertex `i` of the input graph is driven by agent `agent_map[i]`.
    pub agent_map: Vec<usize>,
    /// For input edge `r`, the `(block, vertex)` pairs shared by its ends.
    pub shared_vertex_map: Vec<Vec<(usize, VertexId)>>,
    pub budget: u64,
}

/// Builds the repair instance with `threshold + 1` blocks and the given
/// budget.
pub fn msc_to_acid(
    input: &UndirectedGraph,
    threshold: u64,
    options: ReductionOptions,
) -> Result<ReductionOutput, HardnessError> {
    if threshold > MAX_THRESHOLD {
        return Err(HardnessError::ThresholdTooLarge(threshold));
    }
    let n = input.vertex_count();
    let m = input.edge_count();
    let blocks = threshold as usize + 1;

    let mut next: VertexId = n as VertexId;
    let mut alloc = || {
        let v = next;
        next += 1;
        v
    };
    let mut paths: Vec<Vec<VertexId>> = (0..n as VertexId).map(|s| vec![s]).collect();
    let mut shared_vertex_map = vec![Vec::with_capacity(blocks); m];
    for block in 0..blocks {
        for (r, &(a, b)) in input.edges().iter().enumerate() {
            let shared = alloc();
            shared_vertex_map[r].push((block, shared));
            for (agent, path) in paths.iter_mut().enumerate() {
                path.push(if agent == a || agent == b { shared } else { alloc() });
            }
        }
    }
    if options.private_goals {
        for path in &mut paths {
            path.push(alloc());
        }
    }

    let vertex_count = next as usize;
    let mut edges = BTreeSet::new();
    for v in 0..next {
        edges.insert((v, v));
    }
    for path in &paths {
        for w in path.windows(2) {
            edges.insert((w[0], w[1]));
        }
    }
    let graph = Graph::new(vertex_count, edges).expect("generated ids are dense and unique");
    let plan = Plan::from_paths(
        paths
            .into_iter()
            .map(|p| Path::new(p).expect("every path has a start"))
            .collect(),
    )
    .expect("at least one agent");
    let permissions = if options.start_only_delays {
        DelayPermissions::from_sets(vec![BTreeSet::from([1]); n])
    } else {
        DelayPermissions::unrestricted(n)
    };
    Ok(ReductionOutput {
        graph,
        plan,
        permissions,
        block_count: blocks,
        agent_map: (0..n).collect(),
        shared_vertex_map,
        budget: threshold,
    })
}

/// Agent `i` waits `coloring[i]` steps at its start.
pub fn coloring_to_delays(
    output: &ReductionOutput,
    coloring: &[u32],
    semantics: TailSemantics,
) -> Result<Vec<DelayAssignment>, HardnessError> {
    let n = output.agent_map.len();
    if coloring.len() != n {
        return Err(HardnessError::ColoringLengthMismatch {
            given: coloring.len(),
            vertices: n,
        });
    }
    let mut delays = vec![DelayAssignment::new(); n];
    for (vertex, &agent) in output.agent_map.iter().enumerate() {
        delays[agent].add(1, coloring[vertex]);
    }
    let delayed = apply_plan_delays(&output.graph, &output.plan, &output.permissions, &delays)
        .expect("start vertices are always delay-permitted");
    match find_conflicts(&delayed, semantics, true).first() {
        Some(&c) => Err(HardnessError::ColoringImproper(c)),
        None => Ok(delays),
    }
}

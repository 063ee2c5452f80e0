//! Constrained Graph (CG) and Improved Constrained Graph (ICG) instances.
//!
//! Both are step-indexed: agent `i` lives on vertices `(v_j, j)` of its own
//! path, may always advance to `(v_{j+1}, j+1)`, and may wait where a
//! self-loop was kept. Vertices are generated on demand from the paths.

mod lift;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::mapf::{DelayPermissions, Graph, Plan, VertexId};
use crate::solver::AgentEdges;

pub use lift::{lift_solution, LiftError, LiftedRepair};

/// Which graph a repair searches on.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum GraphMode {
    /// The original graph, replanning from current positions.
    Og,
    Cg,
    Icg,
}

impl GraphMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Og => "OG",
            Self::Cg => "CG",
            Self::Icg => "ICG",
        }
    }
}

impl std::fmt::Display for GraphMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A vertex of the step-indexed graph; `step` is the 1-based path index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StepVertex {
    pub vertex: VertexId,
    pub step: u32,
}

impl StepVertex {
    pub fn new(vertex: VertexId, step: u32) -> Self {
        Self { vertex, step }
    }
}

/// Per-agent intersecting indices `I_i` (1-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionProfile {
    pub per_agent: Vec<BTreeSet<usize>>,
}

impl IntersectionProfile {
    pub fn agent(&self, agent: usize) -> &BTreeSet<usize> {
        &self.per_agent[agent]
    }
}

/// Index `j` is intersecting for agent `i` iff `v_j` lies on another path.
pub fn intersecting_indices(plan: &Plan) -> IntersectionProfile {
    let mut owners: HashMap<VertexId, (usize, bool)> = HashMap::new();
    for (agent, path) in plan.paths().iter().enumerate() {
        for &v in path.iter() {
            owners
                .entry(v)
                .and_modify(|(first, shared)| *shared |= *first != agent)
                .or_insert((agent, false));
        }
    }
    let per_agent = plan
        .paths()
        .iter()
        .map(|path| {
            path.iter()
                .enumerate()
                .filter(|(_, v)| owners[v].1)
                .map(|(j, _)| j + 1)
                .collect()
        })
        .collect();
    IntersectionProfile { per_agent }
}

/// A step-indexed agent-edge instance built from a plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentEdgeInstance {
    mode: GraphMode,
    paths: Vec<Vec<VertexId>>,
    // loops[i][j - 1]: agent i may wait at index j
    loops: Vec<Vec<bool>>,
}

fn eligible(graph: &Graph, plan: &Plan, permissions: &DelayPermissions, agent: usize, j: usize) -> bool {
    let path = plan.path(agent);
    j < path.vertex_count() && permissions.allows(agent, j) && graph.is_delay_vertex(path[j - 1])
}

/// Successor edges along every path plus a self-loop at each permitted,
/// non-final index on a delay vertex.
pub fn build_cg(graph: &Graph, plan: &Plan, permissions: &DelayPermissions) -> AgentEdgeInstance {
    let loops = (0..plan.agent_count())
        .map(|agent| {
            (1..=plan.path(agent).vertex_count())
                .map(|j| eligible(graph, plan, permissions, agent, j))
                .collect()
        })
        .collect();
    AgentEdgeInstance {
        mode: GraphMode::Cg,
        paths: plan.paths().iter().map(|p| p.vertices().to_vec()).collect(),
        loops,
    }
}

/// The CG with at most one self-loop kept between consecutive intersecting
/// indices.
///
/// For consecutive `s < t` in `I_i ∪ {0}` the loop kept is the last
/// eligible index strictly between them, whose vertex no other agent visits.
/// Only when that open interval has no eligible index is the loop at `t`
/// itself kept. Loops after `max(I_i)` are dropped.
pub fn build_icg(graph: &Graph, plan: &Plan, permissions: &DelayPermissions) -> AgentEdgeInstance {
    let profile = intersecting_indices(plan);
    let loops = (0..plan.agent_count())
        .map(|agent| {
            let len = plan.path(agent).vertex_count();
            let mut keep = vec![false; len];
            let mut s = 0;
            for &t in profile.agent(agent) {
                let private = (s + 1..t)
                    .rev()
                    .find(|&j| eligible(graph, plan, permissions, agent, j));
                let chosen =
                    private.or_else(|| eligible(graph, plan, permissions, agent, t).then_some(t));
                if let Some(j) = chosen {
                    keep[j - 1] = true;
                }
                s = t;
            }
            keep
        })
        .collect();
    AgentEdgeInstance {
        mode: GraphMode::Icg,
        paths: plan.paths().iter().map(|p| p.vertices().to_vec()).collect(),
        loops,
    }
}

impl AgentEdgeInstance {
    pub fn mode(&self) -> GraphMode {
        self.mode
    }

    pub fn original_path(&self, agent: usize) -> &[VertexId] {
        &self.paths[agent]
    }

    pub fn has_loop(&self, agent: usize, index: usize) -> bool {
        index >= 1 && self.loops[agent].get(index - 1).copied().unwrap_or(false)
    }

    /// 1-based indices carrying a self-loop.
    pub fn loop_indices(&self, agent: usize) -> Vec<usize> {
        (1..=self.paths[agent].len())
            .filter(|&j| self.has_loop(agent, j))
            .collect()
    }

    pub fn self_loop_count(&self) -> usize {
        self.loops.iter().flatten().filter(|&&b| b).count()
    }

    /// Every edge of `E_i`, successor edges first.
    pub fn edges(&self, agent: usize) -> Vec<(StepVertex, StepVertex)> {
        let path = &self.paths[agent];
        let sv = |j: usize| StepVertex::new(path[j - 1], j as u32);
        let mut out: Vec<_> = (1..path.len()).map(|j| (sv(j), sv(j + 1))).collect();
        out.extend(self.loop_indices(agent).into_iter().map(|j| (sv(j), sv(j))));
        out
    }

    /// Vertices touched by agent `agent`.
    pub fn agent_vertices(&self, agent: usize) -> Vec<StepVertex> {
        self.paths[agent]
            .iter()
            .enumerate()
            .map(|(j, &v)| StepVertex::new(v, j as u32 + 1))
            .collect()
    }

    /// All step vertices touched by any agent, deduplicated and sorted.
    pub fn vertices(&self) -> Vec<StepVertex> {
        let set: BTreeSet<_> = (0..self.paths.len())
            .flat_map(|a| self.agent_vertices(a))
            .collect();
        set.into_iter().collect()
    }

    pub fn out_degree(&self, agent: usize, v: StepVertex) -> usize {
        let mut out = Vec::new();
        self.successors(agent, v, &mut out);
        out.len()
    }

    /// Sum of the embedded path costs, `‖P‖`.
    pub fn base_cost(&self) -> u64 {
        self.paths.iter().map(|p| p.len() as u64 - 1).sum()
    }
}

impl AgentEdges for AgentEdgeInstance {
    type Vertex = StepVertex;

    fn agent_count(&self) -> usize {
        self.paths.len()
    }

    fn start(&self, agent: usize) -> StepVertex {
        StepVertex::new(self.paths[agent][0], 1)
    }

    fn goal(&self, agent: usize) -> StepVertex {
        let path = &self.paths[agent];
        StepVertex::new(path[path.len() - 1], path.len() as u32)
    }

    fn successors(&self, agent: usize, v: StepVertex, out: &mut Vec<StepVertex>) {
        let path = &self.paths[agent];
        let j = v.step as usize;
        if j == 0 || j > path.len() || path[j - 1] != v.vertex {
            return;
        }
        if j < path.len() {
            out.push(StepVertex::new(path[j], v.step + 1));
        }
        if self.loops[agent][j - 1] {
            out.push(v);
        }
    }

    fn location(&self, v: StepVertex) -> VertexId {
        v.vertex
    }

    fn lower_bound(&self, agent: usize, v: StepVertex) -> u32 {
        (self.paths[agent].len() as u32).saturating_sub(v.step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loops_everywhere(n: usize, edges: &[(VertexId, VertexId)]) -> Graph {
        let mut e = edges.to_vec();
        e.extend((0..n as VertexId).map(|v| (v, v)));
        Graph::new(n, e).unwrap()
    }

    #[test]
    fn intersecting_indices_examples() {
        let disjoint = Plan::from_vertex_lists(vec![vec![0, 1], vec![2, 3]]).unwrap();
        let p = intersecting_indices(&disjoint);
        assert!(p.agent(0).is_empty() && p.agent(1).is_empty());

        let (a, b, c, d, e) = (0, 1, 2, 3, 4);
        let cross = Plan::from_vertex_lists(vec![vec![a, b, c], vec![d, b, e]]).unwrap();
        let p = intersecting_indices(&cross);
        assert_eq!(p.agent(0), &BTreeSet::from([2]));
        assert_eq!(p.agent(1), &BTreeSet::from([2]));

        let swap = Plan::from_vertex_lists(vec![vec![a, b], vec![b, a]]).unwrap();
        let p = intersecting_indices(&swap);
        assert_eq!(p.agent(0), &BTreeSet::from([1, 2]));
        assert_eq!(p.agent(1), &BTreeSet::from([1, 2]));
    }

    #[test]
    fn cg_single_agent_three_vertices() {
        let g = loops_everywhere(3, &[(0, 1), (1, 2)]);
        let plan = Plan::from_vertex_lists(vec![vec![0, 1, 2]]).unwrap();
        let cg = build_cg(&g, &plan, &DelayPermissions::unrestricted(1));
        let edges = cg.edges(0);
        assert_eq!(edges.len(), 4);
        assert_eq!(edges.iter().filter(|(u, v)| u == v).count(), 2);

        let none = DelayPermissions::from_sets(vec![BTreeSet::new()]);
        assert_eq!(build_cg(&g, &plan, &none).self_loop_count(), 0);
    }

    #[test]
    fn icg_keeps_one_loop_per_segment() {
        // Agent 0 walks 0..4 (five vertices); agent 1 touches vertex 3 only.
        let g = loops_everywhere(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (5, 3)]);
        let plan = Plan::from_vertex_lists(vec![vec![0, 1, 2, 3, 4], vec![5, 3]]).unwrap();
        let perms = DelayPermissions::unrestricted(2);
        assert_eq!(intersecting_indices(&plan).agent(0), &BTreeSet::from([4]));
        let icg = build_icg(&g, &plan, &perms);
        assert_eq!(icg.loop_indices(0), vec![3]);
        let cg = build_cg(&g, &plan, &perms);
        for agent in 0..2 {
            let cg_edges: BTreeSet<_> = cg.edges(agent).into_iter().collect();
            assert!(icg.edges(agent).iter().all(|e| cg_edges.contains(e)));
        }
    }

    #[test]
    fn icg_without_intersections_has_no_loops() {
        let g = loops_everywhere(4, &[(0, 1), (2, 3)]);
        let plan = Plan::from_vertex_lists(vec![vec![0, 1], vec![2, 3]]).unwrap();
        let icg = build_icg(&g, &plan, &DelayPermissions::unrestricted(2));
        assert_eq!(icg.self_loop_count(), 0);
    }

    #[test]
    fn icg_falls_back_to_shared_index() {
        // Agent 0: 0 1 2, index 1 not permitted, index 2 shared with agent 1.
        let g = loops_everywhere(4, &[(0, 1), (1, 2), (3, 1)]);
        let plan = Plan::from_vertex_lists(vec![vec![0, 1, 2], vec![3, 1]]).unwrap();
        let perms = DelayPermissions::from_options(vec![Some(BTreeSet::from([2])), None]);
        let icg = build_icg(&g, &plan, &perms);
        assert_eq!(icg.loop_indices(0), vec![2]);
    }

    #[test]
    fn out_degree_at_most_two() {
        let g = loops_everywhere(3, &[(0, 1), (1, 2), (2, 1), (1, 0)]);
        let plan = Plan::from_vertex_lists(vec![vec![0, 1, 2, 1, 0], vec![2, 1, 1, 0]]).unwrap();
        let cg = build_cg(&g, &plan, &DelayPermissions::unrestricted(2));
        for agent in 0..2 {
            for v in cg.vertices() {
                assert!(cg.out_degree(agent, v) <= 2);
            }
        }
        assert_eq!(cg.out_degree(0, StepVertex::new(2, 5)), 0);
    }
}

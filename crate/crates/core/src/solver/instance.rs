use std::collections::VecDeque;
use std::fmt::Debug;
use std::hash::Hash;

use crate::mapf::{Graph, VertexId};

/// The only view of an instance a solver gets: per-agent successor queries.
///
/// One solver body therefore serves a plain graph and any per-agent edge
/// set alike. `location` projects a vertex onto the physical vertex used for
/// collision checks.
pub trait AgentEdges {
    type Vertex: Copy + Eq + Hash + Ord + Debug;

    fn agent_count(&self) -> usize;

    fn start(&self, agent: usize) -> Self::Vertex;

    fn goal(&self, agent: usize) -> Self::Vertex;

    /// Appends the heads of every edge leaving `v` that `agent` may use.
    fn successors(&self, agent: usize, v: Self::Vertex, out: &mut Vec<Self::Vertex>);

    fn location(&self, v: Self::Vertex) -> VertexId;

    /// Admissible estimate of the remaining cost to the goal;
    /// `u32::MAX` marks a vertex from which the goal is unreachable.
    fn lower_bound(&self, _agent: usize, _v: Self::Vertex) -> u32 {
        0
    }
}

/// The original graph seen as an agent-uniform instance.
#[derive(Debug, Clone)]
pub struct OriginalGraphInstance<'g> {
    graph: &'g Graph,
    starts: Vec<VertexId>,
    goals: Vec<VertexId>,
    distance_to_goal: Vec<Vec<u32>>,
}

impl<'g> OriginalGraphInstance<'g> {
    pub fn new(graph: &'g Graph, starts: Vec<VertexId>, goals: Vec<VertexId>) -> Self {
        assert_eq!(starts.len(), goals.len(), "one goal per start");
        let preds = graph.predecessor_lists();
        let distance_to_goal = goals
            .iter()
            .map(|&g| reverse_distances(graph.vertex_count(), &preds, g))
            .collect();
        Self {
            graph,
            starts,
            goals,
            distance_to_goal,
        }
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn starts(&self) -> &[VertexId] {
        &self.starts
    }

    pub fn goals(&self) -> &[VertexId] {
        &self.goals
    }
}

fn reverse_distances(n: usize, preds: &[Vec<VertexId>], goal: VertexId) -> Vec<u32> {
    let mut dist = vec![u32::MAX; n];
    let mut queue = VecDeque::from([goal]);
    dist[goal as usize] = 0;
    while let Some(v) = queue.pop_front() {
        let d = dist[v as usize] + 1;
        for &u in &preds[v as usize] {
            if dist[u as usize] == u32::MAX {
                dist[u as usize] = d;
                queue.push_back(u);
            }
        }
    }
    dist
}

impl AgentEdges for OriginalGraphInstance<'_> {
    type Vertex = VertexId;

    fn agent_count(&self) -> usize {
        self.starts.len()
    }

    fn start(&self, agent: usize) -> VertexId {
        self.starts[agent]
    }

    fn goal(&self, agent: usize) -> VertexId {
        self.goals[agent]
    }

    fn successors(&self, _agent: usize, v: VertexId, out: &mut Vec<VertexId>) {
        out.extend_from_slice(self.graph.successors(v));
    }

    fn location(&self, v: VertexId) -> VertexId {
        v
    }

    fn lower_bound(&self, agent: usize, v: VertexId) -> u32 {
        self.distance_to_goal[agent][v as usize]
    }
}

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::graph::{Graph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("a plan needs at least one agent")]
    NoAgents,
    #[error("agent {agent}: path is empty")]
    EmptyPath { agent: usize },
    #[error("{paths} paths but {sources} sources and {goals} goals")]
    LengthMismatch {
        paths: usize,
        sources: usize,
        goals: usize,
    },
    #[error("agent {agent}: path starts at {found}, source is {expected}")]
    SourceMismatch {
        agent: usize,
        expected: VertexId,
        found: VertexId,
    },
    #[error("agent {agent}: path ends at {found}, goal is {expected}")]
    GoalMismatch {
        agent: usize,
        expected: VertexId,
        found: VertexId,
    },
    #[error("agent {agent}: step {index} uses missing edge ({from}, {to})")]
    MissingEdge {
        agent: usize,
        index: usize,
        from: VertexId,
        to: VertexId,
    },
}

/// How an agent whose path has ended is treated by collision checks.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "snake_case")]
pub enum TailSemantics {
    /// The agent keeps occupying its goal vertex forever.
    #[default]
    #[value(name = "stay")]
    StayAtGoal,
    /// The agent vanishes right after arriving.
    #[value(name = "disappear")]
    DisappearAtGoal,
}

impl TailSemantics {
    /// Location at timestep `t` of an agent following `path`.
    #[inline]
    pub fn position<V: Copy>(self, path: &[V], t: usize) -> Option<V> {
        match path.get(t) {
            Some(&v) => Some(v),
            None => match self {
                Self::StayAtGoal => path.last().copied(),
                Self::DisappearAtGoal => None,
            },
        }
    }
}

/// A non-empty vertex sequence; one vertex per timestep.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<VertexId>", into = "Vec<VertexId>")]
pub struct Path(Vec<VertexId>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("path is empty")]
pub struct EmptyPath;

impl TryFrom<Vec<VertexId>> for Path {
    type Error = EmptyPath;

    fn try_from(vertices: Vec<VertexId>) -> Result<Self, Self::Error> {
        if vertices.is_empty() {
            Err(EmptyPath)
        } else {
            Ok(Self(vertices))
        }
    }
}

impl From<Path> for Vec<VertexId> {
    fn from(path: Path) -> Self {
        path.0
    }
}

impl Path {
    pub fn new(vertices: Vec<VertexId>) -> Result<Self, EmptyPath> {
        Self::try_from(vertices)
    }

    pub fn single(v: VertexId) -> Self {
        Self(vec![v])
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    /// Number of vertices (timesteps) on the path.
    pub fn vertex_count(&self) -> usize {
        self.0.len()
    }

    /// Length in traversed edges: one less than the vertex count.
    pub fn cost(&self) -> usize {
        self.0.len() - 1
    }

    pub fn first(&self) -> VertexId {
        self.0[0]
    }

    pub fn last(&self) -> VertexId {
        self.0[self.0.len() - 1]
    }

    /// Vertex at 1-based `index`.
    pub fn at_index(&self, index: usize) -> Option<VertexId> {
        index.checked_sub(1).and_then(|i| self.0.get(i)).copied()
    }
}

impl AsRef<[VertexId]> for Path {
    fn as_ref(&self) -> &[VertexId] {
        &self.0
    }
}

impl std::ops::Deref for Path {
    type Target = [VertexId];

    fn deref(&self) -> &[VertexId] {
        &self.0
    }
}

/// True iff every consecutive pair of `path` is an edge of `graph`.
pub fn validate_path(graph: &Graph, path: &Path) -> bool {
    path.iter().all(|&v| graph.contains(v))
        && path.windows(2).all(|w| graph.has_edge(w[0], w[1]))
}

/// One path per agent, agent ids `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    paths: Vec<Path>,
    sources: Vec<VertexId>,
    goals: Vec<VertexId>,
}

impl Plan {
    pub fn new(
        paths: Vec<Path>,
        sources: Vec<VertexId>,
        goals: Vec<VertexId>,
    ) -> Result<Self, PlanError> {
        if paths.is_empty() {
            return Err(PlanError::NoAgents);
        }
        if paths.len() != sources.len() || paths.len() != goals.len() {
            return Err(PlanError::LengthMismatch {
                paths: paths.len(),
                sources: sources.len(),
                goals: goals.len(),
            });
        }
        for (agent, path) in paths.iter().enumerate() {
            if path.first() != sources[agent] {
                return Err(PlanError::SourceMismatch {
                    agent,
                    expected: sources[agent],
                    found: path.first(),
                });
            }
            if path.last() != goals[agent] {
                return Err(PlanError::GoalMismatch {
                    agent,
                    expected: goals[agent],
                    found: path.last(),
                });
            }
        }
        Ok(Self {
            paths,
            sources,
            goals,
        })
    }

    /// Plan whose sources and goals are the endpoints of `paths`.
    pub fn from_paths(paths: Vec<Path>) -> Result<Self, PlanError> {
        let sources = paths.iter().map(Path::first).collect();
        let goals = paths.iter().map(Path::last).collect();
        Self::new(paths, sources, goals)
    }

    /// Convenience for tests and fixtures.
    pub fn from_vertex_lists(lists: Vec<Vec<VertexId>>) -> Result<Self, PlanError> {
        let paths = lists
            .into_iter()
            .enumerate()
            .map(|(agent, l)| Path::new(l).map_err(|_| PlanError::EmptyPath { agent }))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_paths(paths)
    }

    pub fn agent_count(&self) -> usize {
        self.paths.len()
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn path(&self, agent: usize) -> &Path {
        &self.paths[agent]
    }

    pub fn sources(&self) -> &[VertexId] {
        &self.sources
    }

    pub fn goals(&self) -> &[VertexId] {
        &self.goals
    }

    /// Sum of path costs, ‖P‖.
    pub fn sum_of_costs(&self) -> u64 {
        self.paths.iter().map(|p| p.cost() as u64).sum()
    }

    /// Longest path cost, ℓ(P).
    pub fn length(&self) -> usize {
        self.paths.iter().map(Path::cost).max().unwrap_or(0)
    }

    /// Largest vertex count over all paths.
    pub fn horizon(&self) -> usize {
        self.paths.iter().map(Path::vertex_count).max().unwrap_or(0)
    }

    /// Checks every path against `graph`.
    pub fn validate_on(&self, graph: &Graph) -> Result<(), PlanError> {
        for (agent, path) in self.paths.iter().enumerate() {
            if !graph.contains(path.first()) {
                return Err(PlanError::MissingEdge {
                    agent,
                    index: 1,
                    from: path.first(),
                    to: path.first(),
                });
            }
            for (i, w) in path.windows(2).enumerate() {
                if !graph.has_edge(w[0], w[1]) {
                    return Err(PlanError::MissingEdge {
                        agent,
                        index: i + 1,
                        from: w[0],
                        to: w[1],
                    });
                }
            }
        }
        Ok(())
    }

    pub fn into_paths(self) -> Vec<Path> {
        self.paths
    }
}

/// ‖P‖, the sum of individual path costs.
pub fn sum_of_costs(plan: &Plan) -> u64 {
    plan.sum_of_costs()
}

/// ℓ(P), the longest individual path cost.
pub fn plan_length(plan: &Plan) -> usize {
    plan.length()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_path_examples() {
        let loop_only = Graph::new(1, [(0, 0)]).unwrap();
        assert!(validate_path(&loop_only, &Path::new(vec![0, 0]).unwrap()));

        let one_way = Graph::new(2, [(0, 1)]).unwrap();
        assert!(!validate_path(&one_way, &Path::new(vec![1, 0]).unwrap()));

        let cycle = Graph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(!validate_path(&cycle, &Path::new(vec![0, 0]).unwrap()));
        assert!(validate_path(&cycle, &Path::new(vec![0, 1, 2, 0]).unwrap()));
    }

    #[test]
    fn sum_of_costs_counts_edges() {
        let plan = Plan::from_vertex_lists(vec![
            vec![0, 1, 2, 3],
            vec![4, 5, 6, 7],
            vec![8, 9, 10, 11, 12, 13],
        ])
        .unwrap();
        assert_eq!(sum_of_costs(&plan), 11);
        assert_eq!(plan_length(&plan), 5);

        let single = Plan::from_vertex_lists(vec![vec![3]]).unwrap();
        assert_eq!(sum_of_costs(&single), 0);
        assert_eq!(plan_length(&single), 0);
    }

    #[test]
    fn plan_invariants() {
        assert_eq!(Plan::from_paths(vec![]), Err(PlanError::NoAgents));
        let p = Path::new(vec![0, 1]).unwrap();
        assert!(matches!(
            Plan::new(vec![p.clone()], vec![1], vec![1]),
            Err(PlanError::SourceMismatch { agent: 0, .. })
        ));
        assert!(matches!(
            Plan::new(vec![p], vec![0], vec![0]),
            Err(PlanError::GoalMismatch { agent: 0, .. })
        ));
        assert!(Path::new(vec![]).is_err());
    }

    #[test]
    fn tail_positions() {
        let path = [4u32, 5, 6];
        assert_eq!(TailSemantics::StayAtGoal.position(&path, 7), Some(6));
        assert_eq!(TailSemantics::DisappearAtGoal.position(&path, 3), None);
        assert_eq!(TailSemantics::DisappearAtGoal.position(&path, 2), Some(6));
    }
}

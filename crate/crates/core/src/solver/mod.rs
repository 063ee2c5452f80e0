//! Conflict-Based Search and prioritized planning over per-agent edge sets.

mod cbs;
mod constraints;
mod instance;
mod low_level;
mod prioritized;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use cbs::cbs_solve;
pub use constraints::{Constraint, ConstraintKind, ConstraintTable};
pub use instance::{AgentEdges, OriginalGraphInstance};
pub use low_level::{low_level_search, LowLevelResult, SearchLimits};
pub use prioritized::{prioritized_solve, InvalidOrder};

use crate::mapf::{Plan, TailSemantics, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Solved,
    Timeout,
    Infeasible,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Solved => "solved",
            Self::Timeout => "timeout",
            Self::Infeasible => "infeasible",
        }
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum,
)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Cbs,
    Prioritized,
}

impl SolverKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Cbs => "cbs",
            Self::Prioritized => "prioritized",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    /// High-level nodes split (CBS) or zero (prioritized).
    pub expansions: u64,
    pub generated: u64,
    pub low_level_calls: u64,
    pub wall: Duration,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub semantics: TailSemantics,
    pub time_limit: Option<Duration>,
    /// Largest arrival timestep any single path may have.
    pub horizon_cap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution<V> {
    pub status: SolveStatus,
    /// Empty unless solved.
    pub paths: Vec<Vec<V>>,
    pub soc: u64,
    pub stats: SolverStats,
}

impl<V> Solution<V> {
    pub(crate) fn failed(status: SolveStatus, mut stats: SolverStats, started: Instant) -> Self {
        stats.wall = started.elapsed();
        Self {
            status,
            paths: Vec::new(),
            soc: 0,
            stats,
        }
    }

    pub fn is_solved(&self) -> bool {
        self.status == SolveStatus::Solved
    }
}

impl<V: Copy> Solution<V> {
    /// Physical vertex sequences of the solved paths.
    pub fn locations<I: AgentEdges<Vertex = V>>(&self, instance: &I) -> Vec<Vec<VertexId>> {
        self.paths
            .iter()
            .map(|p| p.iter().map(|&v| instance.location(v)).collect())
            .collect()
    }
}

/// `ℓ(P) + d(n−1)` when the injected delay count `d` is known, otherwise
/// `ℓ(P) + (n−1)‖P‖`.
pub fn horizon_bound(plan: &Plan, injected_delays: Option<u64>) -> usize {
    let n = plan.agent_count() as u64;
    let budget = match injected_delays {
        Some(d) => d * (n - 1),
        None => (n - 1) * plan.sum_of_costs(),
    };
    plan.length() + budget as usize
}

use thiserror::Error;

use super::{AgentEdgeInstance, StepVertex};
use crate::mapf::{DelayAssignment, Path, Plan};
use crate::solver::AgentEdges;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error("agent {agent}: solution path is not a delay of the original at position {position}")]
    NotADelayOfOriginal { agent: usize, position: usize },
    #[error("{given} solution paths for {agents} agents")]
    AgentCountMismatch { given: usize, agents: usize },
}

/// A step-indexed solution mapped back onto the original graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedRepair {
    pub plan: Plan,
    pub delays: Vec<DelayAssignment>,
    /// `‖P′‖ − ‖P‖`, equal to the total number of introduced waits.
    pub added_soc: u64,
}

/// Projects `(v, j)` to `v` and reads off how often each index was repeated.
pub fn lift_solution(
    instance: &AgentEdgeInstance,
    solution: &[Vec<StepVertex>],
) -> Result<LiftedRepair, LiftError> {
    if solution.len() != instance.agent_count() {
        return Err(LiftError::AgentCountMismatch {
            given: solution.len(),
            agents: instance.agent_count(),
        });
    }
    let mut paths = Vec::with_capacity(solution.len());
    let mut delays = Vec::with_capacity(solution.len());
    for (agent, steps) in solution.iter().enumerate() {
        let bad = |position| LiftError::NotADelayOfOriginal { agent, position };
        if steps.first() != Some(&instance.start(agent)) {
            return Err(bad(0));
        }
        if steps.last() != Some(&instance.goal(agent)) {
            return Err(bad(steps.len().saturating_sub(1)));
        }
        let mut d = DelayAssignment::new();
        for (pos, w) in steps.windows(2).enumerate() {
            let (u, v) = (w[0], w[1]);
            if u == v && instance.has_loop(agent, u.step as usize) {
                d.add(u.step as usize, 1);
            } else {
                let original = instance.original_path(agent);
                let ok = v.step == u.step + 1
                    && original.get(u.step as usize - 1) == Some(&u.vertex)
                    && original.get(v.step as usize - 1) == Some(&v.vertex);
                if !ok {
                    return Err(bad(pos + 1));
                }
            }
        }
        paths.push(Path::new(steps.iter().map(|s| s.vertex).collect()).map_err(|_| bad(0))?);
        delays.push(d);
    }
    let added_soc = delays.iter().map(DelayAssignment::total).sum();
    let plan = Plan::from_paths(paths).expect("starts and goals already checked");
    Ok(LiftedRepair {
        plan,
        delays,
        added_soc,
    })
}

use super::InjectionRecord;
use crate::mapf::{apply_plan_delays, DelayAssignment, DelayError, DelayPermissions, Graph, Plan};

/// The synchronizing repair: whenever an agent was held up, every other
/// agent still on its way waits the same number of steps where it stood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaltAllRepair {
    pub plan: Plan,
    /// Delays relative to the colliding plan.
    pub delays: Vec<DelayAssignment>,
    pub added_soc: u64,
}

/// 1-based index on the colliding path of `agent` that holds position
/// `step` of the undelayed path.
fn delayed_index(injections: &[InjectionRecord], agent: usize, step: usize) -> usize {
    let shift: u64 = injections
        .iter()
        .filter(|r| r.agent == agent && r.step < step)
        .map(|r| r.length as u64)
        .sum();
    step + 1 + shift as usize
}

/// Undoes `injections` by freezing everybody else during each one.
///
/// `plan` is the colliding plan obtained by applying `injections` to a
/// non-colliding plan.
pub fn halt_all_repair(
    graph: &Graph,
    plan: &Plan,
    injections: &[InjectionRecord],
    permissions: &DelayPermissions,
) -> Result<HaltAllRepair, DelayError> {
    let n = plan.agent_count();
    let mut own = vec![0u64; n];
    for r in injections {
        own[r.agent] += r.length as u64;
    }
    let mut delays = vec![DelayAssignment::new(); n];
    for r in injections {
        for (b, d) in delays.iter_mut().enumerate() {
            if b == r.agent {
                continue;
            }
            let undelayed_len = plan.path(b).vertex_count() - own[b] as usize;
            if r.step + 1 < undelayed_len {
                d.add(delayed_index(injections, b, r.step), r.length);
            }
        }
    }
    let repaired = apply_plan_delays(graph, plan, permissions, &delays)?;
    let added_soc = delays.iter().map(DelayAssignment::total).sum();
    Ok(HaltAllRepair {
        plan: repaired,
        delays,
        added_soc,
    })
}

/// Indices that [`halt_all_repair`] delays, per agent.
pub fn halt_all_indices(plan: &Plan, injections: &[InjectionRecord]) -> Vec<Vec<usize>> {
    let n = plan.agent_count();
    let mut own = vec![0usize; n];
    for r in injections {
        own[r.agent] += r.length as usize;
    }
    let mut out = vec![Vec::new(); n];
    for r in injections {
        for (b, idx) in out.iter_mut().enumerate() {
            if b != r.agent && r.step + 1 < plan.path(b).vertex_count() - own[b] {
                idx.push(delayed_index(injections, b, r.step));
            }
        }
    }
    for idx in &mut out {
        idx.sort_unstable();
        idx.dedup();
    }
    out
}

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mapf::{apply_delays, find_conflicts, DelayAssignment, Graph, Plan, TailSemantics};

/// One injected delay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InjectionRecord {
    pub agent: usize,
    /// 0-based position on the agent's undelayed path, `0 < step < m_i`.
    pub step: usize,
    /// Number of extra timesteps spent at that position.
    pub length: u32,
    /// Earliest conflict timestep inside `(step, m_i)`.
    pub conflict_timestep: usize,
}

impl InjectionRecord {
    /// The injection as a delay on the undelayed path.
    pub fn as_delay(&self) -> DelayAssignment {
        DelayAssignment::from_pairs([(self.step + 1, self.length)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no collision-inducing delay found after {attempts} attempts")]
pub struct NoneFound {
    pub attempts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InjectionOptions {
    pub semantics: TailSemantics,
    /// Length of each injected delay.
    pub length: u32,
    /// Sampling attempts per injection; `None` means `10·n·ℓ(P)`.
    pub max_attempts: Option<usize>,
}

impl Default for InjectionOptions {
    fn default() -> Self {
        Self {
            semantics: TailSemantics::StayAtGoal,
            length: 1,
            max_attempts: None,
        }
    }
}

fn attempt_budget(plan: &Plan, options: &InjectionOptions) -> usize {
    options
        .max_attempts
        .unwrap_or_else(|| (10 * plan.agent_count() * plan.length()).max(1))
}

fn with_delays(graph: &Graph, plan: &Plan, delays: &[DelayAssignment]) -> Option<Plan> {
    let paths = plan
        .paths()
        .iter()
        .zip(delays)
        .map(|(p, d)| apply_delays(graph, p, None, d).ok())
        .collect::<Option<Vec<_>>>()?;
    Some(Plan::new(paths, plan.sources().to_vec(), plan.goals().to_vec()).expect("endpoints kept"))
}

/// Tries `(agent, step)` and returns the record when the delay causes a
/// conflict strictly between `step` and `m_i`.
fn try_injection(
    graph: &Graph,
    plan: &Plan,
    agent: usize,
    step: usize,
    options: &InjectionOptions,
) -> Option<(Plan, InjectionRecord)> {
    let m = plan.path(agent).vertex_count();
    if step == 0 || step >= m || !graph.is_delay_vertex(plan.path(agent)[step]) {
        return None;
    }
    let mut delays = vec![DelayAssignment::new(); plan.agent_count()];
    delays[agent] = DelayAssignment::from_pairs([(step + 1, options.length)]);
    let delayed = with_delays(graph, plan, &delays)?;
    let t = find_conflicts(&delayed, options.semantics, false)
        .into_iter()
        .map(|c| c.timestep)
        .find(|&t| step < t && t < m)?;
    Some((
        delayed,
        InjectionRecord {
            agent,
            step,
            length: options.length,
            conflict_timestep: t,
        },
    ))
}

/// Samples `(agent, step)` uniformly until a delay there makes the plan
/// collide.
pub fn inject_collision_inducing_delay<R: Rng + ?Sized>(
    graph: &Graph,
    plan: &Plan,
    rng: &mut R,
    options: &InjectionOptions,
) -> Result<(Plan, InjectionRecord), NoneFound> {
    let attempts = attempt_budget(plan, options);
    for _ in 0..attempts {
        let agent = rng.gen_range(0..plan.agent_count());
        let m = plan.path(agent).vertex_count();
        if m < 2 {
            continue;
        }
        let step = rng.gen_range(1..m);
        if let Some(found) = try_injection(graph, plan, agent, step, options) {
            return Ok(found);
        }
    }
    Err(NoneFound { attempts })
}

/// `count` injections, each accepted against the undelayed plan, applied
/// together. Distinct agents are preferred while the attempt budget allows.
pub fn inject_multiple_delays<R: Rng + ?Sized>(
    graph: &Graph,
    plan: &Plan,
    count: usize,
    rng: &mut R,
    options: &InjectionOptions,
) -> Result<(Plan, Vec<InjectionRecord>), NoneFound> {
    if count == 1 {
        return inject_collision_inducing_delay(graph, plan, rng, options).map(|(p, r)| (p, vec![r]));
    }
    let per_injection = attempt_budget(plan, options);
    const ROUNDS: usize = 10;
    let mut total = 0;
    for _ in 0..ROUNDS {
        let mut records: Vec<InjectionRecord> = Vec::with_capacity(count);
        let mut used = vec![false; plan.agent_count()];
        for _ in 0..count {
            let mut accepted = None;
            for attempt in 0..per_injection {
                total += 1;
                let agent = rng.gen_range(0..plan.agent_count());
                let m = plan.path(agent).vertex_count();
                if m < 2 {
                    continue;
                }
                let step = rng.gen_range(1..m);
                let prefer_new = attempt < per_injection / 2 && used.iter().any(|u| !u);
                if prefer_new && used[agent] {
                    continue;
                }
                if records.iter().any(|r| r.agent == agent && r.step == step) {
                    continue;
                }
                if let Some((_, rec)) = try_injection(graph, plan, agent, step, options) {
                    accepted = Some(rec);
                    break;
                }
            }
            let rec = accepted.ok_or(NoneFound { attempts: total })?;
            used[rec.agent] = true;
            records.push(rec);
        }
        let combined = apply_injections(graph, plan, &records);
        if !find_conflicts(&combined, options.semantics, true).is_empty() {
            return Ok((combined, records));
        }
    }
    Err(NoneFound { attempts: total })
}

/// Applies recorded injections to the undelayed plan.
pub fn apply_injections(graph: &Graph, plan: &Plan, records: &[InjectionRecord]) -> Plan {
    let mut delays = vec![DelayAssignment::new(); plan.agent_count()];
    for r in records {
        delays[r.agent].add(r.step + 1, r.length);
    }
    with_delays(graph, plan, &delays).expect("recorded injections sit on delay vertices")
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::OracleError;
use crate::mapf::{
    ConflictScanner, DelayAssignment, DelayPermissions, Graph, Plan, TailSemantics, VertexId,
};

/// How `brute_force_acid` enumerates candidate repairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OracleStrategy {
    /// Every distribution of `D` repetitions over the eligible indices.
    StarsAndBars,
    /// Time-layered exhaustive search over joint path progress.
    Timeline,
    /// Stars-and-bars while a budget level is small, timeline beyond.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AcidOracleOptions {
    pub semantics: TailSemantics,
    /// Caller cap on the total budget; the effective cap is the smaller of
    /// this and `(n−1)‖P‖`.
    pub max_budget: Option<u64>,
    pub strategy: OracleStrategy,
    /// Largest number of eligible (agent, index) slots stars-and-bars accepts.
    pub slot_guard: usize,
    /// Largest single time layer the timeline search accepts.
    pub state_guard: usize,
}

impl Default for AcidOracleOptions {
    fn default() -> Self {
        Self {
            semantics: TailSemantics::StayAtGoal,
            max_budget: None,
            strategy: OracleStrategy::Auto,
            slot_guard: 24,
            state_guard: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AcidOutcome {
    Optimal {
        min_delay: u64,
        witness: Vec<DelayAssignment>,
    },
    /// No repair within `budget` delays.
    Unsolvable { budget: u64 },
}

impl AcidOutcome {
    pub fn min_delay(&self) -> Option<u64> {
        match self {
            Self::Optimal { min_delay, .. } => Some(*min_delay),
            Self::Unsolvable { .. } => None,
        }
    }
}

/// `(agent, 1-based index)` pairs where a repetition is allowed and can
/// matter: permitted, on a delay vertex, and not the final index.
pub fn eligible_slots(graph: &Graph, plan: &Plan, permissions: &DelayPermissions) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (agent, path) in plan.paths().iter().enumerate() {
        for j in 1..path.vertex_count() {
            if permissions.allows(agent, j) && graph.is_delay_vertex(path[j - 1]) {
                out.push((agent, j));
            }
        }
    }
    out
}

fn lemma_budget(plan: &Plan) -> u64 {
    (plan.agent_count() as u64 - 1) * plan.sum_of_costs()
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Exact minimum number of waits that makes `plan` collision free.
///
/// Budgets are tried in increasing order, so the first repair found is
/// optimal.
pub fn brute_force_acid(
    graph: &Graph,
    plan: &Plan,
    permissions: &DelayPermissions,
    options: &AcidOracleOptions,
) -> Result<AcidOutcome, OracleError> {
    let cap = options
        .max_budget
        .map_or(lemma_budget(plan), |c| c.min(lemma_budget(plan)));
    let slots = eligible_slots(graph, plan, permissions);
    let mut checker = Checker::new(plan, options.semantics);

    let stars_first = match options.strategy {
        OracleStrategy::StarsAndBars => {
            if slots.len() > options.slot_guard {
                return Err(OracleError::InstanceTooLarge {
                    what: "eligible delay slots",
                    size: slots.len(),
                    limit: options.slot_guard,
                });
            }
            true
        }
        OracleStrategy::Timeline => false,
        OracleStrategy::Auto => slots.len() <= options.slot_guard,
    };

    let mut from = 0;
    if stars_first {
        const AUTO_LEVEL_LIMIT: u64 = 200_000;
        for d in 0..=cap {
            let level = if slots.is_empty() {
                u64::from(d == 0)
            } else {
                binomial(d + slots.len() as u64 - 1, slots.len() as u64 - 1)
            };
            if options.strategy == OracleStrategy::Auto && level > AUTO_LEVEL_LIMIT {
                from = d;
                break;
            }
            if let Some(witness) = stars_and_bars_level(plan, &slots, d, &mut checker) {
                return Ok(AcidOutcome::Optimal {
                    min_delay: d,
                    witness,
                });
            }
            from = d + 1;
        }
        if from > cap {
            return Ok(AcidOutcome::Unsolvable { budget: cap });
        }
    }
    timeline(graph, plan, permissions, options, from, cap)
}

/// Collision check on explicit location sequences with reusable buffers.
struct Checker {
    scanner: ConflictScanner,
    semantics: TailSemantics,
    base: Vec<Vec<VertexId>>,
    buf: Vec<Vec<VertexId>>,
}

impl Checker {
    fn new(plan: &Plan, semantics: TailSemantics) -> Self {
        let base: Vec<Vec<VertexId>> = plan.paths().iter().map(|p| p.vertices().to_vec()).collect();
        Self {
            scanner: ConflictScanner::default(),
            semantics,
            buf: base.clone(),
            base,
        }
    }

    fn collides_with(&mut self, counts: &[(usize, usize, u32)]) -> bool {
        for (agent, path) in self.base.iter().enumerate() {
            let out = &mut self.buf[agent];
            out.clear();
            out.extend_from_slice(path);
        }
        // counts are sorted by (agent, index); expand from the back so
        // earlier indices stay valid.
        for &(agent, index, k) in counts.iter().rev() {
            if k > 0 {
                let v = self.buf[agent][index - 1];
                let tail = self.buf[agent].split_off(index);
                self.buf[agent].extend(std::iter::repeat_n(v, k as usize));
                self.buf[agent].extend(tail);
            }
        }
        !self.scanner.scan(&self.buf, self.semantics, true).is_empty()
    }
}

fn to_witness(n: usize, counts: &[(usize, usize, u32)]) -> Vec<DelayAssignment> {
    let mut out = vec![DelayAssignment::new(); n];
    for &(agent, index, k) in counts {
        out[agent].add(index, k);
    }
    out
}

fn stars_and_bars_level(
    plan: &Plan,
    slots: &[(usize, usize)],
    d: u64,
    checker: &mut Checker,
) -> Option<Vec<DelayAssignment>> {
    let mut counts: Vec<(usize, usize, u32)> = slots.iter().map(|&(a, j)| (a, j, 0)).collect();
    if d == 0 {
        return (!checker.collides_with(&counts)).then(|| to_witness(plan.agent_count(), &counts));
    }
    if slots.is_empty() {
        return None;
    }
    fn rec(
        i: usize,
        left: u32,
        counts: &mut Vec<(usize, usize, u32)>,
        checker: &mut Checker,
    ) -> bool {
        if i + 1 == counts.len() {
            counts[i].2 = left;
            let ok = !checker.collides_with(counts);
            if !ok {
                counts[i].2 = 0;
            }
            return ok;
        }
        for k in (0..=left).rev() {
            counts[i].2 = k;
            if rec(i + 1, left - k, counts, checker) {
                return true;
            }
        }
        counts[i].2 = 0;
        false
    }
    rec(0, d as u32, &mut counts, checker).then(|| to_witness(plan.agent_count(), &counts))
}

/// Progress of one agent along its path: 1-based index, or `len + 1` once
/// it has vanished.
type Joint = Vec<u32>;

struct Layer {
    // state -> (cost, parent state in the previous layer)
    states: BTreeMap<Joint, (u64, Option<Joint>)>,
}

fn timeline(
    graph: &Graph,
    plan: &Plan,
    permissions: &DelayPermissions,
    options: &AcidOracleOptions,
    from: u64,
    cap: u64,
) -> Result<AcidOutcome, OracleError> {
    let n = plan.agent_count();
    let paths: Vec<&[VertexId]> = plan.paths().iter().map(|p| p.vertices()).collect();
    let lens: Vec<u32> = paths.iter().map(|p| p.len() as u32).collect();
    let can_wait: Vec<Vec<bool>> = (0..n)
        .map(|a| {
            (1..=paths[a].len())
                .map(|j| {
                    j < paths[a].len()
                        && permissions.allows(a, j)
                        && graph.is_delay_vertex(paths[a][j - 1])
                })
                .collect()
        })
        .collect();
    let stay = options.semantics == TailSemantics::StayAtGoal;
    let position = |a: usize, idx: u32| -> Option<VertexId> {
        (idx <= lens[a]).then(|| paths[a][idx as usize - 1])
    };
    let done = |s: &Joint| (0..n).all(|a| s[a] >= lens[a]);

    let start: Joint = vec![1; n];
    {
        let mut seen: Vec<VertexId> = (0..n).filter_map(|a| position(a, 1)).collect();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Ok(AcidOutcome::Unsolvable { budget: cap });
        }
    }

    // Each level is an exact search bounded by that budget.
    let mut budget = from;
    loop {
        if let Some((cost, witness)) = timeline_bounded(
            n,
            &lens,
            &can_wait,
            stay,
            &position,
            &done,
            start.clone(),
            budget,
            options.state_guard,
        )? {
            return Ok(AcidOutcome::Optimal {
                min_delay: cost,
                witness,
            });
        }
        if budget >= cap {
            return Ok(AcidOutcome::Unsolvable { budget: cap });
        }
        budget += 1;
    }
}

#[allow(clippy::too_many_arguments)]
fn timeline_bounded(
    n: usize,
    lens: &[u32],
    can_wait: &[Vec<bool>],
    stay: bool,
    position: &dyn Fn(usize, u32) -> Option<VertexId>,
    done: &dyn Fn(&Joint) -> bool,
    start: Joint,
    budget: u64,
    state_guard: usize,
) -> Result<Option<(u64, Vec<DelayAssignment>)>, OracleError> {
    let mut layers = vec![Layer {
        states: BTreeMap::from([(start, (0, None))]),
    }];
    let mut best: Option<(u64, usize, Joint)> = None;
    let mut next_pos: Vec<Option<VertexId>> = vec![None; n];
    let mut occupied: Vec<VertexId> = Vec::with_capacity(n);

    loop {
        let t = layers.len() - 1;
        let current = &layers[t].states;
        for (s, &(cost, _)) in current {
            if done(s) && best.as_ref().is_none_or(|b| cost < b.0) {
                best = Some((cost, t, s.clone()));
            }
        }
        let bound = best.as_ref().map_or(budget, |b| b.0.saturating_sub(1));
        let mut next: BTreeMap<Joint, (u64, Option<Joint>)> = BTreeMap::new();
        for (s, &(cost, _)) in current {
            if done(s) || cost > bound {
                continue;
            }
            let movers: Vec<usize> = (0..n).filter(|&a| s[a] < lens[a]).collect();
            let waiters: Vec<usize> = movers
                .iter()
                .copied()
                .filter(|&a| can_wait[a][s[a] as usize - 1])
                .collect();
            for mask in 0u32..(1 << waiters.len()) {
                let waits = mask.count_ones() as u64;
                if cost + waits > bound {
                    continue;
                }
                let mut ns = s.clone();
                for &a in &movers {
                    ns[a] += 1;
                }
                for (bit, &a) in waiters.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        ns[a] -= 1;
                    }
                }
                // Agents that arrived at the previous step vanish now.
                for a in 0..n {
                    if !stay && s[a] == lens[a] {
                        ns[a] = lens[a] + 1;
                    }
                }
                occupied.clear();
                for a in 0..n {
                    next_pos[a] = position(a, ns[a]);
                    if let Some(v) = next_pos[a] {
                        occupied.push(v);
                    }
                }
                occupied.sort_unstable();
                if occupied.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                let swap = movers.iter().any(|&a| {
                    let (u, w) = (position(a, s[a]), position(a, ns[a]));
                    u != w
                        && movers.iter().any(|&b| {
                            b != a && position(b, s[b]) == w && position(b, ns[b]) == u
                        })
                });
                if swap {
                    continue;
                }
                let entry = next.entry(ns).or_insert((u64::MAX, None));
                if cost + waits < entry.0 {
                    *entry = (cost + waits, Some(s.clone()));
                }
            }
        }
        if next.is_empty() {
            break;
        }
        if next.len() > state_guard {
            return Err(OracleError::InstanceTooLarge {
                what: "timeline layer states",
                size: next.len(),
                limit: state_guard,
            });
        }
        layers.push(Layer { states: next });
    }

    let Some((cost, t, state)) = best else {
        return Ok(None);
    };
    let mut witness = vec![DelayAssignment::new(); n];
    let mut s = state;
    for layer in (1..=t).rev() {
        let parent = layers[layer].states[&s].1.clone().expect("non-root has a parent");
        for a in 0..n {
            if parent[a] == s[a] && parent[a] < lens[a] {
                witness[a].add(parent[a] as usize, 1);
            }
        }
        s = parent;
    }
    Ok(Some((cost, witness)))
}

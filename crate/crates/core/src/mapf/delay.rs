use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::graph::Graph;
use super::plan::{Path, Plan};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DelayError {
    #[error("delay at index {index} is not permitted")]
    DelayNotPermitted { index: usize },
    #[error("delay index {index} is outside the path (1..={len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("path is not a delay of the original at position {position}")]
    NotADelay { position: usize },
    #[error("{given} delay assignments for {agents} agents")]
    AgentCountMismatch { given: usize, agents: usize },
}

/// Extra repetitions per 1-based path index; a d-delay with `d = total()`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DelayAssignment {
    per_index: BTreeMap<usize, u32>,
}

impl DelayAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut out = Self::new();
        for (index, count) in pairs {
            out.add(index, count);
        }
        out
    }

    pub fn add(&mut self, index: usize, count: u32) {
        if count > 0 {
            *self.per_index.entry(index).or_default() += count;
        }
    }

    /// Repetitions at `index` (0 when absent).
    pub fn get(&self, index: usize) -> u32 {
        self.per_index.get(&index).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.per_index.values().map(|&k| k as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.per_index.is_empty()
    }

    /// Non-zero entries in index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.per_index.iter().map(|(&i, &k)| (i, k))
    }

    pub fn merged(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, k) in other.iter() {
            out.add(i, k);
        }
        out
    }
}

/// Per-agent delay-permitted index sets. `None` means every index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelayPermissions {
    per_agent: Vec<Option<BTreeSet<usize>>>,
}

impl DelayPermissions {
    pub fn unrestricted(agent_count: usize) -> Self {
        Self {
            per_agent: vec![None; agent_count],
        }
    }

    pub fn from_sets(sets: Vec<BTreeSet<usize>>) -> Self {
        Self {
            per_agent: sets.into_iter().map(Some).collect(),
        }
    }

    pub fn from_options(sets: Vec<Option<BTreeSet<usize>>>) -> Self {
        Self { per_agent: sets }
    }

    pub fn agent_count(&self) -> usize {
        self.per_agent.len()
    }

    pub fn agent(&self, agent: usize) -> Option<&BTreeSet<usize>> {
        self.per_agent.get(agent).and_then(Option::as_ref)
    }

    pub fn allows(&self, agent: usize, index: usize) -> bool {
        match self.per_agent.get(agent) {
            Some(Some(set)) => set.contains(&index),
            Some(None) => true,
            None => false,
        }
    }

    pub fn as_options(&self) -> &[Option<BTreeSet<usize>>] {
        &self.per_agent
    }
}

/// Builds `v1 v1^k1 v2 v2^k2 ... vm vm^km`.
///
/// Every repeated index must be permitted and sit on a vertex with a
/// self-loop.
pub fn apply_delays(
    graph: &Graph,
    path: &Path,
    permitted: Option<&BTreeSet<usize>>,
    delays: &DelayAssignment,
) -> Result<Path, DelayError> {
    let len = path.vertex_count();
    for (index, _) in delays.iter() {
        if index == 0 || index > len {
            return Err(DelayError::IndexOutOfRange { index, len });
        }
        let allowed = permitted.is_none_or(|set| set.contains(&index));
        if !allowed || !graph.is_delay_vertex(path[index - 1]) {
            return Err(DelayError::DelayNotPermitted { index });
        }
    }
    let mut out = Vec::with_capacity(len + delays.total() as usize);
    for (i, &v) in path.iter().enumerate() {
        out.extend(std::iter::repeat_n(v, 1 + delays.get(i + 1) as usize));
    }
    Ok(Path::new(out).expect("non-empty input"))
}

/// Applies one assignment per agent.
pub fn apply_plan_delays(
    graph: &Graph,
    plan: &Plan,
    permissions: &DelayPermissions,
    delays: &[DelayAssignment],
) -> Result<Plan, DelayError> {
    if delays.len() != plan.agent_count() {
        return Err(DelayError::AgentCountMismatch {
            given: delays.len(),
            agents: plan.agent_count(),
        });
    }
    let paths = plan
        .paths()
        .iter()
        .zip(delays)
        .enumerate()
        .map(|(agent, (path, d))| apply_delays(graph, path, permissions.agent(agent), d))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Plan::new(paths, plan.sources().to_vec(), plan.goals().to_vec())
        .expect("delays keep endpoints"))
}

/// Inverse of [`apply_delays`]: removes the repetitions named by `delays`.
pub fn strip_delays(delayed: &Path, delays: &DelayAssignment) -> Result<Path, DelayError> {
    let mut out = Vec::with_capacity(delayed.vertex_count());
    let mut pos = 0;
    let mut index = 1;
    while pos < delayed.vertex_count() {
        let v = delayed[pos];
        out.push(v);
        let extra = delays.get(index) as usize;
        for k in 1..=extra {
            if delayed.get(pos + k) != Some(&v) {
                return Err(DelayError::NotADelay { position: pos + k });
            }
        }
        pos += 1 + extra;
        index += 1;
    }
    if let Some((last, _)) = delays.iter().last() {
        if last > out.len() {
            return Err(DelayError::IndexOutOfRange {
                index: last,
                len: out.len(),
            });
        }
    }
    Ok(Path::new(out).expect("non-empty input"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapf::VertexId;

    fn line_with_loops() -> Graph {
        // a=0, b=1, c=2; self-loops everywhere.
        Graph::new(3, [(0, 1), (1, 2), (0, 0), (1, 1), (2, 2)]).unwrap()
    }

    fn path(v: &[VertexId]) -> Path {
        Path::new(v.to_vec()).unwrap()
    }

    #[test]
    fn apply_delays_examples() {
        let g = line_with_loops();
        let p = path(&[0, 1, 2]);
        let one = DelayAssignment::from_pairs([(2, 1)]);
        assert_eq!(apply_delays(&g, &p, None, &one).unwrap(), path(&[0, 1, 1, 2]));
        assert_eq!(
            apply_delays(&g, &p, None, &DelayAssignment::new()).unwrap(),
            p
        );
        let two = DelayAssignment::from_pairs([(1, 2)]);
        assert_eq!(
            apply_delays(&g, &p, None, &two).unwrap(),
            path(&[0, 0, 0, 1, 2])
        );
    }

    #[test]
    fn apply_delays_rejects_forbidden_indices() {
        let g = line_with_loops();
        let p = path(&[0, 1, 2]);
        let permitted = BTreeSet::from([1]);
        let d = DelayAssignment::from_pairs([(2, 1)]);
        assert_eq!(
            apply_delays(&g, &p, Some(&permitted), &d),
            Err(DelayError::DelayNotPermitted { index: 2 })
        );
        let no_loop = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            apply_delays(&no_loop, &p, None, &d),
            Err(DelayError::DelayNotPermitted { index: 2 })
        );
        let far = DelayAssignment::from_pairs([(4, 1)]);
        assert!(matches!(
            apply_delays(&g, &p, None, &far),
            Err(DelayError::IndexOutOfRange { index: 4, .. })
        ));
    }

    #[test]
    fn strip_inverts_apply() {
        let g = line_with_loops();
        let p = path(&[0, 1, 1, 2]);
        let d = DelayAssignment::from_pairs([(1, 1), (3, 2)]);
        let delayed = apply_delays(&g, &p, None, &d).unwrap();
        assert_eq!(delayed, path(&[0, 0, 1, 1, 1, 1, 2]));
        assert_eq!(strip_delays(&delayed, &d).unwrap(), p);
        assert!(strip_delays(&p, &DelayAssignment::from_pairs([(1, 1)])).is_err());
    }

    #[test]
    fn assignment_bookkeeping() {
        let mut d = DelayAssignment::new();
        d.add(3, 0);
        assert!(d.is_empty());
        d.add(3, 2);
        d.add(1, 1);
        d.add(3, 1);
        assert_eq!(d.total(), 4);
        assert_eq!(d.iter().collect::<Vec<_>>(), vec![(1, 1), (3, 3)]);
    }
}

use serde::{Deserialize, Serialize};

use super::graph::VertexId;
use super::plan::{Plan, TailSemantics};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictKind {
    Vertex,
    Edge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictLocation {
    Vertex(VertexId),
    /// Directed edge as traversed by the lower-numbered agent.
    Edge(VertexId, VertexId),
}

/// A vertex collision at `timestep`, or a swap between `timestep` and
/// `timestep + 1`. `agents.0 < agents.1` always.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Conflict {
    pub agents: (usize, usize),
    pub timestep: usize,
    pub location: ConflictLocation,
}

impl Conflict {
    pub fn kind(&self) -> ConflictKind {
        match self.location {
            ConflictLocation::Vertex(_) => ConflictKind::Vertex,
            ConflictLocation::Edge(..) => ConflictKind::Edge,
        }
    }

    fn order_key(&self) -> (usize, (usize, usize), ConflictKind, ConflictLocation) {
        (self.timestep, self.agents, self.kind(), self.location)
    }
}

impl std::fmt::Display for Conflict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.location {
            ConflictLocation::Vertex(v) => write!(
                f,
                "vertex conflict: agents {} and {} at vertex {} (t={})",
                self.agents.0, self.agents.1, v, self.timestep
            ),
            ConflictLocation::Edge(u, v) => write!(
                f,
                "edge conflict: agents {} and {} swap over ({}, {}) (t={})",
                self.agents.0, self.agents.1, u, v, self.timestep
            ),
        }
    }
}

/// Collisions in `plan`, chronologically ordered; ties by agent pair, then
/// vertex before edge. With `first_only` at most one conflict is returned.
pub fn find_conflicts(plan: &Plan, semantics: TailSemantics, first_only: bool) -> Vec<Conflict> {
    detect_conflicts(plan.paths(), semantics, first_only)
}

/// Conflict detection over raw per-agent location sequences.
pub fn detect_conflicts<P: AsRef<[VertexId]>>(
    paths: &[P],
    semantics: TailSemantics,
    first_only: bool,
) -> Vec<Conflict> {
    let mut scanner = ConflictScanner::default();
    scanner.scan(paths, semantics, first_only)
}

/// Reusable buffers for repeated scans (the CBS hot loop).
#[derive(Debug, Default)]
pub struct ConflictScanner {
    occupancy: Vec<(VertexId, usize)>,
    moves: Vec<((VertexId, VertexId), usize)>,
    step: Vec<Conflict>,
}

impl ConflictScanner {
    pub fn scan<P: AsRef<[VertexId]>>(
        &mut self,
        paths: &[P],
        semantics: TailSemantics,
        first_only: bool,
    ) -> Vec<Conflict> {
        let horizon = paths.iter().map(|p| p.as_ref().len()).max().unwrap_or(0);
        let mut found = Vec::new();
        for t in 0..horizon {
            self.step.clear();
            self.occupancy.clear();
            for (agent, path) in paths.iter().enumerate() {
                if let Some(v) = semantics.position(path.as_ref(), t) {
                    self.occupancy.push((v, agent));
                }
            }
            self.occupancy.sort_unstable();
            for group in self.occupancy.chunk_by(|a, b| a.0 == b.0) {
                for (i, &(v, a)) in group.iter().enumerate() {
                    for &(_, b) in &group[i + 1..] {
                        self.step.push(Conflict {
                            agents: (a, b),
                            timestep: t,
                            location: ConflictLocation::Vertex(v),
                        });
                    }
                }
            }
            if t + 1 < horizon {
                self.moves.clear();
                for (agent, path) in paths.iter().enumerate() {
                    let path = path.as_ref();
                    // An agent that has stopped moving cannot take part in a swap.
                    if t + 1 >= path.len() {
                        continue;
                    }
                    let (u, w) = (path[t], path[t + 1]);
                    if u != w {
                        self.moves.push(((u, w), agent));
                    }
                }
                self.moves.sort_unstable();
                for &((u, w), a) in &self.moves {
                    let lo = self.moves.partition_point(|m| m.0 < (w, u));
                    for &(edge, b) in &self.moves[lo..] {
                        if edge != (w, u) {
                            break;
                        }
                        if a < b {
                            self.step.push(Conflict {
                                agents: (a, b),
                                timestep: t,
                                location: ConflictLocation::Edge(u, w),
                            });
                        }
                    }
                }
            }
            if !self.step.is_empty() {
                self.step.sort_by_key(Conflict::order_key);
                if first_only {
                    found.push(self.step[0]);
                    return found;
                }
                found.extend_from_slice(&self.step);
            }
        }
        found
    }
}

/// True iff no two agents collide.
pub fn is_conflict_free(plan: &Plan, semantics: TailSemantics) -> bool {
    find_conflicts(plan, semantics, true).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(lists: Vec<Vec<VertexId>>) -> Plan {
        Plan::from_vertex_lists(lists).unwrap()
    }

    #[test]
    fn disjoint_paths_do_not_conflict() {
        let p = plan(vec![vec![0, 1, 2], vec![3, 4, 5]]);
        for sem in [TailSemantics::StayAtGoal, TailSemantics::DisappearAtGoal] {
            assert!(find_conflicts(&p, sem, false).is_empty());
        }
    }

    #[test]
    fn head_on_swap_is_an_edge_conflict() {
        let (a, b) = (0, 1);
        let p = plan(vec![vec![a, b], vec![b, a]]);
        let c = find_conflicts(&p, TailSemantics::StayAtGoal, false);
        assert_eq!(
            c,
            vec![Conflict {
                agents: (0, 1),
                timestep: 0,
                location: ConflictLocation::Edge(a, b),
            }]
        );
        assert_eq!(c[0].kind(), ConflictKind::Edge);
    }

    #[test]
    fn simultaneous_occupancy_is_a_vertex_conflict() {
        let (a, b, c, d, e) = (0, 1, 2, 3, 4);
        let p = plan(vec![vec![a, b, c], vec![d, b, e]]);
        let found = find_conflicts(&p, TailSemantics::StayAtGoal, false);
        assert_eq!(
            found,
            vec![Conflict {
                agents: (0, 1),
                timestep: 1,
                location: ConflictLocation::Vertex(b),
            }]
        );
    }

    #[test]
    fn parked_agent_blocks_only_under_stay_at_goal() {
        // Agent 0 ends at 1 at t=1; agent 1 passes through 1 at t=2.
        let p = plan(vec![vec![0, 1], vec![3, 2, 1, 4]]);
        assert_eq!(
            find_conflicts(&p, TailSemantics::StayAtGoal, true)[0],
            Conflict {
                agents: (0, 1),
                timestep: 2,
                location: ConflictLocation::Vertex(1)
            }
        );
        assert!(find_conflicts(&p, TailSemantics::DisappearAtGoal, false).is_empty());
    }

    #[test]
    fn ordering_is_chronological_then_pair_then_kind() {
        // Agents 1 and 2 swap at t=0, agents 0 and 3 meet at t=0.
        let p = plan(vec![vec![9, 8], vec![1, 2], vec![2, 1], vec![9, 7]]);
        let found = find_conflicts(&p, TailSemantics::StayAtGoal, false);
        assert_eq!(found.len(), 2);
        assert_eq!(found[0].agents, (0, 3));
        assert_eq!(found[0].kind(), ConflictKind::Vertex);
        assert_eq!(found[1].agents, (1, 2));
        assert_eq!(found[1].kind(), ConflictKind::Edge);
        assert_eq!(find_conflicts(&p, TailSemantics::StayAtGoal, true), vec![found[0]]);
    }
}

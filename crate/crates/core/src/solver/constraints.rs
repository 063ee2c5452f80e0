use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::mapf::{Conflict, ConflictLocation, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConstraintKind {
    /// Must not occupy the vertex at `timestep`.
    VertexAt(VertexId),
    /// Must not traverse `(from, to)` between `timestep` and `timestep + 1`.
    EdgeAt(VertexId, VertexId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Constraint {
    pub agent: usize,
    pub kind: ConstraintKind,
    pub timestep: usize,
}

impl Constraint {
    /// The two CBS children of a conflict, one per involved agent.
    pub fn split(conflict: &Conflict) -> [Constraint; 2] {
        let (a, b) = conflict.agents;
        let t = conflict.timestep;
        match conflict.location {
            ConflictLocation::Vertex(v) => [
                Constraint {
                    agent: a,
                    kind: ConstraintKind::VertexAt(v),
                    timestep: t,
                },
                Constraint {
                    agent: b,
                    kind: ConstraintKind::VertexAt(v),
                    timestep: t,
                },
            ],
            ConflictLocation::Edge(u, w) => [
                Constraint {
                    agent: a,
                    kind: ConstraintKind::EdgeAt(u, w),
                    timestep: t,
                },
                Constraint {
                    agent: b,
                    kind: ConstraintKind::EdgeAt(w, u),
                    timestep: t,
                },
            ],
        }
    }
}

/// Space-time restrictions for a single low-level search, on physical
/// locations.
#[derive(Debug, Clone, Default)]
pub struct ConstraintTable {
    vertex: HashSet<(VertexId, usize)>,
    edge: HashSet<(VertexId, VertexId, usize)>,
    // location -> first timestep from which it stays blocked
    permanent: HashMap<VertexId, usize>,
    latest: usize,
}

impl ConstraintTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_constraints<'a>(constraints: impl IntoIterator<Item = &'a Constraint>) -> Self {
        let mut table = Self::new();
        for c in constraints {
            table.add(c);
        }
        table
    }

    pub fn add(&mut self, c: &Constraint) {
        match c.kind {
            ConstraintKind::VertexAt(v) => self.block_vertex(v, c.timestep),
            ConstraintKind::EdgeAt(u, w) => self.block_edge(u, w, c.timestep),
        }
    }

    pub fn block_vertex(&mut self, v: VertexId, t: usize) {
        self.vertex.insert((v, t));
        self.latest = self.latest.max(t);
    }

    pub fn block_edge(&mut self, from: VertexId, to: VertexId, t: usize) {
        self.edge.insert((from, to, t));
        self.latest = self.latest.max(t + 1);
    }

    /// Blocks `v` at every timestep from `t` on.
    pub fn block_vertex_from(&mut self, v: VertexId, t: usize) {
        let e = self.permanent.entry(v).or_insert(t);
        *e = (*e).min(t);
        self.latest = self.latest.max(t);
    }

    pub fn is_empty(&self) -> bool {
        self.vertex.is_empty() && self.edge.is_empty() && self.permanent.is_empty()
    }

    /// Last timestep at which anything is restricted.
    pub fn latest(&self) -> usize {
        self.latest
    }

    #[inline]
    pub fn vertex_blocked(&self, v: VertexId, t: usize) -> bool {
        self.vertex.contains(&(v, t)) || self.permanent.get(&v).is_some_and(|&s| t >= s)
    }

    #[inline]
    pub fn edge_blocked(&self, from: VertexId, to: VertexId, t: usize) -> bool {
        !self.edge.is_empty() && self.edge.contains(&(from, to, t))
    }

    /// Earliest arrival time after which `v` is never blocked again, or
    /// `None` when it is blocked forever.
    pub fn free_from(&self, v: VertexId) -> Option<usize> {
        if self.permanent.contains_key(&v) {
            return None;
        }
        Some(
            self.vertex
                .iter()
                .filter(|&&(u, _)| u == v)
                .map(|&(_, t)| t + 1)
                .max()
                .unwrap_or(0),
        )
    }
}

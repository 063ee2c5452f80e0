use std::collections::BTreeSet;

use thiserror::Error;

/// Dense vertex identifier, `0..vertex_count`.
pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge ({from}, {to}) references a vertex outside 0..{vertex_count}")]
    VertexOutOfRange {
        from: VertexId,
        to: VertexId,
        vertex_count: usize,
    },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(VertexId, VertexId),
}

/// Directed graph with optional self-loops.
///
/// A vertex carrying a self-loop is a delay vertex: agents may wait there.
/// The delay set is derived from the edge list, so the two can never disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    successors: Vec<Vec<VertexId>>,
    delay: Vec<bool>,
    edge_count: usize,
}

impl Graph {
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, GraphError> {
        let mut successors = vec![Vec::new(); vertex_count];
        let mut seen = BTreeSet::new();
        for (from, to) in edges {
            if from as usize >= vertex_count || to as usize >= vertex_count {
                return Err(GraphError::VertexOutOfRange {
                    from,
                    to,
                    vertex_count,
                });
            }
            if !seen.insert((from, to)) {
                return Err(GraphError::DuplicateEdge(from, to));
            }
            successors[from as usize].push(to);
        }
        let mut delay = vec![false; vertex_count];
        for (v, out) in successors.iter_mut().enumerate() {
            out.sort_unstable();
            delay[v] = out.binary_search(&(v as VertexId)).is_ok();
        }
        Ok(Self {
            successors,
            delay,
            edge_count: seen.len(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.successors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains(&self, v: VertexId) -> bool {
        (v as usize) < self.successors.len()
    }

    /// Out-neighbours of `v` in ascending order, self-loop included.
    pub fn successors(&self, v: VertexId) -> &[VertexId] {
        &self.successors[v as usize]
    }

    pub fn has_edge(&self, from: VertexId, to: VertexId) -> bool {
        self.contains(from) && self.successors[from as usize].binary_search(&to).is_ok()
    }

    pub fn is_delay_vertex(&self, v: VertexId) -> bool {
        self.delay.get(v as usize).copied().unwrap_or(false)
    }

    pub fn delay_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.delay
            .iter()
            .enumerate()
            .filter(|(_, &d)| d)
            .map(|(v, _)| v as VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(v, out)| out.iter().map(move |&w| (v as VertexId, w)))
    }

    /// In-neighbour lists, built on demand.
    pub fn predecessor_lists(&self) -> Vec<Vec<VertexId>> {
        let mut preds = vec![Vec::new(); self.vertex_count()];
        for (from, to) in self.edges() {
            preds[to as usize].push(from);
        }
        preds
    }
}

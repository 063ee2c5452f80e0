use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UndirectedGraphError {
    #[error("self-edge at vertex {0}")]
    SelfEdge(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("edge {{{0}, {1}}} references a vertex outside 0..{2}")]
    OutOfRange(usize, usize, usize),
}

/// Simple undirected graph; edges are stored as `(u, v)` with `u < v` in
/// insertion order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UndirectedGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl UndirectedGraph {
    pub fn new(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, UndirectedGraphError> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a >= vertex_count || b >= vertex_count {
                return Err(UndirectedGraphError::OutOfRange(a, b, vertex_count));
            }
            if a == b {
                return Err(UndirectedGraphError::SelfEdge(a));
            }
            let e = (a.min(b), a.max(b));
            if out.contains(&e) {
                return Err(UndirectedGraphError::DuplicateEdge(e.0, e.1));
            }
            out.push(e);
        }
        Ok(Self {
            vertex_count,
            edges: out,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn is_proper(&self, coloring: &[u32]) -> bool {
        coloring.len() == self.vertex_count && self.edges.iter().all(|&(a, b)| coloring[a] != coloring[b])
    }
}

/// First-fit coloring in vertex order.
pub fn greedy_coloring(graph: &UndirectedGraph) -> Vec<u32> {
    let adj = graph.neighbors();
    let mut colors: Vec<Option<u32>> = vec![None; graph.vertex_count()];
    for v in 0..graph.vertex_count() {
        let used: Vec<u32> = adj[v].iter().filter_map(|&u| colors[u]).collect();
        colors[v] = (0..).find(|c| !used.contains(c));
    }
    colors.into_iter().map(|c| c.unwrap_or(0)).collect()
}

pub fn coloring_sum(coloring: &[u32]) -> u64 {
    coloring.iter().map(|&c| c as u64).sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MscOptimum {
    pub min_sum: u64,
    pub coloring: Vec<u32>,
}

struct Search<'a> {
    adj: &'a [Vec<usize>],
    colors: Vec<u32>,
    best_sum: u64,
    best: Vec<u32>,
}

impl Search<'_> {
    fn go(&mut self, v: usize, sum: u64) {
        if sum >= self.best_sum {
            return;
        }
        let n = self.colors.len();
        if v == n {
            self.best_sum = sum;
            self.best = self.colors.clone();
            return;
        }
        for c in 0..n as u32 {
            if sum + c as u64 >= self.best_sum {
                break;
            }
            if self.adj[v].iter().any(|&u| u < v && self.colors[u] == c) {
                continue;
            }
            self.colors[v] = c;
            self.go(v + 1, sum + c as u64);
        }
    }
}

/// Exhaustive minimum sum coloring with colors `0..n`.
pub fn brute_force_msc(graph: &UndirectedGraph) -> Result<MscOptimum, super::OracleError> {
    const GUARD: usize = 10;
    if graph.vertex_count() > GUARD {
        return Err(super::OracleError::InstanceTooLarge {
            what: "vertices",
            size: graph.vertex_count(),
            limit: GUARD,
        });
    }
    let adj = graph.neighbors();
    let greedy = greedy_coloring(graph);
    let mut search = Search {
        adj: &adj,
        colors: vec![0; graph.vertex_count()],
        best_sum: coloring_sum(&greedy) + 1,
        best: greedy,
    };
    search.go(0, 0);
    Ok(MscOptimum {
        min_sum: search.best_sum,
        coloring: search.best,
    })
}

//! Hand-built instances where the obvious first wait is not the best one.

use std::collections::BTreeSet;

use delay_repair::mapf::{DelayPermissions, Graph, Plan, VertexId};

pub struct Example {
    pub name: &'static str,
    pub graph: Graph,
    /// Colliding plan: red (agent 0) has already been held up once.
    pub plan: Plan,
    pub permissions: DelayPermissions,
    /// Optimum fixed from the exhaustive oracle.
    pub expected_min_delay: u64,
    /// The tempting single wait that only moves the collision elsewhere:
    /// `(agent, 1-based index, waits)`.
    pub naive: (usize, usize, u32),
}

fn graph_for(paths: &[Vec<VertexId>]) -> Graph {
    let n = paths.iter().flatten().max().map_or(0, |&v| v as usize + 1);
    let mut edges = BTreeSet::new();
    for v in 0..n as VertexId {
        edges.insert((v, v));
    }
    for p in paths {
        for w in p.windows(2) {
            edges.insert((w[0], w[1]));
            edges.insert((w[1], w[0]));
        }
    }
    Graph::new(n, edges).unwrap()
}

fn red_cannot_wait(n: usize) -> DelayPermissions {
    let mut sets = vec![None; n];
    sets[0] = Some(BTreeSet::new());
    DelayPermissions::from_options(sets)
}

/// Green meets the delayed red at the crossing. Waiting right away pushes
/// green into blue's crossing, while waiting just before the crossing lets
/// blue pass first.
pub fn postponed_delay() -> Example {
    let paths = vec![
        vec![6, 6, 7, 8, 4, 9],
        vec![0, 1, 2, 3, 4, 5],
        vec![10, 11, 13, 2, 12],
    ];
    Example {
        name: "postponed delay",
        graph: graph_for(&paths),
        plan: Plan::from_vertex_lists(paths).unwrap(),
        permissions: red_cannot_wait(3),
        expected_min_delay: 1,
        naive: (1, 2, 1),
    }
}

/// One wait for green runs it into blue; one wait for blue runs blue into
/// orange. Two waits for green avoid the cascade.
pub fn long_delay() -> Example {
    let paths = vec![
        vec![5, 5, 6, 3, 7],
        vec![0, 1, 2, 3, 4],
        vec![8, 9, 10, 2, 11, 12],
        vec![13, 14, 15, 16, 17, 11, 18],
    ];
    Example {
        name: "long delay",
        graph: graph_for(&paths),
        plan: Plan::from_vertex_lists(paths).unwrap(),
        permissions: red_cannot_wait(4),
        expected_min_delay: 2,
        naive: (1, 1, 1),
    }
}

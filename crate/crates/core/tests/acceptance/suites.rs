//! Instance generators shared by several criteria.

use std::collections::BTreeSet;

use delay_repair::hardness::{msc_to_acid, ReductionOptions, ReductionOutput};
use delay_repair::harness::{
    halt_all_indices, inject_collision_inducing_delay, random_grid_map, random_scenario, seed_plan,
    InjectionOptions, InjectionRecord,
};
use delay_repair::io::{grid_to_graph, DelayPolicy};
use delay_repair::mapf::{DelayPermissions, Graph, Plan, TailSemantics};
use delay_repair::oracle::{greedy_coloring, coloring_sum, UndirectedGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A small grid instance with one injected unit delay.
pub struct RepairInstance {
    pub graph: Graph,
    pub plan: Plan,
    pub permissions: DelayPermissions,
    pub injections: Vec<InjectionRecord>,
    pub thinned: bool,
}

impl RepairInstance {
    pub fn injected_delays(&self) -> u64 {
        self.injections.iter().map(|r| r.length as u64).sum()
    }

    pub fn halt_all_bound(&self) -> u64 {
        self.injected_delays() * (self.plan.agent_count() as u64 - 1)
    }
}

fn try_repair_instance(rng: &mut ChaCha8Rng, thin: bool) -> Option<RepairInstance> {
    let h = rng.gen_range(3..=5);
    let w = rng.gen_range(3..=5);
    let ratio = rng.gen_range(0.0..0.2);
    let map = random_grid_map(h, w, ratio, rng);
    let n = rng.gen_range(2..=4);
    if map.passable_count() < n + 2 {
        return None;
    }
    let grid = grid_to_graph(&map, &DelayPolicy::AllVertices).ok()?;
    let scen = random_scenario(&map, "suite", n, rng);
    let starts = scen.iter().map(|e| grid.vertex_at(e.start.0, e.start.1).unwrap()).collect();
    let goals = scen.iter().map(|e| grid.vertex_at(e.goal.0, e.goal.1).unwrap()).collect();
    let base = seed_plan(&grid.graph, starts, goals, TailSemantics::StayAtGoal, None, 5, rng)?;
    let (plan, record) =
        inject_collision_inducing_delay(&grid.graph, &base, rng, &InjectionOptions::default()).ok()?;
    let injections = vec![record];
    let permissions = if thin {
        let keep = halt_all_indices(&plan, &injections);
        let sets = (0..plan.agent_count())
            .map(|a| {
                let mut s: BTreeSet<usize> = (1..=plan.path(a).vertex_count())
                    .filter(|_| rng.gen_bool(0.5))
                    .collect();
                s.extend(keep[a].iter().copied());
                s
            })
            .collect();
        DelayPermissions::from_sets(sets)
    } else {
        DelayPermissions::unrestricted(plan.agent_count())
    };
    Some(RepairInstance {
        graph: grid.graph,
        plan,
        permissions,
        injections,
        thinned: thin,
    })
}

/// `count` instances: grids up to 5x5, 2 to 4 agents, one injected delay,
/// permission sets alternating between full and randomly thinned.
pub fn repair_suite(count: usize, seed: u64) -> Vec<RepairInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let thin = out.len() % 2 == 1;
        if let Some(inst) = try_repair_instance(&mut rng, thin) {
            out.push(inst);
        }
    }
    out
}

/// A random simple graph with at most `max_vertices` vertices and
/// `max_edges` edges.
pub fn random_undirected(rng: &mut ChaCha8Rng, max_vertices: usize, max_edges: usize) -> UndirectedGraph {
    let n = rng.gen_range(1..=max_vertices);
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    pairs.shuffle(rng);
    let m = rng.gen_range(0..=pairs.len().min(max_edges));
    pairs.truncate(m);
    UndirectedGraph::new(n, pairs).expect("distinct pairs")
}

pub fn figure_graph() -> UndirectedGraph {
    UndirectedGraph::new(4, [(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap()
}

/// The reduction with the greedy coloring sum as threshold.
pub fn reduce_with_greedy_threshold(g: &UndirectedGraph) -> (u64, ReductionOutput) {
    let threshold = coloring_sum(&greedy_coloring(g));
    let out = msc_to_acid(g, threshold, ReductionOptions::default()).expect("threshold within range");
    (threshold, out)
}

/// The coloring suite: the figure graph first, then `count` random graphs.
pub fn coloring_suite(count: usize, seed: u64) -> Vec<UndirectedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![figure_graph()];
    out.extend((0..count).map(|_| random_undirected(&mut rng, 6, 7)));
    out
}

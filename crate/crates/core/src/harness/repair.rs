use std::time::{Duration, Instant};

use crate::mapf::{DelayAssignment, DelayPermissions, Graph, Path, Plan, TailSemantics, VertexId};
use crate::reduction::{build_cg, build_icg, lift_solution, GraphMode};
use crate::solver::{
    cbs_solve, prioritized_solve, AgentEdges, OriginalGraphInstance, Solution, SolveOptions,
    SolveStatus, SolverKind, SolverStats,
};

/// Everything one repair attempt needs.
#[derive(Debug, Clone)]
pub struct RepairRequest<'a> {
    pub graph: &'a Graph,
    /// The colliding plan.
    pub plan: &'a Plan,
    pub permissions: &'a DelayPermissions,
    pub semantics: TailSemantics,
    pub mode: GraphMode,
    pub solver: SolverKind,
    pub time_limit: Option<Duration>,
    pub horizon_cap: Option<usize>,
    /// Timestep from which original-graph replanning starts; earlier
    /// positions are kept as they are.
    pub replan_from: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairOutcome {
    pub status: SolveStatus,
    pub plan: Option<Plan>,
    /// Only produced by CG and ICG repairs.
    pub delays: Option<Vec<DelayAssignment>>,
    /// `‖P′‖ − ‖P‖`; negative when replanning found shorter paths.
    pub added_soc: Option<i64>,
    pub stats: SolverStats,
    /// Time spent building CG or ICG.
    pub build_time: Duration,
}

fn run_solver<I: AgentEdges>(instance: &I, kind: SolverKind, opts: &SolveOptions) -> Solution<I::Vertex> {
    match kind {
        SolverKind::Cbs => cbs_solve(instance, opts),
        SolverKind::Prioritized => {
            let order: Vec<usize> = (0..instance.agent_count()).collect();
            prioritized_solve(instance, &order, opts).expect("identity order is a permutation")
        }
    }
}

/// Repairs a colliding plan on the requested graph with the requested
/// solver.
pub fn repair_plan(req: &RepairRequest<'_>) -> RepairOutcome {
    let opts = SolveOptions {
        semantics: req.semantics,
        time_limit: req.time_limit,
        horizon_cap: req.horizon_cap,
    };
    match req.mode {
        GraphMode::Cg | GraphMode::Icg => {
            let built = Instant::now();
            let instance = if req.mode == GraphMode::Cg {
                build_cg(req.graph, req.plan, req.permissions)
            } else {
                build_icg(req.graph, req.plan, req.permissions)
            };
            let build_time = built.elapsed();
            let solution = run_solver(&instance, req.solver, &opts);
            let mut out = RepairOutcome {
                status: solution.status,
                plan: None,
                delays: None,
                added_soc: None,
                stats: solution.stats,
                build_time,
            };
            if solution.is_solved() {
                let lifted = lift_solution(&instance, &solution.paths)
                    .expect("solutions on a constrained graph are delays of the original");
                out.added_soc = Some(lifted.added_soc as i64);
                out.plan = Some(lifted.plan);
                out.delays = Some(lifted.delays);
            }
            out
        }
        GraphMode::Og => replan_on_original(req, &opts),
    }
}

fn replan_on_original(req: &RepairRequest<'_>, opts: &SolveOptions) -> RepairOutcome {
    let tau = req.replan_from;
    let plan = req.plan;
    let disappear = req.semantics == TailSemantics::DisappearAtGoal;
    // agents gone before `tau` keep their paths untouched
    let active: Vec<usize> = (0..plan.agent_count())
        .filter(|&a| !(disappear && plan.path(a).vertex_count() <= tau))
        .collect();
    let position = |a: usize| {
        let p = plan.path(a);
        p[tau.min(p.vertex_count() - 1)]
    };
    let starts: Vec<VertexId> = active.iter().map(|&a| position(a)).collect();
    let goals: Vec<VertexId> = active.iter().map(|&a| plan.goals()[a]).collect();
    let instance = OriginalGraphInstance::new(req.graph, starts, goals);
    let mut opts = *opts;
    opts.horizon_cap = opts.horizon_cap.map(|h| h.saturating_sub(tau));
    let solution = run_solver(&instance, req.solver, &opts);
    let mut out = RepairOutcome {
        status: solution.status,
        plan: None,
        delays: None,
        added_soc: None,
        stats: solution.stats,
        build_time: Duration::ZERO,
    };
    if !solution.is_solved() {
        return out;
    }
    let mut paths: Vec<Path> = plan.paths().to_vec();
    for (&a, tail) in active.iter().zip(&solution.paths) {
        let old = plan.path(a);
        let mut v: Vec<VertexId> = (0..tau).map(|t| old[t.min(old.vertex_count() - 1)]).collect();
        v.extend_from_slice(tail);
        if !disappear {
            let goal = plan.goals()[a];
            while v.len() > 1 && v[v.len() - 1] == goal && v[v.len() - 2] == goal {
                v.pop();
            }
        }
        paths[a] = Path::new(v).expect("non-empty");
    }
    let repaired = Plan::new(paths, plan.sources().to_vec(), plan.goals().to_vec())
        .expect("replanned paths keep endpoints");
    out.added_soc = Some(repaired.sum_of_costs() as i64 - plan.sum_of_costs() as i64);
    out.plan = Some(repaired);
    out
}

//! Python bindings for plan repair by delay introduction.

use std::collections::BTreeSet;
use std::time::Duration;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use delay_repair::hardness::{msc_to_acid as reduce, ReductionOptions};
use delay_repair::harness::{
    halt_all_repair as halt_all, inject_multiple_delays, repair_plan, InjectionOptions,
    InjectionRecord, RepairRequest,
};
use delay_repair::mapf::{self, DelayPermissions, TailSemantics, VertexId};
use delay_repair::oracle::{self, AcidOracleOptions, UndirectedGraph};
use delay_repair::reduction::GraphMode;
use delay_repair::solver::{horizon_bound, SolverKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn semantics(name: &str) -> PyResult<TailSemantics> {
    match name {
        "stay" => Ok(TailSemantics::StayAtGoal),
        "disappear" => Ok(TailSemantics::DisappearAtGoal),
        _ => Err(value_err(format!("semantics must be 'stay' or 'disappear', got {name:?}"))),
    }
}

fn permissions(n: usize, permitted: Option<Vec<Option<Vec<usize>>>>) -> PyResult<DelayPermissions> {
    match permitted {
        None => Ok(DelayPermissions::unrestricted(n)),
        Some(sets) if sets.len() == n => Ok(DelayPermissions::from_options(
            sets.into_iter()
                .map(|s| s.map(|v| v.into_iter().collect::<BTreeSet<_>>()))
                .collect(),
        )),
        Some(sets) => Err(value_err(format!("{} permitted sets for {n} agents", sets.len()))),
    }
}

fn delays_to_pairs(delays: &[mapf::DelayAssignment]) -> Vec<Vec<(usize, u32)>> {
    delays.iter().map(|d| d.iter().collect()).collect()
}

/// A directed graph; a self-loop on a vertex allows waiting there.
#[pyclass(frozen, skip_from_py_object, module = "delay_repair")]
#[derive(Clone)]
pub struct Graph {
    inner: mapf::Graph,
}

#[pymethods]
impl Graph {
    #[new]
    fn new(vertex_count: usize, edges: Vec<(VertexId, VertexId)>) -> PyResult<Self> {
        let inner = mapf::Graph::new(vertex_count, edges).map_err(value_err)?;
        Ok(Self { inner })
    }

    /// A 4-connected grid with waiting allowed on every open cell.
    /// `rows` uses `.` for open and `@` for blocked cells.
    #[staticmethod]
    fn grid(rows: Vec<String>) -> PyResult<Self> {
        let width = rows.first().map_or(0, |r| r.chars().count());
        let text = format!("type octile\nheight {}\nwidth {width}\nmap\n{}\n", rows.len(), rows.join("\n"));
        let map = delay_repair::io::parse_map(&text).map_err(value_err)?;
        let grid = delay_repair::io::grid_to_graph(&map, &Default::default()).map_err(value_err)?;
        Ok(Self { inner: grid.graph })
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    fn edges(&self) -> Vec<(VertexId, VertexId)> {
        self.inner.edges().collect()
    }

    fn is_delay_vertex(&self, v: VertexId) -> bool {
        self.inner.is_delay_vertex(v)
    }

    fn __repr__(&self) -> String {
        format!("Graph(vertices={}, edges={})", self.inner.vertex_count(), self.inner.edge_count())
    }
}

/// One path per agent; sources and goals are the path endpoints.
#[pyclass(frozen, skip_from_py_object, module = "delay_repair")]
#[derive(Clone)]
pub struct Plan {
    inner: mapf::Plan,
}

#[pymethods]
impl Plan {
    #[new]
    fn new(paths: Vec<Vec<VertexId>>) -> PyResult<Self> {
        let inner = mapf::Plan::from_vertex_lists(paths).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn paths(&self) -> Vec<Vec<VertexId>> {
        self.inner.paths().iter().map(|p| p.vertices().to_vec()).collect()
    }

    #[getter]
    fn agent_count(&self) -> usize {
        self.inner.agent_count()
    }

    fn sum_of_costs(&self) -> u64 {
        self.inner.sum_of_costs()
    }

    fn length(&self) -> usize {
        self.inner.length()
    }

    /// Conflicts as `(kind, agent_a, agent_b, timestep)`.
    #[pyo3(signature = (semantics = "stay"))]
    fn conflicts(&self, semantics: &str) -> PyResult<Vec<(String, usize, usize, usize)>> {
        let sem = self::semantics(semantics)?;
        Ok(mapf::find_conflicts(&self.inner, sem, false)
            .into_iter()
            .map(|c| {
                let kind = match c.kind() {
                    mapf::ConflictKind::Vertex => "vertex",
                    mapf::ConflictKind::Edge => "edge",
                };
                (kind.to_string(), c.agents.0, c.agents.1, c.timestep)
            })
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Plan(agents={}, soc={})",
            self.inner.agent_count(),
            self.inner.sum_of_costs()
        )
    }
}

/// Outcome of [`repair`].
#[pyclass(frozen, get_all, module = "delay_repair")]
pub struct Repair {
    status: String,
    plan: Option<Plan>,
    /// Per agent, `(1-based index, waits)` pairs; `None` for `og`.
    delays: Option<Vec<Vec<(usize, u32)>>>,
    added_soc: Option<i64>,
    expansions: u64,
}

#[pymethods]
impl Repair {
    fn __repr__(&self) -> String {
        let added = self.added_soc.map_or("None".to_string(), |a| a.to_string());
        format!("Repair(status={:?}, added_soc={added})", self.status)
    }
}

/// Repairs a colliding plan on `og`, `cg` or `icg` with `cbs` or
/// `prioritized`.
#[pyfunction]
#[pyo3(signature = (graph, plan, mode = "cg", solver = "cbs", semantics = "stay", time_limit = 60.0, permitted = None))]
fn repair(
    py: Python<'_>,
    graph: &Graph,
    plan: &Plan,
    mode: &str,
    solver: &str,
    semantics: &str,
    time_limit: f64,
    permitted: Option<Vec<Option<Vec<usize>>>>,
) -> PyResult<Repair> {
    let mode = match mode {
        "og" => GraphMode::Og,
        "cg" => GraphMode::Cg,
        "icg" => GraphMode::Icg,
        _ => return Err(value_err(format!("unknown graph mode {mode:?}"))),
    };
    let solver = match solver {
        "cbs" => SolverKind::Cbs,
        "prioritized" => SolverKind::Prioritized,
        _ => return Err(value_err(format!("unknown solver {solver:?}"))),
    };
    let semantics = self::semantics(semantics)?;
    let time_limit = Duration::try_from_secs_f64(time_limit).map_err(value_err)?;
    let perms = permissions(plan.inner.agent_count(), permitted)?;
    let out = py.detach(|| {
        repair_plan(&RepairRequest {
            graph: &graph.inner,
            plan: &plan.inner,
            permissions: &perms,
            semantics,
            mode,
            solver,
            time_limit: Some(time_limit),
            horizon_cap: (mode != GraphMode::Og).then(|| horizon_bound(&plan.inner, None)),
            replan_from: 0,
        })
    });
    Ok(Repair {
        status: out.status.as_str().to_string(),
        plan: out.plan.map(|inner| Plan { inner }),
        delays: out.delays.as_deref().map(delays_to_pairs),
        added_soc: out.added_soc,
        expansions: out.stats.expansions,
    })
}

/// Exact minimum number of delays, or `None` when no repair exists within
/// the budget.
#[pyfunction]
#[pyo3(signature = (graph, plan, semantics = "stay", max_budget = None, permitted = None))]
fn brute_force_acid(
    graph: &Graph,
    plan: &Plan,
    semantics: &str,
    max_budget: Option<u64>,
    permitted: Option<Vec<Option<Vec<usize>>>>,
) -> PyResult<Option<u64>> {
    let opts = AcidOracleOptions {
        semantics: self::semantics(semantics)?,
        max_budget,
        ..Default::default()
    };
    let perms = permissions(plan.inner.agent_count(), permitted)?;
    let outcome = oracle::brute_force_acid(&graph.inner, &plan.inner, &perms, &opts).map_err(value_err)?;
    Ok(outcome.min_delay())
}

/// Minimum color sum and an optimal coloring of a small undirected graph.
#[pyfunction]
fn brute_force_msc(vertex_count: usize, edges: Vec<(usize, usize)>) -> PyResult<(u64, Vec<u32>)> {
    let g = UndirectedGraph::new(vertex_count, edges).map_err(value_err)?;
    let best = oracle::brute_force_msc(&g).map_err(value_err)?;
    Ok((best.min_sum, best.coloring))
}

/// The delay repair instance encoding a coloring question:
/// `(graph, plan, permitted, budget)`.
#[pyfunction]
#[pyo3(signature = (vertex_count, edges, threshold, start_only = false))]
fn msc_to_acid(
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    threshold: u64,
    start_only: bool,
) -> PyResult<(Graph, Plan, Vec<Option<Vec<usize>>>, u64)> {
    let g = UndirectedGraph::new(vertex_count, edges).map_err(value_err)?;
    let out = reduce(
        &g,
        threshold,
        ReductionOptions {
            start_only_delays: start_only,
            private_goals: false,
        },
    )
    .map_err(value_err)?;
    let permitted = out
        .permissions
        .as_options()
        .iter()
        .map(|s| s.as_ref().map(|s| s.iter().copied().collect()))
        .collect();
    Ok((
        Graph { inner: out.graph },
        Plan { inner: out.plan },
        permitted,
        out.budget,
    ))
}

/// Injects `count` collision-inducing delays. Returns the colliding plan and
/// `(agent, step, length, conflict_timestep)` records, or `None`.
#[pyfunction]
#[pyo3(signature = (graph, plan, seed, count = 1, semantics = "stay"))]
fn inject_delays(
    graph: &Graph,
    plan: &Plan,
    seed: u64,
    count: usize,
    semantics: &str,
) -> PyResult<Option<(Plan, Vec<(usize, usize, u32, usize)>)>> {
    let opts = InjectionOptions {
        semantics: self::semantics(semantics)?,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(inject_multiple_delays(&graph.inner, &plan.inner, count, &mut rng, &opts)
        .ok()
        .map(|(p, recs)| {
            let recs = recs
                .iter()
                .map(|r| (r.agent, r.step, r.length, r.conflict_timestep))
                .collect();
            (Plan { inner: p }, recs)
        }))
}

/// The synchronizing repair for the given injection records.
#[pyfunction]
fn halt_all_repair(
    graph: &Graph,
    plan: &Plan,
    injections: Vec<(usize, usize, u32, usize)>,
) -> PyResult<(Plan, u64)> {
    let records: Vec<InjectionRecord> = injections
        .into_iter()
        .map(|(agent, step, length, conflict_timestep)| InjectionRecord {
            agent,
            step,
            length,
            conflict_timestep,
        })
        .collect();
    let perms = DelayPermissions::unrestricted(plan.inner.agent_count());
    let out = halt_all(&graph.inner, &plan.inner, &records, &perms).map_err(value_err)?;
    Ok((Plan { inner: out.plan }, out.added_soc))
}

#[pymodule]
#[pyo3(name = "delay_repair")]
fn delay_repair_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_class::<Plan>()?;
    m.add_class::<Repair>()?;
    m.add_function(wrap_pyfunction!(repair, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_acid, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_msc, m)?)?;
    m.add_function(wrap_pyfunction!(msc_to_acid, m)?)?;
    m.add_function(wrap_pyfunction!(inject_delays, m)?)?;
    m.add_function(wrap_pyfunction!(halt_all_repair, m)?)?;
    Ok(())
}

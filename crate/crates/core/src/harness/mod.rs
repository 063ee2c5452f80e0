//! Experiment protocol: seed plans, collision-inducing delay injection,
//! repair across graph modes and solvers, and metric rows.

mod generate;
mod halt;
mod inject;
mod repair;

use std::path::{Path as FsPath, PathBuf};
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use generate::{random_grid_map, random_scenario};
pub use halt::{halt_all_indices, halt_all_repair, HaltAllRepair};
pub use inject::{
    apply_injections, inject_collision_inducing_delay, inject_multiple_delays, InjectionOptions,
    InjectionRecord, NoneFound,
};
pub use repair::{repair_plan, RepairOutcome, RepairRequest};

use crate::io::{
    grid_to_graph, parse_map, parse_scenario, write_plan, DelayPolicy, GraphSpec, GridGraph,
    MapError, MetricsRow, PlanDocument, ScenarioEntry, ScenarioError,
};
use crate::mapf::{find_conflicts, DelayPermissions, Graph, Path, Plan, TailSemantics, VertexId};
use crate::reduction::GraphMode;
use crate::solver::{
    horizon_bound, prioritized_solve, OriginalGraphInstance, SolveOptions, SolverKind,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config: {0}")]
    Config(String),
    #[error("map {path}: {source}")]
    Map { path: PathBuf, source: MapError },
    #[error("scenario {path}: {source}")]
    Scenario {
        path: PathBuf,
        source: ScenarioError,
    },
    #[error("scenario {path} has {available} usable entries, {requested} requested")]
    NotEnoughAgents {
        path: PathBuf,
        available: usize,
        requested: usize,
    },
}

fn default_one() -> usize {
    1
}

fn default_length() -> u32 {
    1
}

fn default_iterations() -> usize {
    10
}

fn default_time_limit() -> f64 {
    180.0
}

fn default_modes() -> Vec<GraphMode> {
    vec![GraphMode::Og, GraphMode::Cg, GraphMode::Icg]
}

fn default_solvers() -> Vec<SolverKind> {
    vec![SolverKind::Cbs]
}

/// Parameters of one sweep. Relative paths are resolved against the
/// directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub map: PathBuf,
    /// One instance per scenario file.
    pub scenarios: Vec<PathBuf>,
    pub agent_counts: Vec<usize>,
    #[serde(default = "default_one")]
    pub delays_to_inject: usize,
    /// Length of each injected delay.
    #[serde(default = "default_length")]
    pub delay_length: u32,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    /// Seconds per solve.
    #[serde(default = "default_time_limit")]
    pub time_limit: f64,
    pub seed: u64,
    #[serde(default = "default_modes")]
    pub graph_modes: Vec<GraphMode>,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<SolverKind>,
    #[serde(default)]
    pub semantics: TailSemantics,
    #[serde(default)]
    pub delay_policy: DelayPolicy,
    #[serde(default = "default_one")]
    pub workers: usize,
    /// When set, each injected instance is written here as a plan file.
    #[serde(default)]
    pub plan_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.delays_to_inject == 0 {
            return bad("delays_to_inject must be at least 1");
        }
        if self.delay_length == 0 {
            return bad("delay_length must be at least 1");
        }
        if !(self.time_limit > 0.0 && self.time_limit.is_finite()) {
            return bad("time_limit must be a positive number of seconds");
        }
        if self.scenarios.is_empty() || self.agent_counts.is_empty() {
            return bad("at least one scenario and one agent count are required");
        }
        if self.agent_counts.contains(&0) {
            return bad("agent counts must be positive");
        }
        if self.workers == 0 {
            return bad("workers must be at least 1");
        }
        Ok(())
    }

    /// Makes relative paths relative to `base`.
    pub fn resolve_paths(&mut self, base: &FsPath) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.map);
        self.scenarios.iter_mut().for_each(fix);
        if let Some(d) = self.plan_dir.as_mut() {
            fix(d);
        }
    }
}

/// Reads and validates a JSON config, resolving paths next to it.
pub fn load_config(path: &FsPath) -> Result<ExperimentConfig, HarnessError> {
    let text = read(path)?;
    let mut cfg: ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| HarnessError::Config(e.to_string()))?;
    cfg.validate()?;
    cfg.resolve_paths(path.parent().unwrap_or(FsPath::new(".")));
    Ok(cfg)
}

fn read(path: &FsPath) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a MovingAI map as a graph.
pub fn load_grid(path: &FsPath, policy: &DelayPolicy) -> Result<GridGraph, HarnessError> {
    let map_err = |source| HarnessError::Map {
        path: path.to_path_buf(),
        source,
    };
    let map = parse_map(&read(path)?).map_err(map_err)?;
    grid_to_graph(&map, policy).map_err(map_err)
}

/// Start and goal vertices of the first `n` scenario entries.
pub fn scenario_endpoints(
    grid: &GridGraph,
    entries: &[ScenarioEntry],
    n: usize,
    path: &FsPath,
) -> Result<(Vec<VertexId>, Vec<VertexId>), HarnessError> {
    let not_enough = || HarnessError::NotEnoughAgents {
        path: path.to_path_buf(),
        available: entries.len(),
        requested: n,
    };
    if entries.len() < n {
        return Err(not_enough());
    }
    let mut starts = Vec::with_capacity(n);
    let mut goals = Vec::with_capacity(n);
    for e in &entries[..n] {
        starts.push(grid.vertex_at(e.start.0, e.start.1).ok_or_else(not_enough)?);
        goals.push(grid.vertex_at(e.goal.0, e.goal.1).ok_or_else(not_enough)?);
    }
    Ok((starts, goals))
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent stream seed for one `(instance, n, iteration)` row group.
pub fn row_seed(seed: u64, instance: usize, n: usize, iteration: usize) -> u64 {
    [instance as u64, n as u64, iteration as u64]
        .into_iter()
        .fold(splitmix64(seed), |h, x| splitmix64(h ^ x))
}

/// A non-colliding plan from prioritized planning on the original graph,
/// trying the given order first and then up to `retries` shuffled orders.
pub fn seed_plan(
    graph: &Graph,
    starts: Vec<VertexId>,
    goals: Vec<VertexId>,
    semantics: TailSemantics,
    time_limit: Option<Duration>,
    retries: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Plan> {
    let instance = OriginalGraphInstance::new(graph, starts.clone(), goals.clone());
    let opts = SolveOptions {
        semantics,
        time_limit,
        horizon_cap: None,
    };
    let mut order: Vec<usize> = (0..starts.len()).collect();
    for attempt in 0..=retries {
        if attempt > 0 {
            order.shuffle(rng);
        }
        let sol = prioritized_solve(&instance, &order, &opts).expect("order is a permutation");
        if sol.is_solved() {
            let paths = sol
                .paths
                .into_iter()
                .map(|p| Path::new(p).expect("non-empty"))
                .collect();
            return Some(Plan::new(paths, starts, goals).expect("solver keeps endpoints"));
        }
    }
    None
}

const SEED_PLAN_RETRIES: usize = 10;

struct Unit {
    instance: usize,
    n: usize,
    iteration: usize,
}

/// Runs the whole sweep. Rows come out in `(instance, n, iteration, mode,
/// solver)` order whatever the worker count.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<MetricsRow>, HarnessError> {
    config.validate()?;
    let grid = load_grid(&config.map, &config.delay_policy)?;
    let map_name = config
        .map
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut scenarios = Vec::with_capacity(config.scenarios.len());
    for path in &config.scenarios {
        let entries = parse_scenario(&read(path)?).map_err(|source| HarnessError::Scenario {
            path: path.clone(),
            source,
        })?;
        for &n in &config.agent_counts {
            scenario_endpoints(&grid, &entries, n, path)?;
        }
        scenarios.push(entries);
    }
    if let Some(dir) = &config.plan_dir {
        std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
            path: dir.clone(),
            source,
        })?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let time_limit = Duration::from_secs_f64(config.time_limit);

    let pairs: Vec<(usize, usize)> = (0..scenarios.len())
        .flat_map(|i| config.agent_counts.iter().map(move |&n| (i, n)))
        .collect();
    let seeds: Vec<Option<Plan>> = pool.install(|| {
        pairs
            .par_iter()
            .map(|&(i, n)| {
                let (starts, goals) = scenario_endpoints(&grid, &scenarios[i], n, &config.scenarios[i])
                    .expect("checked above");
                let mut rng = ChaCha8Rng::seed_from_u64(row_seed(config.seed, i, n, usize::MAX));
                seed_plan(
                    &grid.graph,
                    starts,
                    goals,
                    config.semantics,
                    Some(time_limit),
                    SEED_PLAN_RETRIES,
                    &mut rng,
                )
            })
            .collect()
    });

    let units: Vec<(usize, Unit)> = pairs
        .iter()
        .enumerate()
        .flat_map(|(p, &(instance, n))| {
            (0..config.iterations).map(move |iteration| {
                (
                    p,
                    Unit {
                        instance,
                        n,
                        iteration,
                    },
                )
            })
        })
        .collect();
    let rows: Vec<Vec<MetricsRow>> = pool.install(|| {
        units
            .par_iter()
            .map(|(p, unit)| run_unit(config, &grid.graph, &map_name, seeds[*p].as_ref(), unit, time_limit))
            .collect()
    });
    Ok(rows.into_iter().flatten().collect())
}

fn run_unit(
    config: &ExperimentConfig,
    graph: &Graph,
    map_name: &str,
    seed_plan: Option<&Plan>,
    unit: &Unit,
    time_limit: Duration,
) -> Vec<MetricsRow> {
    let seed = row_seed(config.seed, unit.instance, unit.n, unit.iteration);
    let blank = |mode: GraphMode, solver: SolverKind, status: &str| MetricsRow {
        map: map_name.to_string(),
        instance: unit.instance,
        n_agents: unit.n,
        iteration: unit.iteration,
        seed,
        graph_mode: mode.as_str().to_string(),
        solver: solver.as_str().to_string(),
        success: 0,
        status: status.to_string(),
        wall_ms: 0.0,
        build_ms: 0.0,
        added_soc: None,
        delays: None,
        conflicts_at_injection: 0,
        expansions: 0,
        low_level_calls: 0,
    };
    let combos = || {
        config
            .graph_modes
            .iter()
            .flat_map(|&m| config.solvers.iter().map(move |&s| (m, s)))
    };

    let Some(base) = seed_plan else {
        return combos().map(|(m, s)| blank(m, s, "no_seed_plan")).collect();
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inject_opts = InjectionOptions {
        semantics: config.semantics,
        length: config.delay_length,
        max_attempts: None,
    };
    let Ok((colliding, records)) =
        inject_multiple_delays(graph, base, config.delays_to_inject, &mut rng, &inject_opts)
    else {
        return combos().map(|(m, s)| blank(m, s, "no_injection")).collect();
    };
    let conflicts = find_conflicts(&colliding, config.semantics, false).len();
    if let Some(dir) = &config.plan_dir {
        let mut doc = PlanDocument::new(graph.clone(), colliding.clone());
        doc.graph_spec = GraphSpec::Grid {
            map: config.map.to_string_lossy().into_owned(),
            delay_policy: config.delay_policy.clone(),
        };
        doc.semantics = Some(config.semantics);
        doc.injections = records.clone();
        let file = dir.join(format!(
            "{map_name}-i{}-n{}-it{}.json",
            unit.instance, unit.n, unit.iteration
        ));
        // a failed write only loses the replay artifact, never the row
        let _ = std::fs::write(file, write_plan(&doc));
    }

    let injected: u64 = records.iter().map(|r| r.length as u64).sum();
    let cap = horizon_bound(&colliding, Some(injected));
    let replan_from = records.iter().map(|r| r.step).min().unwrap_or(0);
    let permissions = DelayPermissions::unrestricted(colliding.agent_count());

    combos()
        .map(|(mode, solver)| {
            let out = repair_plan(&RepairRequest {
                graph,
                plan: &colliding,
                permissions: &permissions,
                semantics: config.semantics,
                mode,
                solver,
                time_limit: Some(time_limit),
                horizon_cap: (mode != GraphMode::Og).then_some(cap),
                replan_from,
            });
            let mut row = blank(mode, solver, out.status.as_str());
            row.conflicts_at_injection = conflicts;
            row.wall_ms = out.stats.wall.as_secs_f64() * 1e3;
            row.build_ms = out.build_time.as_secs_f64() * 1e3;
            row.expansions = out.stats.expansions;
            row.low_level_calls = out.stats.low_level_calls;
            if let Some(plan) = &out.plan {
                if find_conflicts(plan, config.semantics, true).is_empty() {
                    row.success = 1;
                    row.added_soc = out.added_soc;
                    row.delays = out.delays.as_ref().map(|d| d.iter().map(|a| a.total()).sum());
                } else {
                    row.status = "invalid_repair".to_string();
                }
            }
            row
        })
        .collect()
}

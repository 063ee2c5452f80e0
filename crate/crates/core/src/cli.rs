//! Command-line front end.
//!
//! Exit codes: 0 success, 1 error, 2 timeout, 3 infeasible or unsolvable,
//! 4 colliding plan (`validate` only).

use std::path::{Path as FsPath, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hardness::{msc_to_acid, HardnessError, ReductionOptions};
use crate::harness::{
    inject_multiple_delays, load_config, load_grid, repair_plan, run_experiment, scenario_endpoints,
    HarnessError, InjectionOptions, RepairRequest,
};
use crate::io::{
    load_plan, parse_dimacs, parse_scenario, write_metrics_csv, write_plan, DelayPolicy,
    DimacsError, GraphSpec, PlanDocument, PlanFileError,
};
use crate::mapf::{find_conflicts, DelayAssignment, Path, Plan, TailSemantics};
use crate::oracle::{brute_force_acid, AcidOracleOptions, AcidOutcome, OracleError, OracleStrategy};
use crate::reduction::GraphMode;
use crate::solver::{
    cbs_solve, horizon_bound, prioritized_solve, OriginalGraphInstance, SolveOptions, SolveStatus,
    SolverKind,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_TIMEOUT: i32 = 2;
pub const EXIT_UNSOLVABLE: i32 = 3;
pub const EXIT_COLLIDING: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "delay-repair", version, about = "Repair delayed multi-agent plans")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Repair a colliding plan file.
    Repair(RepairArgs),
    /// Compute a seed plan for a map and scenario.
    Solve(SolveArgs),
    /// Inject collision-inducing delays into a plan.
    Inject(InjectArgs),
    /// Run an experiment sweep and write metrics CSV.
    Bench(BenchArgs),
    /// Turn a DIMACS graph into a delay repair instance.
    ReduceMsc(ReduceArgs),
    /// Exact minimum number of delays for a plan file.
    Oracle(OracleArgs),
    /// Check a plan file and list its conflicts.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct SemanticsArg {
    /// Overrides the semantics recorded in the plan file.
    #[arg(long, value_enum)]
    pub semantics: Option<TailSemantics>,
}

#[derive(Debug, Args)]
pub struct RepairArgs {
    pub plan: PathBuf,
    #[arg(long = "graph", value_enum, default_value = "cg")]
    pub mode: GraphMode,
    #[arg(long, value_enum, default_value = "cbs")]
    pub solver: SolverKind,
    /// Seconds.
    #[arg(long, default_value_t = 60.0)]
    pub time_limit: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub semantics: SemanticsArg,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub map: PathBuf,
    #[arg(long)]
    pub scen: PathBuf,
    #[arg(long)]
    pub agents: usize,
    #[arg(long, value_enum, default_value = "prioritized")]
    pub solver: SolverKind,
    #[arg(long, default_value_t = 60.0)]
    pub time_limit: f64,
    #[arg(long, value_enum, default_value = "stay")]
    pub semantics: TailSemantics,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InjectArgs {
    pub plan: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 1)]
    pub length: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub semantics: SemanticsArg,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// DIMACS `.col` file.
    pub graph: PathBuf,
    #[arg(long)]
    pub threshold: u64,
    #[arg(long)]
    pub start_only: bool,
    #[arg(long)]
    pub private_goals: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub plan: PathBuf,
    #[arg(long)]
    pub max_budget: Option<u64>,
    #[arg(long, value_enum, default_value = "auto")]
    pub strategy: OracleStrategy,
    #[command(flatten)]
    pub semantics: SemanticsArg,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub plan: PathBuf,
    #[command(flatten)]
    pub semantics: SemanticsArg,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    PlanFile(#[from] PlanFileError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Hardness(#[from] HardnessError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{path}: {source}")]
    Dimacs { path: PathBuf, source: DimacsError },
    #[error("writing {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

fn write_file(path: &FsPath, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn seconds(s: f64) -> Result<Duration, CliError> {
    Duration::try_from_secs_f64(s)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| CliError::Usage(format!("time limit must be positive, got {s}")))
}

fn status_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Solved => EXIT_OK,
        SolveStatus::Timeout => EXIT_TIMEOUT,
        SolveStatus::Infeasible => EXIT_UNSOLVABLE,
    }
}

fn semantics_for(arg: &SemanticsArg, doc: &PlanDocument) -> TailSemantics {
    arg.semantics.or(doc.semantics).unwrap_or_default()
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_ERROR
            } else {
                EXIT_OK
            }
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Repair(a) => cmd_repair(&a),
        Command::Solve(a) => cmd_solve(&a),
        Command::Inject(a) => cmd_inject(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::ReduceMsc(a) => cmd_reduce_msc(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Validate(a) => cmd_validate(&a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        EXIT_ERROR
    })
}

pub fn cmd_repair(args: &RepairArgs) -> Result<i32, CliError> {
    let doc = load_plan(&args.plan)?;
    let semantics = semantics_for(&args.semantics, &doc);
    let injected = (!doc.injections.is_empty())
        .then(|| doc.injections.iter().map(|r| r.length as u64).sum());
    let out = repair_plan(&RepairRequest {
        graph: &doc.graph,
        plan: &doc.plan,
        permissions: &doc.permissions,
        semantics,
        mode: args.mode,
        solver: args.solver,
        time_limit: Some(seconds(args.time_limit)?),
        horizon_cap: (args.mode != GraphMode::Og).then(|| horizon_bound(&doc.plan, injected)),
        replan_from: doc.injections.iter().map(|r| r.step).min().unwrap_or(0),
    });
    println!("status: {}", out.status.as_str());
    println!(
        "expansions: {}  low-level calls: {}  solve: {:.1} ms  build: {:.1} ms",
        out.stats.expansions,
        out.stats.low_level_calls,
        out.stats.wall.as_secs_f64() * 1e3,
        out.build_time.as_secs_f64() * 1e3
    );
    if let (Some(plan), Some(added)) = (out.plan, out.added_soc) {
        println!("added SOC: {added}");
        println!("sum of costs: {}", plan.sum_of_costs());
        if let Some(path) = &args.out {
            let n = plan.agent_count();
            let repaired = PlanDocument {
                graph_spec: doc.graph_spec.clone(),
                graph: doc.graph.clone(),
                plan,
                delays: out.delays.unwrap_or_else(|| vec![DelayAssignment::new(); n]),
                permissions: doc.permissions.clone(),
                semantics: Some(semantics),
                injections: Vec::new(),
            };
            write_file(path, &write_plan(&repaired))?;
        }
    }
    Ok(status_code(out.status))
}

pub fn cmd_solve(args: &SolveArgs) -> Result<i32, CliError> {
    let grid = load_grid(&args.map, &DelayPolicy::AllVertices)?;
    let text = std::fs::read_to_string(&args.scen).map_err(|source| HarnessError::Io {
        path: args.scen.clone(),
        source,
    })?;
    let entries = parse_scenario(&text).map_err(|source| HarnessError::Scenario {
        path: args.scen.clone(),
        source,
    })?;
    let (starts, goals) = scenario_endpoints(&grid, &entries, args.agents, &args.scen)?;
    let instance = OriginalGraphInstance::new(&grid.graph, starts.clone(), goals.clone());
    let opts = SolveOptions {
        semantics: args.semantics,
        time_limit: Some(seconds(args.time_limit)?),
        horizon_cap: None,
    };
    let sol = match args.solver {
        SolverKind::Cbs => cbs_solve(&instance, &opts),
        SolverKind::Prioritized => {
            let order: Vec<usize> = (0..args.agents).collect();
            prioritized_solve(&instance, &order, &opts).expect("identity order")
        }
    };
    println!("status: {}", sol.status.as_str());
    if sol.is_solved() {
        let paths = sol.paths.into_iter().map(|p| Path::new(p).expect("non-empty")).collect();
        let plan = Plan::new(paths, starts, goals).expect("solver keeps endpoints");
        println!("sum of costs: {}  length: {}", plan.sum_of_costs(), plan.length());
        let mut doc = PlanDocument::new(grid.graph, plan);
        doc.graph_spec = GraphSpec::Grid {
            map: std::path::absolute(&args.map)
                .unwrap_or_else(|_| args.map.clone())
                .to_string_lossy()
                .into_owned(),
            delay_policy: DelayPolicy::AllVertices,
        };
        doc.semantics = Some(args.semantics);
        write_file(&args.out, &write_plan(&doc))?;
    }
    Ok(status_code(sol.status))
}

pub fn cmd_inject(args: &InjectArgs) -> Result<i32, CliError> {
    if args.count == 0 || args.length == 0 {
        return Err(CliError::Usage("count and length must be at least 1".into()));
    }
    let mut doc = load_plan(&args.plan)?;
    let semantics = semantics_for(&args.semantics, &doc);
    if let Some(c) = find_conflicts(&doc.plan, semantics, true).first() {
        return Err(CliError::Usage(format!("input plan already collides: {c}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let opts = InjectionOptions {
        semantics,
        length: args.length,
        max_attempts: None,
    };
    match inject_multiple_delays(&doc.graph, &doc.plan, args.count, &mut rng, &opts) {
        Ok((plan, records)) => {
            for r in &records {
                println!(
                    "agent {} delayed {} at step {} (conflict at t={})",
                    r.agent, r.length, r.step, r.conflict_timestep
                );
            }
            doc.plan = plan;
            doc.injections = records;
            doc.semantics = Some(semantics);
            doc.delays = vec![DelayAssignment::new(); doc.plan.agent_count()];
            write_file(&args.out, &write_plan(&doc))?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            println!("{e}");
            Ok(EXIT_UNSOLVABLE)
        }
    }
}

pub fn cmd_bench(args: &BenchArgs) -> Result<i32, CliError> {
    let mut config = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let rows = run_experiment(&config)?;
    let solved = rows.iter().filter(|r| r.success == 1).count();
    println!("{} rows, {} solved", rows.len(), solved);
    write_file(&args.out, &write_metrics_csv(&rows))?;
    Ok(EXIT_OK)
}

pub fn cmd_reduce_msc(args: &ReduceArgs) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.graph).map_err(|source| HarnessError::Io {
        path: args.graph.clone(),
        source,
    })?;
    let input = parse_dimacs(&text).map_err(|source| CliError::Dimacs {
        path: args.graph.clone(),
        source,
    })?;
    let out = msc_to_acid(
        &input,
        args.threshold,
        ReductionOptions {
            start_only_delays: args.start_only,
            private_goals: args.private_goals,
        },
    )?;
    let n = out.plan.agent_count();
    let mut doc = PlanDocument::new(out.graph, out.plan);
    doc.permissions = out.permissions;
    doc.semantics = Some(if args.private_goals {
        TailSemantics::StayAtGoal
    } else {
        TailSemantics::DisappearAtGoal
    });
    println!(
        "{} agents, {} blocks, {} vertices, budget {}",
        n,
        out.block_count,
        doc.graph.vertex_count(),
        out.budget
    );
    write_file(&args.out, &write_plan(&doc))?;
    Ok(EXIT_OK)
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<i32, CliError> {
    let doc = load_plan(&args.plan)?;
    let opts = AcidOracleOptions {
        semantics: semantics_for(&args.semantics, &doc),
        max_budget: args.max_budget,
        strategy: args.strategy,
        ..Default::default()
    };
    match brute_force_acid(&doc.graph, &doc.plan, &doc.permissions, &opts)? {
        AcidOutcome::Optimal { min_delay, witness } => {
            println!("min delay: {min_delay}");
            for (agent, d) in witness.iter().enumerate().filter(|(_, d)| !d.is_empty()) {
                let waits: Vec<String> = d.iter().map(|(i, k)| format!("{i}x{k}")).collect();
                println!("  agent {agent}: {}", waits.join(" "));
            }
            Ok(EXIT_OK)
        }
        AcidOutcome::Unsolvable { budget } => {
            println!("unsolvable within {budget} delays");
            Ok(EXIT_UNSOLVABLE)
        }
    }
}

pub fn cmd_validate(args: &ValidateArgs) -> Result<i32, CliError> {
    let doc = load_plan(&args.plan)?;
    let semantics = semantics_for(&args.semantics, &doc);
    let conflicts = find_conflicts(&doc.plan, semantics, false);
    println!("agents: {}", doc.plan.agent_count());
    println!("sum of costs: {}", doc.plan.sum_of_costs());
    println!("length: {}", doc.plan.length());
    println!("conflicts: {}", conflicts.len());
    for c in &conflicts {
        println!("  {c}");
    }
    Ok(if conflicts.is_empty() {
        EXIT_OK
    } else {
        EXIT_COLLIDING
    })
}

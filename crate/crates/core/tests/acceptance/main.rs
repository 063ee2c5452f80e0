//! Acceptance criteria, one pass/fail line each.
//!
//! Run with `cargo test --test acceptance`. Positional arguments filter by
//! name, e.g. `cargo test --test acceptance -- criterion_2`.

mod benchmark;
mod examples;
mod suites;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use delay_repair::hardness::coloring_to_delays;
use delay_repair::harness::halt_all_repair;
use delay_repair::mapf::{apply_plan_delays, find_conflicts, DelayAssignment, TailSemantics};
use delay_repair::oracle::{brute_force_acid, brute_force_msc, AcidOracleOptions, AcidOutcome};
use delay_repair::reduction::{build_cg, build_icg, AgentEdgeInstance};
use delay_repair::solver::{cbs_solve, horizon_bound, AgentEdges, SolveOptions};

type Outcome = Result<String, String>;

const SUITE_ONE_SIZE: usize = 200;
const SUITE_ONE_SEED: u64 = 2024;
const SUITE_TWO_SIZE: usize = 50;
const SUITE_TWO_SEED: u64 = 77;

fn stay_oracle(budget: u64) -> AcidOracleOptions {
    AcidOracleOptions {
        max_budget: Some(budget),
        ..Default::default()
    }
}

fn optimal_cbs_soc(inst: &AgentEdgeInstance, cap: usize) -> Option<u64> {
    let sol = cbs_solve(
        inst,
        &SolveOptions {
            semantics: TailSemantics::StayAtGoal,
            time_limit: Some(Duration::from_secs(30)),
            horizon_cap: Some(cap),
        },
    );
    sol.is_solved().then_some(sol.soc)
}

fn criterion_1() -> Outcome {
    let suite = suites::repair_suite(SUITE_ONE_SIZE, SUITE_ONE_SEED);
    let mut thinned = 0;
    for (i, inst) in suite.iter().enumerate() {
        thinned += inst.thinned as usize;
        let oracle = brute_force_acid(&inst.graph, &inst.plan, &inst.permissions, &stay_oracle(inst.halt_all_bound()))
            .map_err(|e| format!("instance {i}: oracle: {e}"))?;
        let Some(min) = oracle.min_delay() else {
            return Err(format!("instance {i}: oracle found no repair within d(n-1)"));
        };
        let expected = inst.plan.sum_of_costs() + min;
        let cap = horizon_bound(&inst.plan, Some(inst.injected_delays()));
        let cg = optimal_cbs_soc(&build_cg(&inst.graph, &inst.plan, &inst.permissions), cap);
        let icg = optimal_cbs_soc(&build_icg(&inst.graph, &inst.plan, &inst.permissions), cap);
        if cg != Some(expected) || icg != Some(expected) {
            return Err(format!(
                "instance {i}: CG {cg:?}, ICG {icg:?}, oracle ‖P‖+min = {expected}"
            ));
        }
    }
    Ok(format!(
        "{} instances ({thinned} with thinned permissions): CG = ICG = ‖P‖ + oracle minimum",
        suite.len()
    ))
}

fn criterion_2() -> Outcome {
    let graphs = suites::coloring_suite(SUITE_TWO_SIZE, SUITE_TWO_SEED);
    let mut figure = None;
    for (i, g) in graphs.iter().enumerate() {
        let msc = brute_force_msc(g).map_err(|e| format!("graph {i}: {e}"))?;
        let (threshold, out) = suites::reduce_with_greedy_threshold(g);
        let opts = AcidOracleOptions {
            semantics: TailSemantics::DisappearAtGoal,
            max_budget: Some(threshold),
            ..Default::default()
        };
        let acid = brute_force_acid(&out.graph, &out.plan, &out.permissions, &opts)
            .map_err(|e| format!("graph {i}: oracle: {e}"))?
            .min_delay();
        if acid != Some(msc.min_sum) {
            return Err(format!("graph {i} {:?}: coloring {} vs delays {acid:?}", g.edges(), msc.min_sum));
        }
        let delays = coloring_to_delays(&out, &msc.coloring, TailSemantics::DisappearAtGoal)
            .map_err(|e| format!("graph {i}: optimal coloring rejected: {e}"))?;
        let total: u64 = delays.iter().map(DelayAssignment::total).sum();
        let repaired = apply_plan_delays(&out.graph, &out.plan, &out.permissions, &delays)
            .map_err(|e| format!("graph {i}: {e}"))?;
        if total != msc.min_sum || !find_conflicts(&repaired, TailSemantics::DisappearAtGoal, true).is_empty() {
            return Err(format!("graph {i}: coloring delays total {total}, expected {}", msc.min_sum));
        }
        if i == 0 {
            figure = Some(msc.min_sum);
        }
    }
    if figure != Some(3) {
        return Err(format!("figure graph optimum {figure:?}, expected 3"));
    }
    Ok(format!(
        "{} graphs: minimum color sum = minimum delay, figure graph = 3",
        graphs.len()
    ))
}

fn structural_violations(inst_cg: &AgentEdgeInstance, inst_icg: &AgentEdgeInstance) -> Option<String> {
    for agent in 0..inst_cg.agent_count() {
        for v in inst_cg.agent_vertices(agent) {
            if inst_cg.out_degree(agent, v) > 2 || inst_icg.out_degree(agent, v) > 2 {
                return Some(format!("agent {agent}: out-degree above two at {v:?}"));
            }
        }
        let cg = inst_cg.edges(agent);
        if let Some(e) = inst_icg.edges(agent).into_iter().find(|e| !cg.contains(e)) {
            return Some(format!("agent {agent}: ICG edge {e:?} missing from CG"));
        }
    }
    None
}

fn criterion_3() -> Outcome {
    let mut checked = 0;
    for (i, inst) in suites::repair_suite(SUITE_ONE_SIZE, SUITE_ONE_SEED).iter().enumerate() {
        let cg = build_cg(&inst.graph, &inst.plan, &inst.permissions);
        let icg = build_icg(&inst.graph, &inst.plan, &inst.permissions);
        if let Some(v) = structural_violations(&cg, &icg) {
            return Err(format!("repair instance {i}: {v}"));
        }
        checked += 1;
    }
    for (i, g) in suites::coloring_suite(SUITE_TWO_SIZE, SUITE_TWO_SEED).iter().enumerate() {
        let (_, out) = suites::reduce_with_greedy_threshold(g);
        let cg = build_cg(&out.graph, &out.plan, &out.permissions);
        let icg = build_icg(&out.graph, &out.plan, &out.permissions);
        if let Some(v) = structural_violations(&cg, &icg) {
            return Err(format!("reduction instance {i}: {v}"));
        }
        checked += 1;
    }
    Ok(format!("{checked} CG/ICG pairs: out-degree at most two, ICG contained in CG"))
}

fn criterion_4() -> Outcome {
    let suite = suites::repair_suite(SUITE_ONE_SIZE, SUITE_ONE_SEED);
    let mut tight = 0;
    for (i, inst) in suite.iter().enumerate() {
        let bound = inst.halt_all_bound();
        let halt = halt_all_repair(&inst.graph, &inst.plan, &inst.injections, &inst.permissions)
            .map_err(|e| format!("instance {i}: halt-all: {e}"))?;
        if !find_conflicts(&halt.plan, TailSemantics::StayAtGoal, true).is_empty() {
            return Err(format!("instance {i}: halt-all repair still collides"));
        }
        let min = brute_force_acid(&inst.graph, &inst.plan, &inst.permissions, &stay_oracle(bound))
            .map_err(|e| format!("instance {i}: oracle: {e}"))?
            .min_delay()
            .ok_or(format!("instance {i}: unsolvable"))?;
        if !(min <= halt.added_soc && halt.added_soc <= bound) {
            return Err(format!(
                "instance {i}: oracle {min}, halt-all {}, bound {bound}",
                halt.added_soc
            ));
        }
        tight += (min == halt.added_soc) as usize;
    }
    Ok(format!(
        "{} instances: oracle <= halt-all <= d(n-1); halt-all optimal on {tight}",
        suite.len()
    ))
}

fn criterion_5() -> Outcome {
    benchmark::desk_benchmark()
}

fn criterion_6() -> Outcome {
    let mut lines = Vec::new();
    for ex in [examples::postponed_delay(), examples::long_delay()] {
        let (agent, index, waits) = ex.naive;
        let mut naive = vec![DelayAssignment::new(); ex.plan.agent_count()];
        naive[agent].add(index, waits);
        let naive_plan = apply_plan_delays(&ex.graph, &ex.plan, &ex.permissions, &naive)
            .map_err(|e| format!("{}: {e}", ex.name))?;
        if find_conflicts(&naive_plan, TailSemantics::StayAtGoal, true).is_empty() {
            return Err(format!("{}: the naive wait already resolves the instance", ex.name));
        }
        let oracle = brute_force_acid(&ex.graph, &ex.plan, &ex.permissions, &AcidOracleOptions::default())
            .map_err(|e| format!("{}: {e}", ex.name))?;
        let AcidOutcome::Optimal { min_delay, .. } = oracle else {
            return Err(format!("{}: oracle found no repair", ex.name));
        };
        if min_delay != ex.expected_min_delay {
            return Err(format!("{}: oracle {min_delay}, fixed value {}", ex.name, ex.expected_min_delay));
        }
        let cap = horizon_bound(&ex.plan, None);
        let cg = build_cg(&ex.graph, &ex.plan, &ex.permissions);
        let soc = optimal_cbs_soc(&cg, cap).ok_or(format!("{}: CBS on CG failed", ex.name))?;
        let added = soc - ex.plan.sum_of_costs();
        if added != min_delay {
            return Err(format!("{}: CBS on CG added {added}, oracle {min_delay}", ex.name));
        }
        lines.push(format!("{} = {added}", ex.name));
    }
    Ok(format!("CBS on CG matches the oracle: {}", lines.join(", ")))
}

fn criterion_7() -> Outcome {
    benchmark::determinism()
}

fn criterion_8() -> Outcome {
    let suite = suites::repair_suite(SUITE_ONE_SIZE, SUITE_ONE_SEED);
    let mut same = 0;
    for (i, inst) in suite.iter().enumerate() {
        let budget = Some(inst.halt_all_bound());
        let run = |semantics| {
            let opts = AcidOracleOptions {
                semantics,
                max_budget: budget,
                ..Default::default()
            };
            brute_force_acid(&inst.graph, &inst.plan, &inst.permissions, &opts).map(|o| o.min_delay())
        };
        let stay = run(TailSemantics::StayAtGoal).map_err(|e| format!("instance {i}: {e}"))?;
        let gone = run(TailSemantics::DisappearAtGoal).map_err(|e| format!("instance {i}: {e}"))?;
        if stay == gone {
            same += 1;
        } else {
            println!("    instance {i}: stay {stay:?}, disappear {gone:?}");
        }
    }
    let rate = same as f64 / suite.len() as f64;
    let summary = format!("{same}/{} instances agree ({:.1}%)", suite.len(), rate * 100.0);
    if rate >= 0.95 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn() -> Outcome); 8] = [
        ("criterion_1", "CG and ICG optimal repairs equal the exhaustive optimum", criterion_1),
        ("criterion_2", "coloring reduction round trip", criterion_2),
        ("criterion_3", "CG/ICG structure", criterion_3),
        ("criterion_4", "halt-all upper bound", criterion_4),
        ("criterion_5", "desk-scale benchmark trend", criterion_5),
        ("criterion_6", "example instances", criterion_6),
        ("criterion_7", "bench determinism", criterion_7),
        ("criterion_8", "tail semantics agreement", criterion_8),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, title, run) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let started = Instant::now();
        let outcome = run();
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("{name} [{title}]: PASS ({secs:.2}s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("{name} [{title}]: FAIL ({secs:.2}s) {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

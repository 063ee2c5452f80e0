//! Sweeps run through the experiment harness and the command line.

use std::path::Path;

use delay_repair::cli::run_from;
use delay_repair::harness::{random_grid_map, random_scenario, run_experiment, ExperimentConfig};
use delay_repair::io::{render_map, render_scenario, MetricsRow, TIMING_COLUMNS, METRICS_HEADER};
use delay_repair::mapf::TailSemantics;
use delay_repair::reduction::GraphMode;
use delay_repair::solver::SolverKind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Outcome;

fn write(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Generated 32x32 map with 10% obstacles, 10 seeds spread over 40 to 80
/// agents, one injected delay, 60 s per solve, CBS on OG, CG and ICG.
pub fn desk_benchmark() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let map = random_grid_map(32, 32, 0.1, &mut ChaCha8Rng::seed_from_u64(32));
    let map_path = dir.path().join("random-32-32-10.map");
    write(&map_path, &render_map(&map))?;

    let mut rows: Vec<MetricsRow> = Vec::new();
    for seed in 0..10u64 {
        let n = 40 + (40 * seed as usize) / 9;
        let scen = random_scenario(&map, "random-32-32-10.map", n, &mut ChaCha8Rng::seed_from_u64(1000 + seed));
        let scen_path = dir.path().join(format!("seed{seed}.scen"));
        write(&scen_path, &render_scenario(&scen))?;
        let config = ExperimentConfig {
            map: map_path.clone(),
            scenarios: vec![scen_path],
            agent_counts: vec![n],
            delays_to_inject: 1,
            delay_length: 1,
            iterations: 1,
            time_limit: 60.0,
            seed,
            graph_modes: vec![GraphMode::Og, GraphMode::Cg, GraphMode::Icg],
            solvers: vec![SolverKind::Cbs],
            semantics: TailSemantics::StayAtGoal,
            delay_policy: Default::default(),
            workers: 1,
            plan_dir: None,
        };
        rows.extend(run_experiment(&config).map_err(|e| e.to_string())?);
    }

    let of = |mode: &'static str| rows.iter().filter(move |r| r.graph_mode == mode);
    let rate = |mode: &'static str| {
        let total = of(mode).count().max(1);
        of(mode).filter(|r| r.success == 1).count() as f64 / total as f64
    };
    let (og, cg, icg) = (rate("OG"), rate("CG"), rate("ICG"));
    let mut og_times = Vec::new();
    let mut cg_times = Vec::new();
    for c in of("CG").filter(|r| r.success == 1) {
        if let Some(o) = of("OG").find(|o| o.seed == c.seed && o.n_agents == c.n_agents && o.success == 1) {
            og_times.push(o.wall_ms);
            cg_times.push(c.wall_ms);
        }
    }
    let mutual = og_times.len();
    let mut detail = format!(
        "success OG {:.0}%, CG {:.0}%, ICG {:.0}%; {mutual} mutually solved",
        og * 100.0,
        cg * 100.0,
        icg * 100.0
    );
    let mut ok = cg > og && icg > og;
    if mutual > 0 {
        let (m_og, m_cg) = (median(og_times), median(cg_times));
        detail += &format!(", median solve OG {m_og:.1} ms vs CG {m_cg:.1} ms");
        ok &= m_cg < m_og;
    }
    for r in &rows {
        println!(
            "    n={} seed={} {}: {} {:.1} ms added={:?}",
            r.n_agents, r.seed, r.graph_mode, r.status, r.wall_ms, r.added_soc
        );
    }
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn without_timing(csv: &str) -> Vec<Vec<String>> {
    let drop: Vec<usize> = TIMING_COLUMNS
        .iter()
        .map(|c| METRICS_HEADER.iter().position(|h| h == c).unwrap())
        .collect();
    csv.lines()
        .map(|l| {
            l.split(',')
                .enumerate()
                .filter(|(i, _)| !drop.contains(i))
                .map(|(_, f)| f.to_string())
                .collect()
        })
        .collect()
}

/// Two `bench` runs with the same config and seed.
pub fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let map = random_grid_map(12, 12, 0.1, &mut ChaCha8Rng::seed_from_u64(12));
    write(&dir.path().join("small.map"), &render_map(&map))?;
    let scen = random_scenario(&map, "small.map", 10, &mut ChaCha8Rng::seed_from_u64(13));
    write(&dir.path().join("small.scen"), &render_scenario(&scen))?;
    let config = serde_json::json!({
        "map": "small.map",
        "scenarios": ["small.scen"],
        "agent_counts": [5, 10],
        "iterations": 3,
        "time_limit": 30.0,
        "seed": 11,
        "graph_modes": ["og", "cg", "icg"],
        "solvers": ["cbs", "prioritized"],
        "plan_dir": "plans"
    });
    let config_path = dir.path().join("bench.json");
    write(&config_path, &config.to_string())?;

    let mut outputs = Vec::new();
    for run in 0..2 {
        let out = dir.path().join(format!("run{run}.csv"));
        let code = run_from(["delay-repair", "bench", config_path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        if code != 0 {
            return Err(format!("bench exited with {code}"));
        }
        outputs.push(std::fs::read_to_string(&out).map_err(|e| e.to_string())?);
    }
    let rows = outputs[0].lines().count() - 1;
    let solved = outputs[0].lines().filter(|l| l.contains(",solved,")).count();
    if rows != 2 * 3 * 3 * 2 {
        return Err(format!("expected 36 rows, got {rows}"));
    }
    if without_timing(&outputs[0]) != without_timing(&outputs[1]) {
        return Err("CSV outputs differ outside the timing columns".into());
    }
    Ok(format!("{rows} rows ({solved} solved) identical apart from wall-clock columns"))
}

//! File formats: MovingAI maps and scenarios, plan files, metrics CSV and
//! DIMACS graphs.

mod dimacs;
mod map;
mod metrics;
mod plan_file;
mod scen;

pub use dimacs::{parse_dimacs, render_dimacs, DimacsError};
pub use map::{grid_to_graph, parse_map, render_map, DelayPolicy, GridGraph, GridMap, MapError};
pub use metrics::{read_metrics_csv, write_metrics_csv, MetricsRow, METRICS_HEADER, TIMING_COLUMNS};
pub use plan_file::{
    load_plan, read_plan, write_plan, GraphSpec, PlanDocument, PlanFileError, PLAN_FORMAT,
    PLAN_VERSION,
};
pub use scen::{parse_scenario, render_scenario, ScenarioEntry, ScenarioError};

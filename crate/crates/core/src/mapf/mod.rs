//! Graphs, paths, plans, collision semantics and delay construction.

mod conflict;
mod delay;
mod graph;
mod plan;

pub use conflict::{
    detect_conflicts, find_conflicts, is_conflict_free, Conflict, ConflictKind, ConflictLocation,
    ConflictScanner,
};
pub use delay::{
    apply_delays, apply_plan_delays, strip_delays, DelayAssignment, DelayError, DelayPermissions,
};
pub use graph::{Graph, GraphError, VertexId};
pub use plan::{plan_length, sum_of_costs, validate_path, EmptyPath, Path, Plan, PlanError, TailSemantics};

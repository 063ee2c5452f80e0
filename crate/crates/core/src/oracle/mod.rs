//! Exhaustive reference solvers for small instances.

mod acid;
mod msc;

use thiserror::Error;

pub use acid::{brute_force_acid, eligible_slots, AcidOracleOptions, AcidOutcome, OracleStrategy};
pub use msc::{
    brute_force_msc, coloring_sum, greedy_coloring, MscOptimum, UndirectedGraph,
    UndirectedGraphError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large: {size} {what} exceeds the limit of {limit}")]
    InstanceTooLarge {
        what: &'static str,
        size: usize,
        limit: usize,
    },
}

//! Plan repair for multi-agent path finding by delay introduction.

pub mod cli;
pub mod hardness;
pub mod harness;
pub mod io;
pub mod mapf;
pub mod oracle;
pub mod reduction;
pub mod solver;

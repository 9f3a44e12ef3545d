//! Config parsing, command dispatch and report assembly for the binary.

mod commands;
mod config;
mod report;

pub use commands::{Command, RunOptions, Runner};
pub use config::{
    AlgebraSpec, AutomorphismSpec, Blocks, Model, RunConfig, Scalar, Solver, Tau, Tolerances,
    Truncation,
};
pub use report::{Check, Report};

/// Caps the global rayon pool. Only the first call has an effect.
pub fn set_threads(n: usize) -> crate::Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| crate::Error::Internal(e.to_string()))
}

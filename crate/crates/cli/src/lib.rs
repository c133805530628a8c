//! Experiment runner for gradient descent with inexact gradient and value oracles.
//!
//! The binary `inexact-gd` wraps [`cli::main_with_args`]; everything it does is reachable
//! from this library so tests can drive commands in-process.

use std::fmt;

pub mod cli;
pub mod experiments;
pub mod output;
pub mod problem;
pub mod runner;
pub mod spec;
pub mod validate;

/// Rejected command line or configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VALIDATION_FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const OVERFLOW: i32 = 3;
}

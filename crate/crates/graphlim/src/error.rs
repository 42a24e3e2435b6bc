//! Error type shared by all modules.
//!
//! Guard violations carry the identifier of the design decision that
//! introduced the guard (see the decision register in the README) so that
//! CLI diagnostics can name it.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An exact oracle was asked for an instance above its size guard.
    #[error("exact-limit exceeded: {what} [decision {decision}]")]
    ExactLimit { what: String, decision: &'static str },

    /// Enumeration or evaluation cost would exceed the configured budget.
    #[error("cost guard exceeded: {what} [decision {decision}]")]
    CostGuard { what: String, decision: &'static str },

    #[error("incompatible partitions: {0}")]
    IncompatiblePartitions(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("infeasible rounding unit: {0}")]
    InfeasibleUnit(String),

    /// Refinement loops abort instead of allocating astronomically many
    /// classes [decision D-11].
    #[error("class cap exceeded: {classes} > {cap} [decision D-11]")]
    ClassCap { classes: usize, cap: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

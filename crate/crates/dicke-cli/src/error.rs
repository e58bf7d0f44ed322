//! Failure modes and their process exit codes.

use std::fmt;

/// Everything that can abort a command, sorted by who has to fix it:
/// configuration problems exit 2, integrator non-convergence exits 3, and
/// violated physical or structural invariants exit 4.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable, unparsable, or physically invalid run configuration.
    Config(String),
    /// The integrator gave up or the result failed its norm check.
    NonConvergence(String),
    /// A model invariant did not hold (oracle disagreement, unresolvable
    /// truncation, inconsistent schedule).
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::NonConvergence(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }

    /// Classifies a library error raised after the configuration was already
    /// accepted: convergence failures keep their own exit code, everything
    /// else counts as a broken invariant.
    pub fn from_compute(e: dicke_sim::Error) -> Self {
        match e {
            dicke_sim::Error::NonConvergence(_) => CliError::NonConvergence(e.to_string()),
            other => CliError::Invariant(other.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::NonConvergence(m) => write!(f, "non-convergence: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violation: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

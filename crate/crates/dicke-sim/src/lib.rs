//! Pulse-schedule synthesis and simulation for the symmetric subspace of `N`
//! identically coupled two-level systems.
//!
//! When every qubit couples to the same mode and to the same classical drive,
//! the permutation-symmetric states form a closed `(N + 1)`-level ladder. An
//! exchange interaction `λ S⁺S⁻` makes that ladder anharmonic, so each step
//! `k → k + 1` has its own transition frequency and can be addressed
//! selectively by a weak resonant pulse. This crate provides:
//!
//! - [`dicke`]: the ladder basis, collective spin operators, level shifts, and
//!   physical parameters;
//! - [`pulse`]: a compiler that turns an arbitrary target superposition into a
//!   sequence of resonant pulse segments (frequency, phase, duration), plus
//!   the closed-form ideal propagator used to verify it;
//! - [`dynamics`]: lab- and rotating-frame Schrödinger integration of a
//!   schedule under the full ladder Hamiltonian, fidelity and leakage
//!   diagnostics;
//! - [`cavity`]: the dispersive cavity realization of the exchange term, with
//!   a full atoms-plus-mode model to validate the effective one;
//! - [`budget`]: analytic error estimates (decoherence and off-resonant
//!   leakage) for a compiled schedule;
//! - [`fullspace`]: a brute-force `2^N` product-basis oracle used to check
//!   that the symmetric-subspace reduction is exact.

pub mod budget;
pub mod cavity;
pub mod dicke;
pub mod dynamics;
pub mod fullspace;
pub(crate) mod ode;
pub mod pulse;

pub(crate) mod serde_c64;

/// Complex double-precision scalar used for all amplitudes.
pub type C64 = num_complex::Complex64;

/// Errors produced by schedule compilation, integration, and model checks.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A ladder level index outside `0..=N`.
    #[error("ladder level {k} out of range for {n} qubits (valid levels are 0..={n})")]
    InvalidLevel { k: usize, n: usize },

    /// No upward transition exists from the top of the ladder.
    #[error("no upward transition from the top ladder level k = {k}")]
    NoTransition { k: usize },

    /// Product-basis operations are capped to keep `2^N` tractable.
    #[error("{n} qubits exceeds the product-basis limit of {max}")]
    CapacityExceeded { n: usize, max: usize },

    /// A state labeled normalized was not.
    #[error("state norm² = {norm_sq} differs from 1 by more than {tol}")]
    NotNormalized { norm_sq: f64, tol: f64 },

    /// Two states (or a state and an operator) of different dimension.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A parameter failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The target amplitudes cannot be produced by the ladder protocol.
    #[error("infeasible target: {0}")]
    InfeasibleTarget(String),

    /// The target addresses more ladder steps than `N` qubits provide.
    #[error("target spans {k} ladder steps but only {n} are available")]
    OutOfLadder { k: usize, n: usize },

    /// The step-size controller could not meet the requested tolerance.
    #[error("integrator failed to converge: {0}")]
    NonConvergence(String),

    /// The photon-number cutoff was reached and could not be raised further.
    #[error("photon-number truncation insufficient: {0}")]
    TruncationInsufficient(String),

    /// A schedule violated its structural invariants.
    #[error("inconsistent schedule: {0}")]
    InvalidSchedule(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

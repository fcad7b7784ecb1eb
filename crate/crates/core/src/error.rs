// SPDX-License-Identifier: MIT OR Apache-2.0

//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors raised by validation, cell-problem solves and spectral solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The plane elasticity tensor of a phase is not positive definite.
    #[error("phase {phase}: elasticity tensor is not positive definite ({detail})")]
    NonPositiveDefinite { phase: usize, detail: String },

    /// A set of dimensionless groups cannot be turned into a dimensional cell.
    #[error("inconsistent ratios: {0}")]
    InconsistentRatios(String),

    /// A cell or phase violates one or more invariants.
    #[error("invalid cell: {}", .0.join("; "))]
    InvalidCell(Vec<String>),

    /// Configuration file or command-line input could not be accepted.
    #[error("configuration error: {0}")]
    Config(String),

    /// Two piecewise polynomials live on different cell partitions.
    #[error("piecewise polynomials are defined on different partitions")]
    PartitionMismatch,

    /// A diffusion coefficient of a cell problem is not strictly positive.
    #[error("cell problem coefficient must be positive, got a = ({0}, {1})")]
    DegenerateCoefficient(f64, f64),

    /// The solved cell problem fails its flux balance.
    #[error("cell problem is not solvable: residual {0:e}")]
    SolvabilityViolated(f64),

    /// A requested perturbation function is not part of the computed set.
    #[error("unknown perturbation function `{name}`; valid names: {}", .valid.join(", "))]
    UnknownFunction { name: String, valid: Vec<String> },

    /// The leading matrix coefficient of a polynomial eigenproblem is singular.
    #[error("leading block of the matrix polynomial is singular (|det| = {0:e})")]
    SingularLeadingBlock(f64),

    /// The matrix exponential needed more squarings than allowed.
    #[error("matrix exponential diverged: {0} squarings requested")]
    ExponentialDivergence(u32),

    /// The transfer matrix lost unimodularity to rounding, typically because
    /// an evanescent wave decays by more than machine precision per cell.
    #[error("transfer matrix is numerically singular: |det T - 1| = {det_defect:e}, |T| = {norm:e}")]
    IllConditionedTransfer { det_defect: f64, norm: f64 },

    /// An eigenvalue or root iteration failed to converge.
    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    /// A solver failure annotated with the frequency at which it happened.
    #[error("at omega_bar = {omega_bar}: {source}")]
    AtFrequency {
        omega_bar: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for errors caused by invalid user input rather than by a solver.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::NonPositiveDefinite { .. }
            | Error::InconsistentRatios(_)
            | Error::InvalidCell(_)
            | Error::Config(_)
            | Error::UnknownFunction { .. } => true,
            Error::AtFrequency { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

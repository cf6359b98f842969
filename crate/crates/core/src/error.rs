use thiserror::Error;

/// Errors produced by distribution construction, integration, and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("absolute continuity violated at x = {x}: null mass {null_mass}, alternative mass {alt_mass}")]
    AbsoluteContinuity { x: f64, null_mass: f64, alt_mass: f64 },

    #[error("integration error: f({x}) = {value} at a point with mass {mass}")]
    Integration { x: f64, value: f64, mass: f64 },

    #[error("point x = {0} is not on the working grid")]
    NotOnGrid(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible bounds: require 0 <= c1 <= 1 <= c2, got c1 = {c1}, c2 = {c2}")]
    InfeasibleBounds { c1: f64, c2: f64 },

    #[error("infeasible constraint: {0}")]
    Infeasible(String),

    #[error("solver failed to converge: {context} (best iterate {best}, residual {residual})")]
    SolverFailure { context: String, best: f64, residual: f64 },

    #[error("stochastic dominance violated by composite member {member}: {detail}")]
    DominanceViolation { member: String, detail: String },

    #[error("lift refused: {0}")]
    LiftRefused(String),

    #[error("oracle refused: support size {n} exceeds cap {cap}")]
    OracleRefused { n: usize, cap: usize },

    #[error("convex penalty check failed: {0}")]
    PenaltyCheck(String),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

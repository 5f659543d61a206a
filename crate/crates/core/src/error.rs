use crate::nonlinear::SolveReport;

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("alpha must lie strictly inside (1, 2), got {0}")]
    InvalidOrder(f64),

    #[error("beta must lie strictly inside (0, 1), got {0}")]
    InvalidBeta(f64),

    #[error("invalid interval [{a}, {b}]: endpoints must be finite with a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("{what} needs at least {min} points, got {got}")]
    TooFewPoints {
        what: &'static str,
        min: usize,
        got: usize,
    },

    #[error("grid nodes must be strictly increasing (violation at index {index})")]
    NodesNotIncreasing { index: usize },

    #[error("grid has {nodes} nodes but {values} values")]
    LengthMismatch { nodes: usize, values: usize },

    #[error(
        "grid spans [{got_a}, {got_b}] but the problem interval is [{expected_a}, {expected_b}]"
    )]
    GridIntervalMismatch {
        expected_a: f64,
        expected_b: f64,
        got_a: f64,
        got_b: f64,
    },

    #[error("integrand returned a non-finite value at s = {node}")]
    NonFiniteEvaluation { node: f64 },

    #[error("function is not finite at the sampled point (t, x) = ({t}, {x})")]
    NonFiniteSample { t: f64, x: f64 },

    #[error("{name} = {value} lies outside the admissible range ({lo}, {hi})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("bracket violated at t = {t}: lower {lower} exceeds upper {upper}")]
    BracketViolation { t: f64, lower: f64, upper: f64 },

    #[error("boundary sign condition violated for the {what} at t = {t}: {value}")]
    BoundarySign {
        what: &'static str,
        t: f64,
        value: f64,
    },

    #[error(
        "fixed-point iteration did not converge within {iterations} iterations \
         (final update norm {final_update})"
    )]
    NonConvergence {
        iterations: usize,
        final_update: f64,
        /// State of the iteration when the budget ran out.
        report: Box<SolveReport>,
    },

    #[error("power iteration stalled: relative change {relative_change} after {steps} steps")]
    PowerIterationStalled { steps: usize, relative_change: f64 },

    #[error("tridiagonal eigensolver failed to converge")]
    EigensolverFailed,

    #[error("positivity hypothesis violated at t = {t}: u = {value}")]
    PositivityViolation { t: f64, value: f64 },

    #[error("function must vanish at the boundary: |u({end})| = {value}")]
    BoundaryNotZero { end: f64, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

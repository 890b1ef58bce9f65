use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid of size {grid} is too coarse for degree {degree}")]
    GridTooCoarse { grid: usize, degree: u64 },
    #[error("grid size {0} is not a power of two >= 8")]
    BadGrid(usize),
    #[error("grid sizes differ: {0} vs {1}")]
    GridMismatch(usize, usize),
    #[error("dilation {r} must exceed 3 * deg g = {bound}")]
    DilationTooSmall { r: u64, bound: u64 },
    #[error("step approximation to {target} needs more than {max_arcs} arcs")]
    TargetUnreachable { target: f64, max_arcs: usize },
    #[error("arc of length {length} plus ramps does not fit on the circle")]
    InfeasibleRamp { length: f64 },
    #[error("epsilon {0} outside (0, 2)")]
    InvalidEpsilon(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("synthesis infeasible up to degree {max_degree}: {reason}")]
    Infeasible { max_degree: usize, reason: String },
    #[error("sub-construction failed: {0}")]
    SynthFailed(String),
    #[error("|psi| >= a on a non-null part of U (max {max_on_u} vs a = {a})")]
    ClippingInfeasible { max_on_u: f64, a: f64 },
    #[error("round {round} infeasible at clause {clause}: {detail}")]
    RoundInfeasible {
        round: usize,
        clause: String,
        detail: String,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

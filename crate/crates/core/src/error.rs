use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("exponent p = {p} is not subcritical in dimension {d} (needs p < {bound})")]
    Supercritical { d: usize, p: f64, bound: f64 },

    #[error("shooting bracket [{lo}, {hi}] does not straddle the crossing/decay transition")]
    NoBracket { lo: f64, hi: f64 },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("quadrature tail contribution {tail:e} exceeds tolerance {tol:e}")]
    QuadratureTailLoss { tail: f64, tol: f64 },

    #[error("strip grid reaches radius {needed} but the profile only resolves up to {available}")]
    RangeMismatch { needed: f64, available: f64 },

    #[error("iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("converged mode changes sign: {0}")]
    NonPositiveMode(String),

    #[error("lambda1 = {0} is not positive; the trivial branch never destabilizes")]
    NonPositive(f64),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("inner conjugate-gradient solve failed after {iterations} iterations (relative residual {residual:e})")]
    NonConvergedLinearSolve { iterations: usize, residual: f64 },

    #[error("initial field is identically zero")]
    ZeroField,

    #[error("right-hand side has a kernel component {component:e} above tolerance {tol:e}")]
    SingularProjection { component: f64, tol: f64 },

    #[error("pitchfork coefficient mu = {mu} gives a negative radicand on both sides of L*")]
    NegativeRadicandBothSides { mu: f64 },

    #[error("need at least {needed} nontrivial points near the transition, found {found}")]
    InsufficientPoints { needed: usize, found: usize },

    #[error("mass integral diverges for N = 4; use the logarithmic expansion")]
    DivergentMass,

    #[error("eps = {0} is outside the asymptotic regime (eps <= 0.2)")]
    EpsTooLarge(f64),

    #[error("bad config at `{path}`: {reason}")]
    BadConfig { path: String, reason: String },

    #[error("factorization broke down at row {row} (pivot {pivot:e})")]
    Breakdown { row: usize, pivot: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

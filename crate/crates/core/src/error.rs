use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular point: r = 0")]
    SingularPoint,

    #[error("unbound state: H = {energy} is not negative")]
    UnboundState { energy: f64 },

    #[error("zero angular momentum: |L| = {magnitude:e}")]
    ZeroAngularMomentum { magnitude: f64 },

    #[error("degenerate invariants: {what} = {value:e} is within the guard threshold")]
    DegenerateInvariants { what: &'static str, value: f64 },

    #[error("finite-difference stencil hit a singular point along coordinate {coordinate}")]
    StencilFailure { coordinate: usize },

    #[error("step size control failed at t = {t}: step {step:e} too small")]
    StepFailure { t: f64, step: f64 },

    #[error("trajectory left the admissible domain at t = {t}: {source}")]
    DomainExit {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid spin {0}: 2s must be a nonnegative integer")]
    InvalidSpin(f64),

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("hbar mismatch: {left} vs {right}")]
    HbarMismatch { left: f64, right: f64 },

    #[error("operator is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("operator is not hermitean: |A - A^H| = {deviation:e}")]
    NotHermitean { deviation: f64 },

    #[error("Jordan-Kurosh system incompatible: residual weight {norm:e} on singular pairs")]
    Incompatible { norm: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

use num_complex::Complex64;
use thiserror::Error;

use crate::evolution::EvolutionTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("derivative of the peakon is undefined at the crest")]
    PeakSingularity,

    #[error("kernel evaluated on its singular line at ({xi}, {eta})")]
    SingularLine { xi: f64, eta: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge (estimate {estimate:e}, error {error:e})")]
    QuadratureDiverged { estimate: f64, error: f64 },

    #[error("lambda = {lambda} lies outside the admissible band (0, {edge})")]
    OutOfBand { lambda: Complex64, edge: f64 },

    #[error("lambda + b = {0} is a logarithmic case")]
    LogCase(f64),

    #[error("dense eigensolve refused: n = {n} exceeds cap {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("eigensolve failed: {0}")]
    Eigensolve(String),

    #[error("CFL violated: dt = {dt} > {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("blow-up at t = {t}: sup norm {sup:e} exceeds cap {cap:e}")]
    BlowUp {
        t: f64,
        sup: f64,
        cap: f64,
        partial: Box<EvolutionTrace>,
    },

    #[error("initial data violates the crest constraint: |v(0)| = {value:e} > {tol:e}")]
    Constraint { value: f64, tol: f64 },

    #[error("fit window [{0}, {1}] contains too few samples")]
    EmptyWindow(f64, f64),

    #[error("non-positive norm at t = {0}")]
    NonPositiveNorm(f64),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureDiverged { .. }
                | Error::Eigensolve(_)
                | Error::Cfl { .. }
                | Error::BlowUp { .. }
                | Error::NonPositiveNorm(_)
        )
    }
}

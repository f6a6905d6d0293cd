use thiserror::Error;

use crate::correlations::G2Estimate;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("linearization failed: {0}")]
    LinearizationFailure(String),

    #[error("fixed-point iteration did not converge after {iterations} iterations (residual {residual:e})")]
    FixedPointDivergence { iterations: usize, residual: f64 },

    #[error("infeasible target: {0}")]
    InfeasibleTarget(String),

    #[error("effective microwave detuning must be positive, got {0}")]
    InvalidDetuning(f64),

    #[error("coupling G = {g} is at or beyond the critical point G_cp = {g_cp}")]
    BeyondCriticalPoint { g: f64, g_cp: f64 },

    #[error("Kerr denominator {gap:e} is below the divergence floor (eta would be {eta:e})")]
    CriticalDivergence { gap: f64, eta: f64 },

    #[error("quadrature did not reach tolerance (g2 = {}, error bound {:e})", .0.g2, .0.error_bound)]
    QuadratureNotConverged(Box<G2Estimate>),

    #[error("Fock truncation too small: discarded norm {0:e}")]
    InsufficientTruncation(f64),

    #[error("Kerr phase {phase_over_two_pi} x 2pi has no rational approximation with denominator <= {q_max}")]
    NonStroboscopicPhase { phase_over_two_pi: f64, q_max: u32 },

    #[error("cat components unresolvable at q = {q}: Gram condition {condition:e}")]
    UnresolvableComponents { q: u32, condition: f64 },

    #[error("Hilbert-space dimension {dim} exceeds budget {budget}")]
    DimensionOverflow { dim: usize, budget: usize },

    #[error("Liouvillian has a degenerate steady state: {0}")]
    DegenerateLiouvillian(String),

    #[error("time integration failed: {0}")]
    IntegratorFailure(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::Config(_) | Error::Io(_) => 1,
            Error::QuadratureNotConverged(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

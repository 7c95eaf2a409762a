use thiserror::Error;

pub type Result<T> = std::result::Result<T, NesError>;

/// Errors raised by the numerics. Every variant carries enough context to be
/// reported as a structured `{kind, message}` pair.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum NesError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation at (or within 1e-15 of) the light cone `|σ| = 1`, or a
    /// vanishing denominator in a velocity formula.
    #[error("singularity: {0}")]
    Singularity(String),

    /// A computed velocity ratio landed on the wrong side of `|σ| = 1`.
    #[error("branch violation: {0}")]
    BranchViolation(String),

    /// Adaptive quadrature hit its subdivision limit before meeting the
    /// requested tolerance.
    #[error("quadrature did not converge: estimate {estimate:e} with error {error:e} after {intervals} intervals")]
    Quadrature {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    /// `w·Θ ≥ 1`: the first-order mass correction is outside its regime.
    #[error("weak-coupling violation: w*theta = {0}")]
    WeakCoupling(f64),

    /// The propagator denominator vanished exactly.
    #[error("propagator pole at q^2 = {0}")]
    Pole(f64),

    /// Moment matrix is singular (or numerically so).
    #[error("rank deficient moment matrix: det = {0:e}")]
    Rank(f64),

    /// Inconsistent fluctuation model (metrics and boost do not satisfy the
    /// invariance relation, or a covariance is not positive definite).
    #[error("invalid fluctuation model: {0}")]
    Model(String),
}

impl NesError {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            NesError::Domain(_) => "domain",
            NesError::Singularity(_) => "singularity",
            NesError::BranchViolation(_) => "branch_violation",
            NesError::Quadrature { .. } => "quadrature",
            NesError::WeakCoupling(_) => "weak_coupling",
            NesError::Pole(_) => "pole",
            NesError::Rank(_) => "rank",
            NesError::Model(_) => "model",
        }
    }

    /// Whether the error stems from invalid input rather than from the
    /// numerics themselves.
    pub fn is_validation(&self) -> bool {
        matches!(self, NesError::Domain(_) | NesError::Model(_))
    }
}

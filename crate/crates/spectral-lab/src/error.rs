//! Error types shared across the toolkit.

use thiserror::Error;

/// Errors produced by the numerical operations.
///
/// Most variants signal that an input is outside an operation's domain or
/// that a computation could not be certified, never that a mathematical
/// statement failed. `InconsistentSandwich` is the exception: it means a
/// lower bound exceeded an upper bound for the *same* quantity, which can
/// only be an implementation bug.
#[derive(Debug, Error)]
pub enum Error {
    /// Root finder missed the residual target within its iteration budget.
    #[error("root finding did not converge: residual {residual:.3e} above target {target:.3e}")]
    NonConvergence { residual: f64, target: f64 },

    /// Eigenvalue clusters too close to separate reliably at the given
    /// tolerance, or derived multiplicities came out inconsistent.
    #[error("ambiguous eigenvalue clustering: {0}")]
    AmbiguousClustering(String),

    /// A matrix that must be inverted is numerically singular.
    #[error("matrix numerically singular (pivot ratio {0:.3e})")]
    Singular(f64),

    /// A point that must lie in a ball does not.
    #[error("point outside ball: norm {norm:.6e} >= radius {radius:.6e}")]
    OutsideBall { norm: f64, radius: f64 },

    /// Disc search exhausted its restarts without a feasible witness.
    #[error("no feasible analytic disc found ({0})")]
    NoFeasibleDisc(String),

    /// An endpoint that must be cyclic is derogatory.
    #[error("matrix is not cyclic: {0}")]
    NotCyclic(String),

    /// Lifting requested through a matrix with more than one eigenvalue
    /// cluster (outside the supported normal forms).
    #[error("matrix does not have a single eigenvalue: {0}")]
    NotSingleEigenvalue(String),

    /// The disc violates the derivative-vanishing conditions required to
    /// lift it through the given matrix.
    #[error("lifting conditions violated: max residual {0:.3e}")]
    ThetaViolated(f64),

    /// A lower bound exceeded a same-space upper bound. Implementation bug.
    #[error("inconsistent sandwich: lower {lower} = {lower_value:.6e} exceeds upper {upper} = {upper_value:.6e}")]
    InconsistentSandwich {
        lower: String,
        lower_value: f64,
        upper: String,
        upper_value: f64,
    },

    /// A certificate run finished without reaching its conclusion.
    #[error("certificate inconclusive: {0}")]
    CertificateFailed(String),

    /// The Lempert-vs-Green chain gap fell below the requested margin.
    #[error("chain inconclusive: {0}")]
    ChainInconclusive(String),

    /// Every node of a circle-supremum grid had a degenerate denominator.
    #[error("denominator degenerate at every grid node")]
    DegenerateDenominator,

    /// A precondition on the inputs failed.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A constructed witness failed its independent re-verification.
    #[error("verification failed in {stage}: error {error:.3e} above {limit:.3e}")]
    VerificationFailed {
        stage: String,
        error: f64,
        limit: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

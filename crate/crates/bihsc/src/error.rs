//! Error type shared by every module of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the spectral, evolution and
/// control pipelines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// The dispersion coefficient must be strictly negative.
    #[error("dispersion coefficient gamma must be strictly negative and finite, got {0}")]
    NonNegativeGamma(f64),

    /// The interval length must be strictly positive.
    #[error("interval length ell must be strictly positive and finite, got {0}")]
    NonPositiveLength(f64),

    /// The characteristic equation has no hinged eigenfunction below
    /// the spectral floor -gamma^2/4.
    #[error("lambda = {lambda} lies below the spectral floor {floor}")]
    LambdaBelowSpectralFloor { lambda: f64, floor: f64 },

    /// Requested an operation defined only for positive eigenvalues.
    #[error("mode {n} has non-positive eigenvalue {lambda}")]
    NonPositiveEigenvalue { n: usize, lambda: f64 },

    /// The eigenvalue span is too short for the requested window length.
    #[error("density window r = {r} exceeds the eigenvalue span {span}; increase the mode count")]
    InsufficientModes { r: f64, span: f64 },

    /// Sample grid cannot resolve the highest requested mode.
    #[error("grid of {points} points under-resolves mode {n_max}; at least {required} points required")]
    GridTooCoarse {
        points: usize,
        n_max: usize,
        required: usize,
    },

    /// Coefficient vector and mode list (or weight vector) disagree in length.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Coefficient vectors must stay free of NaN and infinities.
    #[error("coefficient {index} is not finite")]
    NonFiniteCoefficient { index: usize },

    /// The transposition duality identity failed, so the derived sign
    /// convention of the controlled coefficient equation cannot be trusted.
    #[error("duality self-check failed: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    UnresolvedSignConvention { residual: f64, tol: f64 },

    /// Too few quadrature panels for the oscillation of the integrand.
    #[error("{panels} quadrature panels cannot resolve phase {phase:.3e} rad per panel (limit {limit})")]
    QuadratureUnderResolved {
        panels: usize,
        phase: f64,
        limit: f64,
    },

    /// RK4 step violates the stability/accuracy cap.
    #[error("rk4 step too large: |lambda_max| * dt = {0:.3e} exceeds 0.1")]
    StepTooLarge(f64),

    /// The exponential Gram matrix is numerically singular and no
    /// regularization was requested.
    #[error("gram matrix numerically singular (rcond = {rcond:.3e}); the moment problem has no stable solution")]
    SingularGram { rcond: f64 },

    /// Null-control synthesis refused because gamma lies in the critical set.
    #[error("gamma = {gamma} is resonant (pairs {pairs:?}); exact null control is impossible, use diagnose_resonant")]
    ResonantParameters {
        gamma: f64,
        pairs: Vec<(usize, usize)>,
    },

    /// The given index pair is not a resonant pair for these parameters.
    #[error("({p}, {q}) is not a resonant pair for gamma = {gamma}")]
    NotResonantPair { p: usize, q: usize, gamma: f64 },

    /// Resonant diagnosis requested for a non-resonant configuration.
    #[error("gamma = {0} is not resonant; use null_control instead")]
    NotResonant(f64),
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: relative deviation {deviation:.3e} exceeds {tol:.1e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("grouping tolerance {tol:.3e} exceeds half of the spectral range {range:.3e}")]
    GroupTolerance { tol: f64, range: f64 },

    #[error("matrix is not positive definite: smallest eigenvalue {0:.3e}")]
    NotPositiveDefinite(f64),

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("resonant pole: frequency {omega} coincides with bath mode {mode} (frequency {mode_frequency})")]
    Resonance {
        omega: f64,
        mode: usize,
        mode_frequency: f64,
    },

    #[error("Matsubara pole: beta*gamma = {0} is a multiple of 2*pi")]
    MatsubaraPole(f64),

    #[error("the half-Fourier transform of the bath correlation requires a continuum bath")]
    DiscreteBath,

    #[error("diagonal correction changed the number of distinct eigenvalues from {before} to {after}")]
    MultiplicityChanged { before: usize, after: usize },

    #[error("coupling operator has a degenerate spectrum (gap {0:.3e})")]
    DegenerateCoupling(f64),

    #[error("couplings do not have pointer-basis structure: {0}")]
    NotPointerBasis(String),

    #[error("validity gate violated: {0}")]
    ValidityGate(String),

    #[error("bath truncation did not converge by {n_max} levels (last change {change:.3e})")]
    TruncationNotConverged { n_max: usize, change: f64 },

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("steady state is not unique: null-space dimension {0}")]
    DegenerateNullSpace(usize),

    #[error("generator invariant violated: {0}")]
    InvariantViolation(String),

    #[error("hierarchy depth did not converge by K = {k_max} (last change {change:.3e})")]
    DepthNotConverged { k_max: usize, change: f64 },
}

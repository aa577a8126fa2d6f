use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("{op} requires a square matrix, got {rows}x{cols}")]
    NotSquare {
        op: &'static str,
        rows: usize,
        cols: usize,
    },
    #[error("invalid Stiefel dimensions n={n}, k={k} (need 1 <= k < n)")]
    InvalidDimensions { n: usize, k: usize },
    #[error("point is not on the Stiefel manifold: |x*x - I| = {residual:e} > {tol:e}")]
    NotOnManifold { residual: f64, tol: f64 },
    #[error("vector is not tangent: |x*v + v*x| = {residual:e}")]
    NotTangent { residual: f64 },
    #[error("vector is not normal: |proj_x w| = {residual:e}")]
    NotNormal { residual: f64 },
    #[error("columns are not orthonormal: |Q*Q - I| = {residual:e}")]
    NotOrthonormal { residual: f64 },
    #[error("matrix is not symplectic: |A*A - I| = {residual:e}")]
    NotSymplectic { residual: f64 },
    #[error("point is not critical: |TP*| = {residual:e}")]
    NotCritical { residual: f64 },
    #[error("level q={q} is not a critical level of X_{{{n},{k}}}")]
    InvalidLevel { n: usize, k: usize, q: usize },
    #[error("height {height} is not within 1e-6 of an integer level")]
    NonIntegerLevel { height: f64 },
    #[error("Jacobi SVD did not converge after {sweeps} sweeps (off-diagonal mass {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("matrix is rank deficient: smallest singular value {sigma_min:e}")]
    RankDeficient { sigma_min: f64 },
    #[error("Hessian eigenvalue at distance {residual:e} from {{-2, 0, 2}}")]
    SpectrumMismatch { residual: f64 },
    #[error("inconsistent relative SVD block sizes: {0}")]
    Decomposition(String),
    #[error("integration diverged at t={t}")]
    Diverged { t: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed JSON: {0}")]
    Json(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Numerical tolerances shared by every module.
//!
//! The defaults below are the contract; the verifier copies them into its
//! configurable [`Tolerances`] record so suites can override check thresholds
//! without touching the linear algebra.

/// Jacobi sweeps stop once the off-diagonal Frobenius mass falls below this
/// fraction of the matrix norm.
pub const JACOBI_OFFDIAG: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues within `EIG_ZERO * max(1, ‖A‖)` of zero count as zero.
pub const EIG_ZERO: f64 = 1e-12;

/// Hermiticity check before symmetrization, relative to `max(1, ‖A‖)`.
pub const HERMITIAN: f64 = 1e-10;

/// `P = P*` and `P² = P` defect for projections.
pub const PROJECTION: f64 = 1e-10;

/// Residual cutoff of the Gram–Schmidt pass in the projection join.
pub const JOIN_CUTOFF: f64 = 1e-10;

/// Exact algebraic identities (vanishing expectations, cancellations).
pub const IDENTITY: f64 = 1e-9;

/// Reconstruction `f = g + b_d + b_off`, relative to `‖f‖_∞`.
pub const RECONSTRUCTION: f64 = 1e-10;

/// Operator-order checks `A ≤ B`.
pub const PSD_ORDER: f64 = 1e-8;

/// Relative slack on inequality reports `lhs ≤ rhs·(1 + tol)`.
pub const INEQUALITY: f64 = 1e-9;

/// Verifier thresholds, configurable per suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub identity: f64,
    pub reconstruction: f64,
    pub psd_order: f64,
    pub inequality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: IDENTITY,
            reconstruction: RECONSTRUCTION,
            psd_order: PSD_ORDER,
            inequality: INEQUALITY,
        }
    }
}

//! Numerical tolerances shared across the crate.
//!
//! Everything here is an absolute tolerance on quantities of order one
//! (states are trace normalized, measurement elements sum to the identity),
//! so no relative scaling is applied unless a routine says otherwise.

/// Maximum allowed entrywise defect `max |A_ij - conj(A_ji)|` before a matrix
/// is rejected as non-Hermitian.
pub const HERMITICITY: f64 = 1e-9;

/// Maximum allowed deviation of a density matrix trace from 1.
pub const TRACE: f64 = 1e-9;

/// Maximum allowed entrywise defect of `U^dag U` from the identity.
pub const UNITARITY: f64 = 1e-10;

/// Density matrix eigenvalues in `[-NEGATIVE_EIGENVALUE, 0)` are treated as
/// roundoff and clipped to zero; anything more negative is an error.
pub const NEGATIVE_EIGENVALUE: f64 = 1e-10;

/// Floor used when clipping tiny negative arguments before a square root
/// (singular values, spectral weights).
pub const PSD_CLIP: f64 = 1e-12;

/// Maximum allowed deviation of a pure state norm from 1.
pub const STATE_NORM: f64 = 1e-10;

/// Maximum allowed deviation of an outcome distribution sum from 1.
pub const PROBABILITY_SUM: f64 = 1e-9;

/// Relative off-diagonal mass at which the Jacobi eigensolver stops sweeping.
pub const JACOBI_OFF_DIAGONAL: f64 = 1e-14;

//! Numeric tolerances shared by every module.
//!
//! Exact rational paths never consult these; they only gate comparisons once
//! values have been converted to double precision.

/// Eigenvalue threshold for positivity decisions (PPT tests, POVM bounds).
pub const PPT_TOL: f64 = 1e-9;

/// Entrywise agreement for dense matrices built by two routes.
pub const ENTRY_TOL: f64 = 1e-12;

/// Hermiticity check on dense operators.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Slack used when comparing LP optima and information quantities to bounds.
pub const BOUND_TOL: f64 = 1e-9;

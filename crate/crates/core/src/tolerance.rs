//! Shared floating point tolerances.

/// Relative tolerance on the coverage constraint `sum x = length`.
pub const FEASIBILITY: f64 = 1e-9;

/// Absolute tolerance on KKT stationarity residuals.
pub const KKT_RESIDUAL: f64 = 1e-10;

/// Relative slack used when fathoming a node against the incumbent.
pub const FATHOM: f64 = 1e-9;

/// Minimum relative decrease for a local search move or a bound improvement.
pub const IMPROVEMENT: f64 = 1e-12;

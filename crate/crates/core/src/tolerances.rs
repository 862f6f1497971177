//! Numerical tolerances shared across modules.

/// Exact-algebra checks (unitarity, determinant, reconstruction).
pub const ALGEBRAIC: f64 = 1e-12;

/// Input contract checks such as "is this matrix unitary".
pub const CONTRACT: f64 = 1e-9;

/// Slack above 1 allowed for `max A²+C²` before a coefficient set is declared unachievable.
pub const NORM_SLACK: f64 = 1e-9;

/// Closed-form validity predicates `g ≤ BOUNDARY` count as valid.
pub const BOUNDARY: f64 = 1e-9;

/// Oracle fidelity required of a verified gate.
pub const FIDELITY: f64 = 1e-8;

/// Bound on `|dF/dθ|` at the design point.
pub const FIDELITY_SLOPE: f64 = 1e-6;

/// Step for the central difference of the fidelity.
pub const SLOPE_STEP: f64 = 1e-5;

/// Residual accepted from forward-map interpolation at fresh check points.
pub const FORWARD_FIT: f64 = 1e-9;

/// Coefficient residual accepted from phase extraction.
pub const EXTRACTION: f64 = 1e-8;

/// Linear systems with a larger condition number are reported as near-degenerate.
pub const MAX_CONDITION: f64 = 1e10;

//! Length-3 sequences: the four shared constraints fix `(a₁, a₃, c₁, c₃)` completely.

use super::{base_constraints, require_achievable, solve_coefficients, verified_solution};
use super::{GateRequest, GateSolution, SolveMethod, Variant};
use crate::response::{check_achievable, phases_from_coefficients};
use crate::tolerances;
use crate::{Error, Result};

/// `(cos(θ₀/2) − cos(θ_T/2))(cos(3θ₀/2) − cos(θ_T/2))`; a solution exists iff this is `≤ 0`.
pub fn g3(theta0: f64, theta_t: f64) -> f64 {
    let ct = (theta_t / 2.0).cos();
    ((theta0 / 2.0).cos() - ct) * ((1.5 * theta0).cos() - ct)
}

/// Length-3 gate for `θ_T ∈ [0, 2π]`.
pub fn solve_length3(theta0: f64, theta_t: f64) -> Result<GateSolution> {
    let request = GateRequest::new(theta0, theta_t, Variant::L3)?;
    let g = g3(theta0, theta_t);
    if g > tolerances::BOUNDARY {
        return Err(Error::Region { theta0, theta_t, reason: format!("g3 = {g:.9} > 0") });
    }
    let (rows, rhs) = base_constraints(3, theta0, theta_t);
    let rc = match solve_coefficients(3, &rows, &rhs, "length-3 constraints") {
        Ok(rc) => rc,
        // the fourth row vanishes where sin(θ_T/2) = 0; those targets sit on g3's boundary
        Err(Error::Singular(msg)) => {
            return Err(Error::Region { theta0, theta_t, reason: format!("degenerate system: {msg}") })
        }
        Err(e) => return Err(e),
    };
    if !check_achievable(&rc).achievable {
        // g3 ≤ 0 is exact, so this is a bug or a boundary rounding case
        require_achievable(&rc, theta0, theta_t).map_err(|e| Error::Internal(format!("g3 = {g:.3e} but {e}")))?;
    }
    let phases = phases_from_coefficients(&rc, None)?;
    verified_solution(request, rc, phases, SolveMethod::LinearSystem)
}

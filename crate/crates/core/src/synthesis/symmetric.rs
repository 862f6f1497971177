//! Symmetric length-4 sequences `(φ₀, φ₁, φ₁, φ₀)`.
//!
//! The fifth equation `a₀ − a₁ + a₂ = 1` (i.e. `A[π] = 1`) forces `a₁ = 0` and gives
//!
//! ```text
//! A[θ] = 1 + s (cos 2θ − 1),                      s = sin²(θ_T/4) / sin²θ₀
//! C[θ] = tan(θ_T/4)/sin θ₀ · [−2 sin θ + s (2 sin θ − cos θ₀ sin 2θ)]
//! ```

use std::f64::consts::{FRAC_PI_2, PI};

use super::{require_achievable, verified_solution, GateRequest, GateSolution, SolveMethod, Variant};
use crate::response::{coefficients_from_phases, ResponseCoefficients};
use crate::su2::PhaseSequence;
use crate::tolerances;
use crate::{Error, Result};

/// `cos 2θ₀ − cos(θ_T/2)`; the symmetric construction works iff this is `≤ 0`.
pub fn g4(theta0: f64, theta_t: f64) -> f64 {
    (2.0 * theta0).cos() - (theta_t / 2.0).cos()
}

fn check_region(theta0: f64, theta_t: f64) -> Result<()> {
    let g = g4(theta0, theta_t);
    if g > tolerances::BOUNDARY {
        return Err(Error::Region { theta0, theta_t, reason: format!("g4 = {g:.9} > 0") });
    }
    Ok(())
}

/// `s = sin²(θ_T/4)/sin²θ₀`, clamped into `[0, 1]` (it exceeds 1 only by rounding inside the region).
fn ratio(theta0: f64, theta_t: f64) -> f64 {
    ((theta_t / 4.0).sin().powi(2) / theta0.sin().powi(2)).clamp(0.0, 1.0)
}

/// Closed-form coefficients.
///
/// Written as `c₁ = −(sin(θ_T/2) − 2q cos θ₀)/sin³θ₀`, `c₂ = −q sin²(θ_T/4)/sin³θ₀` with
/// `q = tan(θ_T/4) cos θ₀`, which stays bounded inside the region (`|cos θ₀| ≤ |cos(θ_T/4)|`).
pub(crate) fn symmetric_coefficients(theta0: f64, theta_t: f64) -> ResponseCoefficients {
    let s = ratio(theta0, theta_t);
    let (s4, c4) = (theta_t / 4.0).sin_cos();
    let (s0, c0) = theta0.sin_cos();
    let q = if c4.abs() < 1e-12 { 0.0 } else { s4 * c0 / c4 };
    let s03 = s0.powi(3);
    let c1 = -((theta_t / 2.0).sin() - 2.0 * q * c0) / s03;
    let c2 = -q * s4 * s4 / s03;
    ResponseCoefficients::new(4, vec![1.0 - s, 0.0, s], vec![c1, c2]).expect("finite coefficients")
}

/// Closed-form phases `(−π/2 + γ, π/2 + γ + χ, π/2 + γ + χ, −π/2 + γ)` with
/// `χ = −arccos(1 − 2s)` and `γ = atan2(s cos(χ/2) cos θ₀, −(1 − s) sin(χ/2))`.
pub fn phases_length4_symmetric(theta0: f64, theta_t: f64) -> Result<PhaseSequence> {
    if theta_t < 0.0 {
        return Err(Error::Precondition(format!(
            "closed-form phases need θ_T ≥ 0 (got {theta_t}); use the π phase shift for negative targets"
        )));
    }
    check_region(theta0, theta_t)?;
    let s = ratio(theta0, theta_t);
    let chi = -(1.0 - 2.0 * s).clamp(-1.0, 1.0).acos();
    // `+ 0.0` turns a −0 denominator into +0 so the identity target gets γ = 0
    let gamma = (s * (chi / 2.0).cos() * theta0.cos()).atan2(-(1.0 - s) * (chi / 2.0).sin() + 0.0);
    let outer = -FRAC_PI_2 + gamma;
    let inner = FRAC_PI_2 + gamma + chi;
    PhaseSequence::new(vec![outer, inner, inner, outer])
}

/// Symmetric length-4 gate for `θ_T ∈ [0, 2π]`.
pub fn solve_length4_symmetric(theta0: f64, theta_t: f64) -> Result<GateSolution> {
    let request = GateRequest::new(theta0, theta_t, Variant::L4Symmetric)?;
    if !(0.0..=2.0 * PI + tolerances::BOUNDARY).contains(&theta_t) {
        return Err(Error::Precondition(format!("θ_T={theta_t} outside [0, 2π]")));
    }
    check_region(theta0, theta_t)?;
    let phases = phases_length4_symmetric(theta0, theta_t)?;
    let mut rc = symmetric_coefficients(theta0, theta_t);
    require_achievable(&rc, theta0, theta_t)?;
    // At θ_T = 2π (target −1) the family is degenerate and the two closed forms may pick
    // different members; report the response the phases actually have.
    let realised = coefficients_from_phases(&phases)?;
    if realised.max_abs_diff(&rc) > tolerances::EXTRACTION {
        rc = realised;
    }
    verified_solution(request, rc, phases, SolveMethod::ClosedForm)
}

//! Anti-symmetric length-4 sequences `(φ₀, φ₁, −φ₁, −φ₀)`.
//!
//! The fifth equation pins `2c₁ + 4c₂`. With `c = cos(θ₀/2)`,
//! `X = (1/c²)(1/c² − 2/cos²(θ_T/4))` and `y = cos(θ_T/2) X`,
//!
//! ```text
//! K(θ₀, θ_T) = cot(θ₀/2) tan(θ_T/2) (1 − sign[sin(θ_T/2)] √(1 + y))
//! ```
//!
//! and the anti-symmetric family has `2c₁ + 4c₂ = −K`. For `θ_T ∈ (0, 2π)` the product
//! `tan(θ_T/2)(1 − √(1+y))` is evaluated as `−sin(θ_T/2) X / (1 + √(1+y))`, which is
//! regular at `θ_T = π`.

use std::f64::consts::{PI, TAU};

use super::symmetric::{g4, solve_length4_symmetric};
use super::{base_constraints, require_achievable, solve_coefficients, verified_solution};
use super::{GateRequest, GateSolution, SolveMethod, Variant};
use crate::response::{extract_phases, ExtractionOptions, PhaseStructure, ResponseCoefficients};
use crate::tolerances;
use crate::{Error, Result};

/// Half-width of the band around a singular target inside which the limit path is used.
const SINGULAR_BAND: f64 = 1e-9;
/// Offset for the two-sided limit. Its error is O(ε⁴) but the linear system has condition
/// ~1/ε near the singular target, so a larger step is more accurate than a tiny one.
const LIMIT_STEP: f64 = 1e-4;
/// Offset for the one-sided O(ε²) limit.
const ONE_SIDED_STEP: f64 = 1e-6;

fn singular_point(theta_t: f64) -> Option<f64> {
    [PI, TAU, 3.0 * PI].into_iter().find(|s| (theta_t - s).abs() < SINGULAR_BAND)
}

/// `K`, or `None` when the square root has a negative argument.
fn constraint_value(theta0: f64, theta_t: f64) -> Option<f64> {
    if theta_t == 0.0 {
        return Some(0.0);
    }
    let c2 = (theta0 / 2.0).cos().powi(2);
    let x = (1.0 / c2) * (1.0 / c2 - 2.0 / (theta_t / 4.0).cos().powi(2));
    let radicand = 1.0 + (theta_t / 2.0).cos() * x;
    if radicand < 0.0 {
        return None;
    }
    let root = radicand.sqrt();
    let cot = 1.0 / (theta0 / 2.0).tan();
    let half = (theta_t / 2.0).sin();
    Some(if half >= 0.0 {
        cot * (-half * x / (1.0 + root))
    } else {
        cot * (theta_t / 2.0).tan() * (1.0 + root)
    })
}

/// Value of `K(θ₀, θ_T)` for `0 ≤ θ_T ≤ 4θ₀` (`K = 0` at `θ_T = 0`).
///
/// `θ_T ∈ {π, 2π, 3π}` are singular points of the formula and return
/// [`Error::Singularity`]; [`solve_length4_antisymmetric`] takes the limit there.
pub fn antisymmetric_constraint(theta0: f64, theta_t: f64) -> Result<f64> {
    if !(theta0 > 0.0 && theta0 < PI) {
        return Err(Error::Domain(format!("base rotation θ₀={theta0} must lie in (0, π)")));
    }
    if !(0.0..=4.0 * theta0 + tolerances::BOUNDARY).contains(&theta_t) {
        return Err(Error::Precondition(format!("needs 0 ≤ θ_T ≤ 4θ₀, got θ_T={theta_t:.6}, θ₀={theta0:.6}")));
    }
    if let Some(s) = singular_point(theta_t) {
        return Err(Error::Singularity {
            theta_t,
            reason: format!("formula is singular at θ_T = {:.0}π; use the limit", s / PI),
        });
    }
    constraint_value(theta0, theta_t).ok_or_else(|| Error::Region {
        theta0,
        theta_t,
        reason: "anti-symmetric constraint has a negative radicand".into(),
    })
}

fn coefficients_at(theta0: f64, theta_t: f64) -> Result<ResponseCoefficients> {
    let k = constraint_value(theta0, theta_t).ok_or_else(|| Error::Region {
        theta0,
        theta_t,
        reason: "anti-symmetric constraint has a negative radicand".into(),
    })?;
    let (mut rows, mut rhs) = base_constraints(4, theta0, theta_t);
    rows.push(vec![0.0, 0.0, 0.0, 2.0, 4.0]);
    rhs.push(-k);
    solve_coefficients(4, &rows, &rhs, "anti-symmetric length-4 constraints")
}

fn combine(terms: &[(f64, &ResponseCoefficients)]) -> Result<ResponseCoefficients> {
    let mix = |get: fn(&ResponseCoefficients) -> &[f64]| -> Vec<f64> {
        let n = get(terms[0].1).len();
        (0..n).map(|i| terms.iter().map(|(w, rc)| w * get(rc)[i]).sum()).collect()
    };
    ResponseCoefficients::new(4, mix(ResponseCoefficients::a), mix(ResponseCoefficients::c))
}

/// Coefficients at a singular target by Richardson extrapolation from `θ_T ± ε`, `± 2ε`.
/// Two-sided where both sides are in range, one-sided (from below) otherwise.
fn limit_coefficients(theta0: f64, singular: f64) -> Result<ResponseCoefficients> {
    let (e1, e2) = (LIMIT_STEP, 2.0 * LIMIT_STEP);
    if singular + e2 <= (4.0 * theta0).min(TAU) {
        let (p1, m1) = (coefficients_at(theta0, singular + e1)?, coefficients_at(theta0, singular - e1)?);
        let (p2, m2) = (coefficients_at(theta0, singular + e2)?, coefficients_at(theta0, singular - e2)?);
        // (4 f̄(ε) − f̄(2ε))/3 with f̄ the two-sided mean
        combine(&[(2.0 / 3.0, &p1), (2.0 / 3.0, &m1), (-1.0 / 6.0, &p2), (-1.0 / 6.0, &m2)])
    } else {
        let (e1, e2) = (ONE_SIDED_STEP, 2.0 * ONE_SIDED_STEP);
        let (m1, m2) = (coefficients_at(theta0, singular - e1)?, coefficients_at(theta0, singular - e2)?);
        combine(&[(2.0, &m1), (-1.0, &m2)])
    }
}

/// Solved coefficients for `θ_T ∈ [0, 2π]`, taking the limit at singular targets.
/// Achievability is not checked.
pub(crate) fn antisymmetric_coefficients(theta0: f64, theta_t: f64) -> Result<ResponseCoefficients> {
    match singular_point(theta_t) {
        Some(s) => limit_coefficients(theta0, s),
        None => coefficients_at(theta0, theta_t),
    }
}

/// Anti-symmetric length-4 gate for `θ_T ∈ [0, min(2π, 4θ₀)]`.
///
/// Near `θ_T = π` a failed limit falls back to the symmetric family when `g4 ≤ 0`.
pub fn solve_length4_antisymmetric(theta0: f64, theta_t: f64) -> Result<GateSolution> {
    let request = GateRequest::new(theta0, theta_t, Variant::L4AntiSymmetric)?;
    if !(0.0..=TAU + tolerances::BOUNDARY).contains(&theta_t) {
        return Err(Error::Precondition(format!("θ_T={theta_t} outside [0, 2π]")));
    }
    if theta_t > 4.0 * theta0 + tolerances::BOUNDARY {
        return Err(Error::Precondition(format!(
            "anti-symmetric sequences need θ_T ≤ 4θ₀ (θ_T={theta_t:.6}, 4θ₀={:.6})",
            4.0 * theta0
        )));
    }
    let singular = singular_point(theta_t);
    let attempt = || -> Result<GateSolution> {
        let rc = antisymmetric_coefficients(theta0, theta_t)?;
        let method = if singular.is_some() { SolveMethod::Richardson } else { SolveMethod::LinearSystem };
        require_achievable(&rc, theta0, theta_t)?;
        let options = ExtractionOptions { structure: PhaseStructure::AntiSymmetric, ..Default::default() };
        let phases = extract_phases(&rc, &options)?.phases;
        verified_solution(request, rc, phases, method)
    };
    match attempt() {
        Err(e) if singular == Some(PI) && g4(theta0, theta_t) <= tolerances::BOUNDARY => {
            let mut s = solve_length4_symmetric(theta0, theta_t).map_err(|_| e)?;
            s.request = request;
            s.method = SolveMethod::SymmetricFallback;
            Ok(s)
        }
        r => r,
    }
}

//! Composite gate synthesis for length-3 and length-4 sequences.
//!
//! Every variant imposes the same four linear constraints on the response coefficients,
//!
//! * `A[0] = 1`
//! * `A[θ₀] = cos(θ_T/2)`
//! * `C[θ₀] = −sin(θ_T/2)`
//! * `cos(θ_T/2) A′[θ₀] − sin(θ_T/2) C′[θ₀] = 0` (fidelity stationary at θ₀),
//!
//! and length 4 adds one more equation to fix the fifth coefficient. Solvers work on
//! `θ_T ∈ [0, 2π]`; [`synthesize`] maps other targets there with the π phase shift.

mod antisymmetric;
mod length3;
mod symmetric;

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::response::{check_achievable, ResponseBasis, ResponseCoefficients};
use crate::su2::{self, PhaseSequence};
use crate::tolerances;
use crate::{Error, Result};

pub use antisymmetric::{antisymmetric_constraint, solve_length4_antisymmetric};
pub(crate) use antisymmetric::antisymmetric_coefficients;
pub use length3::{g3, solve_length3};
pub use symmetric::{g4, phases_length4_symmetric, solve_length4_symmetric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "l3")]
    L3,
    #[serde(rename = "sym4")]
    L4Symmetric,
    #[serde(rename = "antisym4")]
    L4AntiSymmetric,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::L3, Variant::L4Symmetric, Variant::L4AntiSymmetric];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::L3 => "l3",
            Variant::L4Symmetric => "sym4",
            Variant::L4AntiSymmetric => "antisym4",
        }
    }

    pub fn length(&self) -> usize {
        match self {
            Variant::L3 => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l3" | "3" | "length3" => Ok(Variant::L3),
            "sym4" | "l4s" | "symmetric" => Ok(Variant::L4Symmetric),
            "antisym4" | "l4a" | "antisymmetric" | "anti-symmetric" => Ok(Variant::L4AntiSymmetric),
            _ => Err(Error::Domain(format!("unknown variant '{s}' (expected l3, sym4 or antisym4)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateRequest {
    pub theta0: f64,
    pub theta_t: f64,
    pub variant: Variant,
}

impl GateRequest {
    /// `θ₀ ∈ (0, π)`; `θ_T` anywhere in `[−4π, 4π]` (one full period of `R_0`).
    pub fn new(theta0: f64, theta_t: f64, variant: Variant) -> Result<Self> {
        if !(theta0.is_finite() && theta0 > 0.0 && theta0 < PI) {
            return Err(Error::Domain(format!("base rotation θ₀={theta0} must lie in (0, π)")));
        }
        if !(theta_t.is_finite() && theta_t.abs() <= 2.0 * TAU + tolerances::BOUNDARY) {
            return Err(Error::Domain(format!("target rotation θ_T={theta_t} must lie in [−4π, 4π]")));
        }
        Ok(Self { theta0, theta_t, variant })
    }
}

/// How the coefficients of a solution were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    LinearSystem,
    ClosedForm,
    /// Extrapolated from targets a small offset away from a singular point.
    Richardson,
    /// Anti-symmetric request at a singular target answered by the symmetric family.
    SymmetricFallback,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GateSolution {
    pub request: GateRequest,
    /// Coefficients of the returned phases' response (for the requested `θ_T`).
    pub coefficients: ResponseCoefficients,
    pub phases: PhaseSequence,
    pub fidelity_at_theta0: f64,
    pub fidelity_derivative_at_theta0: f64,
    pub verified: bool,
    pub method: SolveMethod,
}

/// Oracle fidelity of `s` at `theta` against `R_0[θ_T]`.
pub fn sequence_fidelity(s: &PhaseSequence, theta: f64, theta_t: f64) -> f64 {
    su2::trace_fidelity(theta_t, &su2::compose_sequence(s, theta))
}

/// `(F(θ₀), dF/dθ(θ₀))`, the derivative by central difference with step [`tolerances::SLOPE_STEP`].
pub fn fidelity_and_slope(s: &PhaseSequence, theta0: f64, theta_t: f64) -> (f64, f64) {
    let h = tolerances::SLOPE_STEP;
    let f = sequence_fidelity(s, theta0, theta_t);
    let fp = sequence_fidelity(s, theta0 + h, theta_t);
    let fm = sequence_fidelity(s, theta0 - h, theta_t);
    (f, (fp - fm) / (2.0 * h))
}

/// Check `s` against the oracle and package it; a failed check is an error, never a
/// solution with `verified = false`.
pub(crate) fn verified_solution(
    request: GateRequest,
    coefficients: ResponseCoefficients,
    phases: PhaseSequence,
    method: SolveMethod,
) -> Result<GateSolution> {
    let (f, slope) = fidelity_and_slope(&phases, request.theta0, request.theta_t);
    if f < 1.0 - tolerances::FIDELITY || slope.abs() > tolerances::FIDELITY_SLOPE {
        return Err(Error::Verification(format!(
            "{} at θ₀={:.6}, θ_T={:.6}: fidelity {f:.12}, slope {slope:.3e}",
            request.variant, request.theta0, request.theta_t
        )));
    }
    Ok(GateSolution {
        request,
        coefficients,
        phases,
        fidelity_at_theta0: f,
        fidelity_derivative_at_theta0: slope,
        verified: true,
        method,
    })
}

/// The four shared constraint rows over unknowns `(a…, c…)` and their right-hand sides.
pub(crate) fn base_constraints(length: usize, theta0: f64, theta_t: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let basis = ResponseBasis::new(length);
    let na = basis.a_row(0.0).len();
    let nc = basis.c_row(0.0).len();
    let (st, ct) = (theta_t / 2.0).sin_cos();
    let join = |a: Vec<f64>, c: Vec<f64>| a.into_iter().chain(c).collect::<Vec<f64>>();
    let rows = vec![
        join(basis.a_row(0.0), vec![0.0; nc]),
        join(basis.a_row(theta0), vec![0.0; nc]),
        join(vec![0.0; na], basis.c_row(theta0)),
        join(
            basis.a_derivative_row(theta0).into_iter().map(|v| ct * v).collect(),
            basis.c_derivative_row(theta0).into_iter().map(|v| -st * v).collect(),
        ),
    ];
    (rows, vec![1.0, ct, -st, 0.0])
}

/// Solve the constraint system and split the unknowns into coefficients.
pub(crate) fn solve_coefficients(
    length: usize,
    rows: &[Vec<f64>],
    rhs: &[f64],
    what: &str,
) -> Result<ResponseCoefficients> {
    let x = linalg::solve(rows, rhs, what)?;
    let na = ResponseBasis::new(length).a_row(0.0).len();
    ResponseCoefficients::new(length, x[..na].to_vec(), x[na..].to_vec())
}

/// Region error unless `rc` passes the achievability check.
pub(crate) fn require_achievable(rc: &ResponseCoefficients, theta0: f64, theta_t: f64) -> Result<()> {
    let report = check_achievable(rc);
    if report.achievable {
        Ok(())
    } else {
        Err(Error::Region {
            theta0,
            theta_t,
            reason: format!(
                "max A²+C² = {:.12} at θ={:.6} (failed: {:?})",
                report.max_norm, report.argmax_theta, report.condition_failures
            ),
        })
    }
}

/// Add π to every phase. If `s` implements `R_0[θ_T]` at some θ₀, the result implements
/// `R_0[−θ_T]` there (the response keeps `A` and flips the sign of `C`).
pub fn extend_negative_target(s: &PhaseSequence) -> PhaseSequence {
    s.shifted(PI)
}

/// Where a target is actually solved: `θ_T ≡ ±θ_eff (mod 4π)` with `θ_eff ∈ [0, 2π]`.
pub(crate) fn fold_target(theta_t: f64) -> (f64, bool) {
    let t = if theta_t > TAU {
        theta_t - 2.0 * TAU
    } else if theta_t < -TAU {
        theta_t + 2.0 * TAU
    } else {
        theta_t
    };
    if t < 0.0 {
        (-t, true)
    } else {
        (t, false)
    }
}

fn solve_variant(variant: Variant, theta0: f64, theta_t: f64) -> Result<GateSolution> {
    match variant {
        Variant::L3 => solve_length3(theta0, theta_t),
        Variant::L4Symmetric => solve_length4_symmetric(theta0, theta_t),
        Variant::L4AntiSymmetric => solve_length4_antisymmetric(theta0, theta_t),
    }
}

/// Solve `req`, mapping `θ_T` into `[0, 2π]` first, and verify the result against the oracle.
///
/// Region failures are reported as [`Error::Uncovered`] with the verdict of every variant
/// at the same point.
pub fn synthesize(req: &GateRequest) -> Result<GateSolution> {
    let req = GateRequest::new(req.theta0, req.theta_t, req.variant)?;
    let (theta_eff, negative) = fold_target(req.theta_t);
    let base = match solve_variant(req.variant, req.theta0, theta_eff) {
        Ok(s) => s,
        Err(e) if e.is_validity() => {
            let verdicts = Variant::ALL
                .iter()
                .map(|&v| {
                    let verdict = if v == req.variant {
                        Err(e.to_string())
                    } else {
                        solve_variant(v, req.theta0, theta_eff).map(|_| ()).map_err(|e| e.to_string())
                    };
                    match verdict {
                        Ok(()) => format!("{v}: valid"),
                        Err(msg) => format!("{v}: {msg}"),
                    }
                })
                .collect();
            return Err(Error::Uncovered { theta0: req.theta0, theta_t: req.theta_t, verdicts });
        }
        Err(e) => return Err(e),
    };
    let (phases, coefficients) = if negative {
        (extend_negative_target(&base.phases), base.coefficients.mirrored())
    } else {
        (base.phases, base.coefficients)
    };
    verified_solution(req, coefficients, phases, base.method)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
            let j = serde_json::to_string(&v).unwrap();
            assert_eq!(j, format!("\"{}\"", v.name()));
        }
        assert!("l5".parse::<Variant>().is_err());
    }

    #[test]
    fn request_domain() {
        assert!(GateRequest::new(0.0, 1.0, Variant::L3).is_err());
        assert!(GateRequest::new(PI, 1.0, Variant::L3).is_err());
        assert!(GateRequest::new(1.0, 5.0 * PI, Variant::L3).is_err());
        assert!(GateRequest::new(1.0, -4.0 * PI, Variant::L3).is_ok());
    }

    #[test]
    fn folding() {
        assert_eq!(fold_target(1.0), (1.0, false));
        assert_eq!(fold_target(-1.0), (1.0, true));
        let (t, neg) = fold_target(3.0 * PI);
        assert!((t - PI).abs() < 1e-15 && neg);
        let (t, neg) = fold_target(-3.0 * PI);
        assert!((t - PI).abs() < 1e-15 && !neg);
    }

    #[test]
    fn extend_negative_target_examples() {
        let s = PhaseSequence::new(vec![-FRAC_PI_2, 0.0, 0.0, -FRAC_PI_2]).unwrap();
        let e = extend_negative_target(&s);
        let want = [FRAC_PI_2, PI, PI, FRAC_PI_2];
        for (a, b) in e.phases().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        let u = e.compose(FRAC_PI_2);
        let r = su2::rotation_matrix(su2::Rotation::new(0.0, -PI)).unwrap();
        assert!(u.max_abs_diff(&r) < 1e-12);
        // twice restores the original unitary
        let back = extend_negative_target(&e);
        assert!(back.compose(0.9).max_abs_diff(&s.compose(0.9)) < 1e-12);

        let one = PhaseSequence::new(vec![0.0]).unwrap();
        let r = su2::rotation_matrix(su2::Rotation::new(0.0, -0.8)).unwrap();
        assert!(extend_negative_target(&one).compose(0.8).max_abs_diff(&r) < 1e-12);
    }

    #[test]
    fn synthesize_symmetric_half_turn() {
        let s = synthesize(&GateRequest::new(FRAC_PI_2, PI, Variant::L4Symmetric).unwrap()).unwrap();
        let want = [-FRAC_PI_2, 0.0, 0.0, -FRAC_PI_2];
        for (a, b) in s.phases.phases().iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(s.verified && (s.fidelity_at_theta0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn synthesize_beyond_two_pi() {
        let req = GateRequest::new(0.7 * PI, 3.0 * PI, Variant::L4AntiSymmetric).unwrap();
        let s = synthesize(&req).unwrap();
        assert!(s.fidelity_at_theta0 > 1.0 - 1e-8);
        let p = s.phases.phases();
        assert!((su2::reduce_phase(p[1] + p[2]) - PI).abs() < 1e-9 || su2::reduce_phase(p[1] + p[2]).abs() < 1e-9);
    }

    #[test]
    fn synthesize_reports_every_variant_when_uncovered() {
        let req = GateRequest::new(PI / 4.0, 1.5 * PI, Variant::L4Symmetric).unwrap();
        match synthesize(&req) {
            Err(Error::Uncovered { verdicts, .. }) => {
                assert_eq!(verdicts.len(), 3);
                assert!(verdicts[1].starts_with("sym4:"));
            }
            other => panic!("expected uncovered, got {other:?}"),
        }
    }

    #[test]
    fn negative_targets_verify() {
        for v in Variant::ALL {
            let (t0, tt) = match v {
                Variant::L3 => (FRAC_PI_2, -PI),
                _ => (0.6 * PI, -1.3 * PI),
            };
            let s = synthesize(&GateRequest::new(t0, tt, v).unwrap()).unwrap_or_else(|e| panic!("{v}: {e}"));
            let u = s.phases.compose(t0);
            let r = su2::rotation_matrix(su2::Rotation::new(0.0, tt)).unwrap();
            // some phase combinations are pinned only quadratically by the coefficients
            assert!(u.max_abs_diff_up_to_sign(&r) < 1e-6, "{v}");
        }
    }
}

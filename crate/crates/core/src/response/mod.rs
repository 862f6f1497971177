//! Response functions `A[θ]` and `C[θ]`.
//!
//! A length-`L` sequence has `U[θ] = A·1 + i(B σ_z + C σ_x + D σ_y)` where
//!
//! * odd `L`: `A = Σ a_k cos^k(θ/2)`, `C = Σ c_k sin^k(θ/2)` over odd `k ≤ L`;
//! * even `L`: `A = Σ_{k=0}^{L/2} a_k cos(kθ)`, `C = Σ_{k=1}^{L/2} c_k sin(kθ)`.
//!
//! A pair `(A, C)` of that shape is realisable by some phase sequence iff `A[0] = 1` and
//! `A² + C² ≤ 1` everywhere. Only `A` and `C` enter the fidelity to an x-axis target, so
//! gate design works entirely in coefficient space and phases are recovered afterwards.

mod extract;

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::su2::{self, PhaseSequence};
use crate::tolerances;
use crate::{Error, Result};

pub use extract::{extract_phases, phases_from_coefficients, Extraction, ExtractionOptions, PhaseStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(length: usize) -> Self {
        if length % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// Number of `a` and `c` coefficients for a sequence of `length` pulses.
pub fn coefficient_counts(length: usize) -> (usize, usize) {
    match Parity::of(length) {
        Parity::Odd => (length.div_ceil(2), length.div_ceil(2)),
        Parity::Even => (length / 2 + 1, length / 2),
    }
}

/// Basis functions of `A` and `C` for a given sequence length, and their θ-derivatives.
#[derive(Debug, Clone, Copy)]
pub struct ResponseBasis {
    length: usize,
}

impl ResponseBasis {
    pub fn new(length: usize) -> Self {
        assert!(length >= 1, "sequence length must be positive");
        Self { length }
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn a_row(&self, theta: f64) -> Vec<f64> {
        let (na, _) = coefficient_counts(self.length);
        match Parity::of(self.length) {
            Parity::Odd => {
                let ch = (theta / 2.0).cos();
                (0..na).map(|i| ch.powi(2 * i as i32 + 1)).collect()
            }
            Parity::Even => (0..na).map(|k| (k as f64 * theta).cos()).collect(),
        }
    }

    pub fn c_row(&self, theta: f64) -> Vec<f64> {
        let (_, nc) = coefficient_counts(self.length);
        match Parity::of(self.length) {
            Parity::Odd => {
                let sh = (theta / 2.0).sin();
                (0..nc).map(|i| sh.powi(2 * i as i32 + 1)).collect()
            }
            Parity::Even => (1..=nc).map(|k| (k as f64 * theta).sin()).collect(),
        }
    }

    pub fn a_derivative_row(&self, theta: f64) -> Vec<f64> {
        let (na, _) = coefficient_counts(self.length);
        match Parity::of(self.length) {
            Parity::Odd => {
                let (sh, ch) = (theta / 2.0).sin_cos();
                (0..na)
                    .map(|i| {
                        let k = 2 * i + 1;
                        -0.5 * k as f64 * ch.powi(k as i32 - 1) * sh
                    })
                    .collect()
            }
            Parity::Even => (0..na).map(|k| -(k as f64) * (k as f64 * theta).sin()).collect(),
        }
    }

    pub fn c_derivative_row(&self, theta: f64) -> Vec<f64> {
        let (_, nc) = coefficient_counts(self.length);
        match Parity::of(self.length) {
            Parity::Odd => {
                let (sh, ch) = (theta / 2.0).sin_cos();
                (0..nc)
                    .map(|i| {
                        let k = 2 * i + 1;
                        0.5 * k as f64 * sh.powi(k as i32 - 1) * ch
                    })
                    .collect()
            }
            Parity::Even => (1..=nc).map(|k| k as f64 * (k as f64 * theta).cos()).collect(),
        }
    }
}

/// Coefficients of `A[θ]` and `C[θ]` in the parity-appropriate basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseCoefficients {
    length: usize,
    a: Vec<f64>,
    c: Vec<f64>,
}

impl ResponseCoefficients {
    pub fn new(length: usize, a: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        if length == 0 {
            return Err(Error::Domain("sequence length must be positive".into()));
        }
        let (na, nc) = coefficient_counts(length);
        if a.len() != na || c.len() != nc {
            return Err(Error::Domain(format!(
                "length {length} needs {na} a- and {nc} c-coefficients, got {} and {}",
                a.len(),
                c.len()
            )));
        }
        if a.iter().chain(&c).any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite coefficient".into()));
        }
        Ok(Self { length, a, c })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.length)
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn basis(&self) -> ResponseBasis {
        ResponseBasis::new(self.length)
    }

    /// `(A[θ], C[θ])`.
    pub fn evaluate(&self, theta: f64) -> (f64, f64) {
        let (sh, ch) = (theta / 2.0).sin_cos();
        self.evaluate_half_angle(ch, sh)
    }

    /// Evaluate from `cos(θ/2)`, `sin(θ/2)`; used by the dense norm scan.
    fn evaluate_half_angle(&self, ch: f64, sh: f64) -> (f64, f64) {
        match self.parity() {
            Parity::Odd => {
                let (ch2, sh2) = (ch * ch, sh * sh);
                let (mut pa, mut pc) = (ch, sh);
                let (mut av, mut cv) = (0.0, 0.0);
                for (a, c) in self.a.iter().zip(&self.c) {
                    av += a * pa;
                    cv += c * pc;
                    pa *= ch2;
                    pc *= sh2;
                }
                (av, cv)
            }
            Parity::Even => {
                let c1 = ch * ch - sh * sh;
                let s1 = 2.0 * sh * ch;
                // cos(kθ), sin(kθ) by the angle-addition recurrence
                let (mut ck, mut sk) = (1.0, 0.0);
                let mut av = self.a[0];
                let mut cv = 0.0;
                for k in 1..self.a.len() {
                    let next_c = ck * c1 - sk * s1;
                    let next_s = sk * c1 + ck * s1;
                    ck = next_c;
                    sk = next_s;
                    av += self.a[k] * ck;
                    cv += self.c[k - 1] * sk;
                }
                (av, cv)
            }
        }
    }

    /// `(dA/dθ, dC/dθ)`.
    pub fn derivative(&self, theta: f64) -> (f64, f64) {
        let b = self.basis();
        let da = dot(&b.a_derivative_row(theta), &self.a);
        let dc = dot(&b.c_derivative_row(theta), &self.c);
        (da, dc)
    }

    pub fn norm_sq(&self, theta: f64) -> f64 {
        let (a, c) = self.evaluate(theta);
        a * a + c * c
    }

    /// Coefficients of the response after adding π to every phase: `A` unchanged, `C`
    /// negated (the shifted sequence realises `U[−θ]`).
    pub fn mirrored(&self) -> Self {
        Self {
            length: self.length,
            a: self.a.clone(),
            c: self.c.iter().map(|c| -c).collect(),
        }
    }

    /// Largest coefficient-wise absolute difference; `∞` on a shape mismatch.
    pub fn max_abs_diff(&self, other: &ResponseCoefficients) -> f64 {
        if self.length != other.length {
            return f64::INFINITY;
        }
        self.a
            .iter()
            .zip(&other.a)
            .chain(self.c.iter().zip(&other.c))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Interpolation nodes `θ_j = π(j + ½)/n`, all strictly inside `(0, π)`.
fn nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| PI * (j as f64 + 0.5) / n as f64).collect()
}

/// Sampling-and-solve forward map for a fixed sequence length. The node matrices are
/// inverted once so repeated evaluations (phase extraction) are a few dot products.
#[derive(Debug, Clone)]
pub(crate) struct ForwardMap {
    length: usize,
    a_nodes: Vec<f64>,
    c_nodes: Vec<f64>,
    a_inv: nalgebra::DMatrix<f64>,
    c_inv: nalgebra::DMatrix<f64>,
}

impl ForwardMap {
    pub(crate) fn new(length: usize) -> Result<Self> {
        let basis = ResponseBasis::new(length);
        let (na, nc) = coefficient_counts(length);
        let a_nodes = nodes(na);
        let c_nodes = nodes(nc);
        let invert = |rows: Vec<Vec<f64>>, what: &str| -> Result<nalgebra::DMatrix<f64>> {
            let n = rows.len();
            let m = nalgebra::DMatrix::from_fn(n, n, |i, j| rows[i][j]);
            let cond = linalg::condition_number(&m);
            if cond > tolerances::MAX_CONDITION {
                return Err(Error::Internal(format!("{what} interpolation matrix near singular ({cond:.3e})")));
            }
            m.try_inverse()
                .ok_or_else(|| Error::Internal(format!("{what} interpolation matrix singular")))
        };
        let a_inv = invert(a_nodes.iter().map(|&t| basis.a_row(t)).collect(), "A")?;
        let c_inv = invert(c_nodes.iter().map(|&t| basis.c_row(t)).collect(), "C")?;
        Ok(Self { length, a_nodes, c_nodes, a_inv, c_inv })
    }

    pub(crate) fn length(&self) -> usize {
        self.length
    }

    /// Coefficients `(a, c)` of the sequence given by raw phases (no reduction needed).
    pub(crate) fn apply(&self, phases: &[f64]) -> (Vec<f64>, Vec<f64>) {
        debug_assert_eq!(phases.len(), self.length);
        let sample = |theta: f64| {
            let u = phases
                .iter()
                .fold(su2::Unitary2::identity(), |acc, &p| {
                    su2::rotation_matrix(su2::Rotation::new(p, theta)).expect("finite phase") * acc
                });
            // exact for SU(2) products; no sign choice involved
            let m = u.entries();
            (0.5 * (m[0][0] + m[1][1]).re, 0.5 * (m[0][1] + m[1][0]).im)
        };
        let a_samples: Vec<f64> = self.a_nodes.iter().map(|&t| sample(t).0).collect();
        let c_samples: Vec<f64> = self.c_nodes.iter().map(|&t| sample(t).1).collect();
        let a = (0..self.a_inv.nrows())
            .map(|i| (0..a_samples.len()).map(|j| self.a_inv[(i, j)] * a_samples[j]).sum())
            .collect();
        let c = (0..self.c_inv.nrows())
            .map(|i| (0..c_samples.len()).map(|j| self.c_inv[(i, j)] * c_samples[j]).sum())
            .collect();
        (a, c)
    }
}

/// Forward map: response coefficients of a phase sequence.
///
/// `A` and `C` are sampled from the exact product at interpolation nodes in `(0, π)`,
/// the square basis systems are solved, and the fit is checked against the product at
/// `4L` fresh points.
pub fn coefficients_from_phases(s: &PhaseSequence) -> Result<ResponseCoefficients> {
    let fm = ForwardMap::new(s.len())?;
    let (a, c) = fm.apply(s.phases());
    let rc = ResponseCoefficients::new(s.len(), a, c)?;
    let checks = 4 * s.len();
    for j in 0..checks {
        let theta = TAU * (j as f64 + 0.3) / checks as f64;
        let p = su2::pauli_decompose(&su2::compose_sequence(s, theta))?;
        let (a, c) = rc.evaluate(theta);
        let err = (a - p.a).abs().max((c - p.c).abs());
        if err > tolerances::FORWARD_FIT {
            return Err(Error::Internal(format!(
                "forward map residual {err:.3e} at θ={theta:.6}"
            )));
        }
    }
    Ok(rc)
}

/// Conditions of the achievability characterisation that a coefficient set can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// `A[0] = 1`.
    UnitAtOrigin,
    /// `A²[θ] + C²[θ] ≤ 1` for all θ.
    NormBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AchievabilityReport {
    pub achievable: bool,
    /// `max_θ A²[θ] + C²[θ]`.
    pub max_norm: f64,
    pub argmax_theta: f64,
    pub condition_failures: Vec<Condition>,
}

const SCAN_POINTS: usize = 4096;

fn half_angle_table(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|j| {
            let (s, c) = (PI * j as f64 / n as f64).sin_cos();
            (c, s)
        })
        .collect()
}

fn default_table() -> &'static [(f64, f64)] {
    static TABLE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| half_angle_table(SCAN_POINTS))
}

/// Maximise `f` on `[lo, hi]` by golden-section search down to `tol` in the argument.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Check the achievability conditions: `A[0] = 1` and `max A² + C² ≤ 1 + NORM_SLACK`.
///
/// The norm is scanned on `max(4096, 64L)` points of `[0, 2π)` and the best grid point is
/// refined by golden-section search to `1e-10` in θ.
pub fn check_achievable(rc: &ResponseCoefficients) -> AchievabilityReport {
    let n = SCAN_POINTS.max(64 * rc.length());
    let owned;
    let table: &[(f64, f64)] = if n == SCAN_POINTS {
        default_table()
    } else {
        owned = half_angle_table(n);
        &owned
    };
    let (mut best_j, mut best) = (0usize, f64::NEG_INFINITY);
    for (j, &(ch, sh)) in table.iter().enumerate() {
        let (a, c) = rc.evaluate_half_angle(ch, sh);
        let v = a * a + c * c;
        if v > best {
            best = v;
            best_j = j;
        }
    }
    let step = TAU / n as f64;
    let centre = step * best_j as f64;
    let (arg, refined) = golden_max(|t| rc.norm_sq(t), centre - step, centre + step, 1e-10);
    let (max_norm, argmax_theta) = if refined > best {
        (refined, arg.rem_euclid(TAU))
    } else {
        (best, centre)
    };

    let mut condition_failures = Vec::new();
    if (rc.evaluate(0.0).0 - 1.0).abs() > tolerances::CONTRACT {
        condition_failures.push(Condition::UnitAtOrigin);
    }
    if max_norm > 1.0 + tolerances::NORM_SLACK {
        condition_failures.push(Condition::NormBound);
    }
    AchievabilityReport {
        achievable: condition_failures.is_empty(),
        max_norm,
        argmax_theta,
        condition_failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn seq(v: &[f64]) -> PhaseSequence {
        PhaseSequence::new(v.to_vec()).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let rc = ResponseCoefficients::new(4, vec![0.5, 0.0, 0.5], vec![0.3, -0.2]).unwrap();
        let (a0, c0) = rc.evaluate(0.0);
        assert!((a0 - 1.0).abs() < 1e-15 && c0.abs() < 1e-15);
        assert!(rc.evaluate(FRAC_PI_2).0.abs() < 1e-15);

        let x = ResponseCoefficients::new(1, vec![1.0], vec![-1.0]).unwrap();
        for t in [0.1, 1.3, 2.9, 5.0] {
            let (a, c) = x.evaluate(t);
            assert!((a - (t / 2.0).cos()).abs() < 1e-15 && (c + (t / 2.0).sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn shape_is_validated() {
        assert!(ResponseCoefficients::new(4, vec![1.0, 0.0], vec![0.0, 0.0]).is_err());
        assert!(ResponseCoefficients::new(3, vec![1.0, 0.0], vec![0.0, 0.0]).is_ok());
        assert!(ResponseCoefficients::new(0, vec![], vec![]).is_err());
    }

    #[test]
    fn forward_map_single_pulse() {
        let rc = coefficients_from_phases(&seq(&[0.0])).unwrap();
        assert!((rc.a()[0] - 1.0).abs() < 1e-12 && (rc.c()[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn forward_map_double_pulse() {
        // R_0[θ]² = R_0[2θ]: A = cos θ, C = −sin θ
        let rc = coefficients_from_phases(&seq(&[0.0, 0.0])).unwrap();
        assert_eq!(rc.parity(), Parity::Even);
        assert!(rc.a()[0].abs() < 1e-12 && (rc.a()[1] - 1.0).abs() < 1e-12);
        assert!((rc.c()[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn forward_map_of_symmetric_half_turn() {
        let rc = coefficients_from_phases(&seq(&[-FRAC_PI_2, 0.0, 0.0, -FRAC_PI_2])).unwrap();
        let (a, c) = rc.evaluate(FRAC_PI_2);
        assert!(a.abs() < 1e-12 && (c + 1.0).abs() < 1e-12);
        // A = 1 + ½(cos 2θ − 1)
        assert!((rc.a()[0] - 0.5).abs() < 1e-12 && rc.a()[1].abs() < 1e-12 && (rc.a()[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_pulse_norm_is_one() {
        let r = check_achievable(&coefficients_from_phases(&seq(&[0.0])).unwrap());
        assert!(r.achievable);
        assert!((r.max_norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_at_origin_is_checked() {
        let rc = ResponseCoefficients::new(2, vec![0.2, 0.5], vec![0.1]).unwrap();
        let r = check_achievable(&rc);
        assert!(!r.achievable);
        assert!(r.condition_failures.contains(&Condition::UnitAtOrigin));
    }

    #[test]
    fn golden_section_finds_peak() {
        let (x, v) = golden_max(|t| -(t - 0.3).powi(2), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-9 && v.abs() < 1e-18);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn forward_map_matches_oracle(v in prop::collection::vec(-PI..PI, 1..5), thetas in prop::collection::vec(-7.0..7.0f64, 10)) {
            let s = seq(&v);
            let rc = coefficients_from_phases(&s).unwrap();
            for t in thetas {
                let p = su2::pauli_decompose(&su2::compose_sequence(&s, t)).unwrap();
                let (a, c) = rc.evaluate(t);
                prop_assert!((a - p.a).abs() < 1e-9 && (c - p.c).abs() < 1e-9);
            }
        }

        #[test]
        fn realised_coefficients_are_achievable(v in prop::collection::vec(-PI..PI, 1..5)) {
            let rc = coefficients_from_phases(&seq(&v)).unwrap();
            let r = check_achievable(&rc);
            prop_assert!(r.achievable, "{r:?}");
            prop_assert!(r.max_norm <= 1.0 + 1e-9);
            prop_assert!((rc.norm_sq(0.0) - 1.0).abs() < 1e-9);
        }

        #[test]
        fn parity_of_response(len in 1usize..7, coeffs in prop::collection::vec(-2.0..2.0f64, 8), t in -7.0..7.0f64) {
            let (na, nc) = coefficient_counts(len);
            let rc = ResponseCoefficients::new(len, coeffs[..na].to_vec(), coeffs[na..na + nc].to_vec()).unwrap();
            let (a1, c1) = rc.evaluate(t);
            let (a2, c2) = rc.evaluate(-t);
            prop_assert!((a1 - a2).abs() < 1e-12 && (c1 + c2).abs() < 1e-12);
        }

        #[test]
        fn derivative_matches_finite_difference(len in 1usize..6, coeffs in prop::collection::vec(-2.0..2.0f64, 8), t in -3.0..3.0f64) {
            let (na, nc) = coefficient_counts(len);
            let rc = ResponseCoefficients::new(len, coeffs[..na].to_vec(), coeffs[na..na + nc].to_vec()).unwrap();
            let h = 1e-6;
            let (ap, cp) = rc.evaluate(t + h);
            let (am, cm) = rc.evaluate(t - h);
            let (da, dc) = rc.derivative(t);
            prop_assert!((da - (ap - am) / (2.0 * h)).abs() < 1e-7);
            prop_assert!((dc - (cp - cm) / (2.0 * h)).abs() < 1e-7);
        }
    }
}

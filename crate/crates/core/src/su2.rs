//! Exact SU(2) algebra for primitive rotations and pulse sequences.
//!
//! Conventions: `|0⟩ = (1, 0)ᵀ`, `σ_z|0⟩ = +|0⟩`, and a primitive pulse of phase `φ` and
//! area `θ` is `R_φ[θ] = exp(−i θ/2 (cos φ σ_x + sin φ σ_y))`. A sequence applies its
//! first phase first, i.e. `U = R_{φ_{L−1}} ⋯ R_{φ_1} R_{φ_0}`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::tolerances;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A single equal-area pulse: phase `φ` and rotation angle `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    pub phase: f64,
    pub angle: f64,
}

impl Rotation {
    pub fn new(phase: f64, angle: f64) -> Self {
        Self { phase, angle }
    }

    pub fn matrix(&self) -> Result<Unitary2> {
        rotation_matrix(*self)
    }
}

/// A 2x2 complex matrix, row-major. Produced by the constructors in this module it is
/// always special unitary up to rounding.
#[derive(Clone, Copy, PartialEq)]
pub struct Unitary2 {
    m: [[Complex64; 2]; 2],
}

impl Unitary2 {
    pub const fn from_entries(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        Self::from_entries([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::from_entries([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let m = &self.m;
        Self::from_entries([[m[0][0] * k, m[0][1] * k], [m[1][0] * k, m[1][1] * k]])
    }

    /// Largest entry-wise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Unitary2) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        worst
    }

    /// Distance to `other` modulo the SU(2) sign, `min(‖U − V‖, ‖U + V‖)` entry-wise.
    pub fn max_abs_diff_up_to_sign(&self, other: &Unitary2) -> f64 {
        self.max_abs_diff(other)
            .min(self.max_abs_diff(&other.scale(-ONE)))
    }

    /// Deviation of `U·U†` from the identity, entry-wise max.
    pub fn unitarity_defect(&self) -> f64 {
        (*self * self.adjoint()).max_abs_diff(&Unitary2::identity())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Mul for Unitary2 {
    type Output = Unitary2;

    fn mul(self, rhs: Unitary2) -> Unitary2 {
        let a = &self.m;
        let b = &rhs.m;
        Unitary2::from_entries([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

impl fmt::Debug for Unitary2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.m;
        write!(
            f,
            "[[{:.9}, {:.9}], [{:.9}, {:.9}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

/// Coefficients of `U = A·1 + i(B σ_z + C σ_x + D σ_y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliDecomposition {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl PauliDecomposition {
    pub fn norm_sq(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn reconstruct(&self) -> Unitary2 {
        // A + iBσz + iCσx + iDσy
        let a = Complex64::new(self.a, 0.0);
        let ib = I * self.b;
        let ic = I * self.c;
        let d = Complex64::new(self.d, 0.0);
        Unitary2::from_entries([[a + ib, ic + d], [ic - d, a - ib]])
    }

    pub fn negated(&self) -> Self {
        Self { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
    }

    /// Representative of the `±` pair with the first non-negligible component positive,
    /// in the order A, B, C, D.
    pub fn canonical(&self) -> Self {
        for v in [self.a, self.b, self.c, self.d] {
            if v.abs() > tolerances::ALGEBRAIC {
                return if v < 0.0 { self.negated() } else { *self };
            }
        }
        *self
    }
}

/// Phases of a composite pulse sequence, each stored reduced to `(−π, π]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PhaseSequence(Vec<f64>);

impl PhaseSequence {
    pub fn new(phases: Vec<f64>) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::Domain("phase sequence must contain at least one pulse".into()));
        }
        if let Some(bad) = phases.iter().find(|p| !p.is_finite()) {
            return Err(Error::Domain(format!("non-finite phase {bad}")));
        }
        Ok(Self(phases.into_iter().map(reduce_phase).collect()))
    }

    pub fn phases(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Every phase shifted by `delta` (a global z-rotation of the frame).
    pub fn shifted(&self, delta: f64) -> Self {
        Self(self.0.iter().map(|p| reduce_phase(p + delta)).collect())
    }

    pub fn compose(&self, theta: f64) -> Unitary2 {
        compose_sequence(self, theta)
    }
}

impl TryFrom<Vec<f64>> for PhaseSequence {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PhaseSequence> for Vec<f64> {
    fn from(s: PhaseSequence) -> Self {
        s.0
    }
}

/// Reduce an angle to `(−π, π]`.
pub fn reduce_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

pub fn rotation_matrix(r: Rotation) -> Result<Unitary2> {
    if !r.phase.is_finite() || !r.angle.is_finite() {
        return Err(Error::Domain(format!(
            "rotation needs finite inputs, got phase={} angle={}",
            r.phase, r.angle
        )));
    }
    Ok(pulse(r.phase, r.angle))
}

#[inline]
fn pulse(phase: f64, angle: f64) -> Unitary2 {
    let (s, c) = (angle / 2.0).sin_cos();
    let (sp, cp) = phase.sin_cos();
    let diag = Complex64::new(c, 0.0);
    // −i s (cos φ σx + sin φ σy): off-diagonals −i s e^{∓iφ}
    let upper = Complex64::new(-s * sp, -s * cp);
    let lower = Complex64::new(s * sp, -s * cp);
    Unitary2::from_entries([[diag, upper], [lower, diag]])
}

/// Product of the sequence's pulses at common area `theta`, first phase acting first.
pub fn compose_sequence(s: &PhaseSequence, theta: f64) -> Unitary2 {
    s.phases()
        .iter()
        .fold(Unitary2::identity(), |acc, &phi| pulse(phi, theta) * acc)
}

/// Pauli-basis coefficients of an SU(2) matrix.
///
/// For inputs with `det = 1` the decomposition is exact and no sign is chosen. A unitary
/// carrying a global phase is first divided by `√det`, which is only defined up to sign;
/// that case returns the [`PauliDecomposition::canonical`] branch.
pub fn pauli_decompose(u: &Unitary2) -> Result<PauliDecomposition> {
    if !u.is_finite() {
        return Err(Error::Contract("matrix has non-finite entries".into()));
    }
    let defect = u.unitarity_defect();
    if defect > tolerances::CONTRACT {
        return Err(Error::Contract(format!("matrix not unitary (defect {defect:.3e})")));
    }
    let det = u.det();
    let (v, rephased) = if (det - ONE).norm() <= tolerances::CONTRACT {
        (*u, false)
    } else {
        (u.scale(det.sqrt().inv()), true)
    };
    let m = v.entries();
    let d = PauliDecomposition {
        a: 0.5 * (m[0][0] + m[1][1]).re,
        b: 0.5 * (m[0][0] - m[1][1]).im,
        c: 0.5 * (m[0][1] + m[1][0]).im,
        d: 0.5 * (m[0][1] - m[1][0]).re,
    };
    Ok(if rephased { d.canonical() } else { d })
}

/// `F = |cos(θ_T/2) A − sin(θ_T/2) C|`, the overlap of `u` with `R_0[θ_T]`.
pub fn fidelity(theta_t: f64, u: &Unitary2) -> Result<f64> {
    let p = pauli_decompose(u)?;
    Ok(fidelity_from_components(theta_t, p.a, p.c))
}

pub fn fidelity_from_components(theta_t: f64, a: f64, c: f64) -> f64 {
    let (s, co) = (theta_t / 2.0).sin_cos();
    (co * a - s * c).abs()
}

/// `(1/2)|tr(R_0[θ_T] U†)|`, the trace form of [`fidelity`].
pub fn trace_fidelity(theta_t: f64, u: &Unitary2) -> f64 {
    0.5 * (pulse(0.0, theta_t) * u.adjoint()).trace().norm()
}

/// `|⟨1|U|0⟩|²`: the `|1⟩` population after applying `u` to `|0⟩`.
#[doc(alias = "ground_state_population")]
pub fn excited_population(u: &Unitary2) -> f64 {
    u.entry(1, 0).norm_sqr().clamp(0.0, 1.0)
}

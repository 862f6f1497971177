//! Recover phases from response coefficients (`L ≤ 4`).
//!
//! Multi-start damped Gauss-Newton (Levenberg-Marquardt) on the coefficient residual
//! `forward(φ) − target`. Starts are the caller's hints followed by a fixed, seeded list
//! of uniform draws; the first start (in list order) that converges wins, otherwise the
//! lowest residual does, ties going to the lower index. Starts are evaluated in chunks
//! so a parallel build returns the same answer as a sequential one.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_achievable, ForwardMap, ResponseCoefficients};
use crate::par::*;
use crate::su2::PhaseSequence;
use crate::tolerances;
use crate::{Error, Result};

/// Phase-space restriction used during extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseStructure {
    /// All `L` phases free.
    Free,
    /// `L = 4` with `φ₂ = −φ₁`, `φ₃ = −φ₀`.
    AntiSymmetric,
    /// `L = 4` with `φ₂ = φ₁`, `φ₃ = φ₀`.
    Symmetric,
}

impl PhaseStructure {
    fn unknowns(&self, length: usize) -> usize {
        match self {
            PhaseStructure::Free => length,
            PhaseStructure::AntiSymmetric | PhaseStructure::Symmetric => 2,
        }
    }

    fn expand(&self, x: &[f64]) -> Vec<f64> {
        match self {
            PhaseStructure::Free => x.to_vec(),
            PhaseStructure::AntiSymmetric => vec![x[0], x[1], -x[1], -x[0]],
            PhaseStructure::Symmetric => vec![x[0], x[1], x[1], x[0]],
        }
    }

    /// Project a full phase list onto this structure's unknowns, if it fits.
    fn project(&self, phases: &[f64]) -> Option<Vec<f64>> {
        match self {
            PhaseStructure::Free => Some(phases.to_vec()),
            _ if phases.len() == 4 => Some(vec![phases[0], phases[1]]),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExtractionOptions {
    pub structure: PhaseStructure,
    /// Number of random starts after the hints.
    pub starts: usize,
    pub seed: u64,
    pub hints: Vec<PhaseSequence>,
    /// Accepted coefficient residual (max-abs).
    pub tolerance: f64,
}

impl Default for ExtractionOptions {
    fn default() -> Self {
        Self {
            structure: PhaseStructure::Free,
            starts: 64,
            seed: 0x005e_ed0f_9a5e,
            hints: Vec::new(),
            tolerance: tolerances::EXTRACTION,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub phases: PhaseSequence,
    /// Max-abs coefficient residual of the returned phases.
    pub residual: f64,
    /// Index into the start list (hints first) that produced the answer.
    pub start_index: usize,
}

/// Stop a start early once the residual is this small.
const CONVERGED: f64 = 1e-12;
const CHUNK: usize = 16;
const MAX_ITERATIONS: usize = 200;

struct Problem<'a> {
    map: ForwardMap,
    target: &'a ResponseCoefficients,
    structure: PhaseStructure,
}

impl Problem<'_> {
    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let (a, c) = self.map.apply(&self.structure.expand(x));
        a.iter()
            .zip(self.target.a())
            .chain(c.iter().zip(self.target.c()))
            .map(|(u, v)| u - v)
            .collect()
    }

    fn jacobian(&self, x: &[f64], r0_len: usize) -> DMatrix<f64> {
        let h = 1e-7;
        let n = x.len();
        let mut j = DMatrix::zeros(r0_len, n);
        let mut xp = x.to_vec();
        for k in 0..n {
            xp[k] = x[k] + h;
            let rp = self.residual(&xp);
            xp[k] = x[k] - h;
            let rm = self.residual(&xp);
            xp[k] = x[k];
            for i in 0..r0_len {
                j[(i, k)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        j
    }

    /// Levenberg-Marquardt from `x0`; returns the final point and its max-abs residual.
    fn solve(&self, x0: Vec<f64>, stop: f64, iterations: usize) -> (Vec<f64>, f64) {
        let mut x = x0;
        let mut r = self.residual(&x);
        let mut cost: f64 = r.iter().map(|v| v * v).sum();
        let mut lambda = 1e-3;
        for _ in 0..iterations {
            if max_abs(&r) < stop {
                break;
            }
            let j = self.jacobian(&x, r.len());
            let jt = j.transpose();
            let jtj = &jt * &j;
            let g = &jt * DVector::from_column_slice(&r);
            let mut improved = false;
            while lambda < 1e12 {
                let mut a = jtj.clone();
                for d in 0..a.nrows() {
                    a[(d, d)] += lambda * (1.0 + jtj[(d, d)]);
                }
                let Some(step) = a.lu().solve(&(-&g)) else {
                    lambda *= 10.0;
                    continue;
                };
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, si)| xi + si).collect();
                let rt = self.residual(&trial);
                let ct: f64 = rt.iter().map(|v| v * v).sum();
                if ct < cost {
                    x = trial;
                    r = rt;
                    cost = ct;
                    lambda = (lambda / 3.0).max(1e-15);
                    improved = true;
                    break;
                }
                lambda *= 4.0;
            }
            if !improved {
                break;
            }
        }
        let res = max_abs(&r);
        (x, res)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Phases realising `rc`, searching the given structure.
pub fn extract_phases(rc: &ResponseCoefficients, options: &ExtractionOptions) -> Result<Extraction> {
    let length = rc.length();
    if length > 4 {
        return Err(Error::Precondition(format!(
            "phase extraction supports sequences of length ≤ 4, got {length}"
        )));
    }
    if options.structure != PhaseStructure::Free && length != 4 {
        return Err(Error::Precondition("structured extraction needs length 4".into()));
    }
    let report = check_achievable(rc);
    if !report.achievable {
        return Err(Error::Extraction { best_residual: f64::INFINITY });
    }

    let problem = Problem {
        map: ForwardMap::new(length)?,
        target: rc,
        structure: options.structure,
    };
    debug_assert_eq!(problem.map.length(), length);
    let n = options.structure.unknowns(length);

    let mut starts: Vec<Vec<f64>> = options
        .hints
        .iter()
        .filter(|h| h.len() == length)
        .filter_map(|h| options.structure.project(h.phases()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    starts.extend((0..options.starts).map(|_| (0..n).map(|_| rng.random_range(-PI..PI)).collect()));

    let mut best: Option<(usize, Vec<f64>, f64)> = None;
    for (chunk_index, chunk) in starts.chunks(CHUNK).enumerate() {
        let results: Vec<(Vec<f64>, f64)> =
            chunk.to_vec().into_par_iter().map(|x0| problem.solve(x0, CONVERGED, MAX_ITERATIONS)).collect();
        for (k, (x, res)) in results.into_iter().enumerate() {
            let index = chunk_index * CHUNK + k;
            if best.as_ref().is_none_or(|b| res < b.2) {
                best = Some((index, x, res));
            }
        }
        if best.as_ref().is_some_and(|b| b.2 < CONVERGED) {
            break;
        }
    }

    let (start_index, x, residual) = best.ok_or(Error::Extraction { best_residual: f64::INFINITY })?;
    if residual > options.tolerance {
        return Err(Error::Extraction { best_residual: residual });
    }
    Ok(Extraction {
        phases: PhaseSequence::new(options.structure.expand(&x))?,
        residual,
        start_index,
    })
}

/// Phases realising `rc` (all phases free), optionally seeded with a starting guess.
pub fn phases_from_coefficients(rc: &ResponseCoefficients, hint: Option<&PhaseSequence>) -> Result<PhaseSequence> {
    let options = ExtractionOptions {
        hints: hint.into_iter().cloned().collect(),
        ..ExtractionOptions::default()
    };
    extract_phases(rc, &options).map(|e| e.phases)
}

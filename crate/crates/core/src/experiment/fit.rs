//! Fringe fits and residual statistics.
//!
//! Fringes are fitted as `p(x) = c₀ + c₁ cos x + c₂ sin x`, which is linear in the
//! parameters and equals `offset + (contrast/2)(1 − cos(x − x₀))` with
//! `contrast = 2√(c₁² + c₂²)` and `offset = c₀ − contrast/2`. Shot-noise data are fitted
//! by iteratively reweighted least squares with binomial variances.

use std::f64::consts::TAU;

use nalgebra::{DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::ScanResult;
use crate::{Error, Result};

/// Which scan a fringe comes from; both use `x` directly as the fringe phase
/// (`cos²(Δφ/2)` for Ramsey, `sin²(θ_T/2)` for target scans).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FringeFamily {
    Ramsey,
    TargetScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContrastFit {
    pub contrast: f64,
    pub offset: f64,
    /// One standard deviation of `contrast`.
    pub uncertainty: f64,
    /// Fringe origin `x₀`.
    pub phase: f64,
    pub rms_residual: f64,
}

const MIN_POINTS: usize = 8;
const REWEIGHTS: usize = 4;

fn weighted_fit(x: &[f64], y: &[f64], w: &[f64]) -> Option<(Vector3<f64>, Matrix3<f64>)> {
    let mut ata = Matrix3::zeros();
    let mut atb = Vector3::zeros();
    for ((&xi, &yi), &wi) in x.iter().zip(y).zip(w) {
        let row = Vector3::new(1.0, xi.cos(), xi.sin());
        ata += wi * row * row.transpose();
        atb += wi * yi * row;
    }
    let inv = ata.try_inverse()?;
    Some((inv * atb, inv))
}

fn model(c: &Vector3<f64>, x: f64) -> f64 {
    c[0] + c[1] * x.cos() + c[2] * x.sin()
}

/// Fit contrast and offset of zone `zone` of `scan`.
///
/// With `shots > 0` the weights are `n / (p̂(1 − p̂))` (p̂ from the previous iterate,
/// clamped to `[½/n, 1 − ½/n]`) and the covariance is the inverse weighted normal matrix.
/// Noiseless scans are fitted unweighted with the covariance scaled by the residual
/// variance.
pub fn fit_contrast(scan: &ScanResult, zone: usize, _family: FringeFamily) -> Result<ContrastFit> {
    let series = scan
        .zones
        .get(zone)
        .ok_or_else(|| Error::Domain(format!("scan has no zone {zone}")))?;
    let (x, y) = (&scan.x, &series.population);
    let fail = |reason: &str, rms: f64| Error::Fit { reason: reason.into(), rms_residual: rms };
    if x.len() < MIN_POINTS {
        return Err(fail(&format!("{} points, need at least {MIN_POINTS}", x.len()), f64::NAN));
    }
    let span = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - x.iter().cloned().fold(f64::INFINITY, f64::min);
    if span < TAU * (1.0 - 1e-9) {
        return Err(fail(&format!("x spans {span:.4} rad, less than one fringe"), f64::NAN));
    }

    let n = scan.shots as f64;
    let mut w = vec![1.0; x.len()];
    let (mut c, mut inv) = weighted_fit(x, y, &w).ok_or_else(|| fail("singular normal equations", f64::NAN))?;
    if scan.shots > 0 {
        let lo = 0.5 / n;
        for _ in 0..REWEIGHTS {
            for (wi, &xi) in w.iter_mut().zip(x) {
                let p = model(&c, xi).clamp(lo, 1.0 - lo);
                *wi = n / (p * (1.0 - p));
            }
            (c, inv) = weighted_fit(x, y, &w).ok_or_else(|| fail("singular weighted normal equations", f64::NAN))?;
        }
    }
    let residuals: Vec<f64> = x.iter().zip(y).map(|(&xi, &yi)| yi - model(&c, xi)).collect();
    let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    if !c.iter().all(|v| v.is_finite()) {
        return Err(fail("non-finite fit parameters", rms));
    }
    let cov = if scan.shots > 0 {
        inv
    } else {
        let dof = (x.len() - 3) as f64;
        inv * (residuals.iter().map(|r| r * r).sum::<f64>() / dof)
    };

    let r = c[1].hypot(c[2]);
    let contrast = 2.0 * r;
    // delta method on 2√(c₁² + c₂²)
    let grad = if r > 0.0 { Vector3::new(0.0, 2.0 * c[1] / r, 2.0 * c[2] / r) } else { Vector3::new(0.0, 2.0, 0.0) };
    let var = (grad.transpose() * cov * grad)[(0, 0)].max(0.0);
    Ok(ContrastFit {
        contrast,
        offset: c[0] - r,
        uncertainty: var.sqrt(),
        phase: (-c[2]).atan2(-c[1]),
        rms_residual: rms,
    })
}

/// Pearson correlation of two equal-length vectors.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::Domain(format!("need two equal-length vectors of ≥ 2 points, got {} and {}", a.len(), b.len())));
    }
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let va = DVector::from_iterator(a.len(), a.iter().map(|v| v - ma));
    let vb = DVector::from_iterator(b.len(), b.iter().map(|v| v - mb));
    let (na, nb) = (va.norm(), vb.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::UndefinedCorrelation("a residual vector has zero variance".into()));
    }
    Ok((va.dot(&vb) / (na * nb)).clamp(-1.0, 1.0))
}

/// Correlation of `(observed − ideal)` residuals of zones `a` and `b` of `scan`.
#[doc(alias = "residual_covariance")]
pub fn residual_correlation(scan: &ScanResult, a: usize, ideal_a: &[f64], b: usize, ideal_b: &[f64]) -> Result<f64> {
    let za = scan.zones.get(a).ok_or_else(|| Error::Domain(format!("scan has no zone {a}")))?;
    let zb = scan.zones.get(b).ok_or_else(|| Error::Domain(format!("scan has no zone {b}")))?;
    if ideal_a.len() != za.population.len() || ideal_b.len() != zb.population.len() {
        return Err(Error::Domain("ideal curve length differs from the scan".into()));
    }
    let ra: Vec<f64> = za.population.iter().zip(ideal_a).map(|(o, i)| o - i).collect();
    let rb: Vec<f64> = zb.population.iter().zip(ideal_b).map(|(o, i)| o - i).collect();
    pearson(&ra, &rb)
}

/// Least-squares design matrix rank check used by tests of the fit family.
#[cfg(test)]
fn design_rank(x: &[f64]) -> usize {
    let m = nalgebra::DMatrix::from_fn(x.len(), 3, |i, j| match j {
        0 => 1.0,
        1 => x[i].cos(),
        _ => x[i].sin(),
    });
    m.rank(1e-10)
}

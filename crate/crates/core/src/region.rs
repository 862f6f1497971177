//! Validity maps over `(θ₀, θ_T)` and full-range base-rotation intervals.
//!
//! Axes are uniform node grids: `n = round(span / resolution)` intervals, with the open
//! ends of `θ₀ ∈ (0, π)` dropped. Validity depends on `θ_T` only through the folded
//! target `|θ_T|` (mod 4π), so negative targets reuse the verdict of their mirror.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::format::sig9;
use crate::par::*;
use crate::response::check_achievable;
use crate::synthesis::{self, antisymmetric_coefficients, g3, g4, GateRequest, Variant};
use crate::tolerances;
use crate::{Error, Result};

/// Base-rotation window over which the anti-symmetric family reaches every target.
pub const FULL_RANGE_WINDOW: (f64, f64) = (0.5 * PI, 0.728 * PI);

/// Default grid step.
pub const DEFAULT_RESOLUTION: f64 = 0.005 * PI;
/// Finest grid step accepted.
pub const MIN_RESOLUTION: f64 = 0.001 * PI;

/// Whether `variant` has an exact solution at `(θ₀, θ_T)`.
///
/// Closed-form `g ≤ 0` for length 3 and symmetric length 4; for the anti-symmetric family
/// the solved coefficients must pass [`check_achievable`].
pub fn is_valid(variant: Variant, theta0: f64, theta_t: f64) -> bool {
    if !(theta0 > 0.0 && theta0 < PI) || !theta_t.is_finite() {
        return false;
    }
    let (t, _) = synthesis::fold_target(theta_t);
    match variant {
        Variant::L3 => g3(theta0, t) <= tolerances::BOUNDARY,
        Variant::L4Symmetric => g4(theta0, t) <= tolerances::BOUNDARY,
        Variant::L4AntiSymmetric => {
            t <= 4.0 * theta0 + tolerances::BOUNDARY
                && antisymmetric_coefficients(theta0, t).is_ok_and(|rc| check_achievable(&rc).achievable)
        }
    }
}

/// `n + 1` uniform nodes from `lo` to `hi`, minus the endpoints when `open`.
fn axis(lo: f64, hi: f64, resolution: f64, open: bool) -> Vec<f64> {
    let n = ((hi - lo) / resolution).round().max(1.0) as usize;
    let range = if open { 1..n } else { 0..n + 1 };
    range.map(|i| lo + (i as f64 / n as f64) * (hi - lo)).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidityGrid {
    pub variant: Variant,
    pub theta0: Vec<f64>,
    pub theta_t: Vec<f64>,
    /// Row-major: `cells[i * theta_t.len() + j]` is `(theta0[i], theta_t[j])`.
    pub cells: Vec<bool>,
    /// Per θ₀ row: every target in `[−2π, 2π]` is reachable (false if the θ_T axis does
    /// not cover that range).
    pub full_range_column: Vec<bool>,
}

impl ValidityGrid {
    pub fn cell(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.theta_t.len() + j]
    }

    pub fn valid_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// CSV with header `theta0_rad,thetaT_rad,achievable,full_range_column`, row-major.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta0_rad,thetaT_rad,achievable,full_range_column\n");
        for (i, &t0) in self.theta0.iter().enumerate() {
            for (j, &tt) in self.theta_t.iter().enumerate() {
                let _ = writeln!(out, "{},{},{},{}", sig9(t0), sig9(tt), self.cell(i, j), self.full_range_column[i]);
            }
        }
        out
    }
}

fn check_resolution(resolution: f64) -> Result<()> {
    if !(resolution.is_finite() && resolution >= MIN_RESOLUTION * (1.0 - 1e-12)) {
        return Err(Error::Domain(format!("resolution {resolution} finer than the 0.001π minimum")));
    }
    Ok(())
}

/// Evaluate `variant`'s validity on the node grid covering the given ranges.
///
/// `theta0_range` is clipped to the open interval `(0, π)`.
pub fn validity_grid(
    variant: Variant,
    theta0_range: (f64, f64),
    theta_t_range: (f64, f64),
    resolution: f64,
) -> Result<ValidityGrid> {
    check_resolution(resolution)?;
    let (lo0, hi0) = theta0_range;
    let (lot, hit) = theta_t_range;
    if !(lo0 < hi0 && lot < hit) || ![lo0, hi0, lot, hit].iter().all(|v| v.is_finite()) {
        return Err(Error::Domain("grid ranges must be finite and increasing".into()));
    }
    let theta0: Vec<f64> = axis(lo0, hi0, resolution, false).into_iter().filter(|t| *t > 0.0 && *t < PI).collect();
    let theta_t = axis(lot, hit, resolution, false);
    let covers = lot <= -TAU + 1e-12 && hit >= TAU - 1e-12;

    // one evaluation per distinct folded target; the bit pattern keys exact mirrors
    let mut folded: Vec<f64> = theta_t.iter().map(|&t| synthesis::fold_target(t).0).collect::<Vec<_>>();
    let keys: Vec<u64> = folded.iter().map(|t| t.to_bits()).collect();
    folded.sort_by(f64::total_cmp);
    folded.dedup();
    let index: HashMap<u64, usize> = folded.iter().enumerate().map(|(k, t)| (t.to_bits(), k)).collect();

    let rows: Vec<(Vec<bool>, bool)> = theta0
        .par_iter()
        .map(|&t0| {
            let verdicts: Vec<bool> = folded.iter().map(|&t| is_valid(variant, t0, t)).collect();
            let row: Vec<bool> = keys.iter().map(|k| verdicts[index[k]]).collect();
            let full = covers && row.iter().all(|&c| c);
            (row, full)
        })
        .collect();

    let full_range_column = rows.iter().map(|r| r.1).collect();
    let cells = rows.into_iter().flat_map(|r| r.0).collect();
    Ok(ValidityGrid { variant, theta0, theta_t, cells, full_range_column })
}

/// Whether every target on the `[0, 2π]` axis with the given step is reachable at `theta0`
/// (negative targets follow by mirroring).
pub fn full_range_at(variant: Variant, theta0: f64, resolution: f64) -> bool {
    axis(0.0, TAU, resolution, false).par_iter().all(|&t| is_valid(variant, theta0, t))
}

/// Longest contiguous run of full-range θ₀ columns, endpoints refined by bisection.
///
/// Columns are evaluated on the `θ₀` and `θ_T` node grids at `resolution`; each endpoint
/// is then bisected against the neighbouring invalid node down to `resolution · 1e-4`.
/// `None` when no column reaches every target.
pub fn full_range_interval(variant: Variant, resolution: f64) -> Result<Option<(f64, f64)>> {
    check_resolution(resolution)?;
    let theta0 = axis(0.0, PI, resolution, true);
    let columns: Vec<bool> = theta0.par_iter().map(|&t0| full_range_at(variant, t0, resolution)).collect();

    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < columns.len() {
        if columns[i] {
            let start = i;
            while i + 1 < columns.len() && columns[i + 1] {
                i += 1;
            }
            if best.is_none_or(|(s, e)| i - start > e - s) {
                best = Some((start, i));
            }
        }
        i += 1;
    }
    let Some((start, end)) = best else {
        return Ok(None);
    };

    let tol = resolution * 1e-4;
    let refine = |mut good: f64, mut bad: f64| {
        while (good - bad).abs() > tol {
            let mid = 0.5 * (good + bad);
            if full_range_at(variant, mid, resolution) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    };
    let lo = if start > 0 { refine(theta0[start], theta0[start - 1]) } else { theta0[start] };
    let hi = if end + 1 < theta0.len() { refine(theta0[end], theta0[end + 1]) } else { theta0[end] };
    Ok(Some((lo, hi)))
}

/// `(θ_max/θ_min)²`: the intensity ratio spanned when θ ∝ √I.
pub fn intensity_ratio(theta_min: f64, theta_max: f64) -> Result<f64> {
    if !(theta_min > 0.0 && theta_min <= theta_max && theta_max.is_finite()) {
        return Err(Error::Domain(format!("need 0 < θ_min ≤ θ_max, got ({theta_min}, {theta_max})")));
    }
    Ok((theta_max / theta_min).powi(2))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpotCheck {
    pub checked: usize,
    /// `(θ₀, θ_T, error)` for each sampled valid cell that failed to synthesize.
    pub failures: Vec<(f64, f64, String)>,
}

/// Synthesize at a seeded random `fraction` of the grid's valid cells (at least one).
pub fn spot_check(grid: &ValidityGrid, fraction: f64, seed: u64) -> SpotCheck {
    let valid: Vec<(f64, f64)> = grid
        .theta0
        .iter()
        .enumerate()
        .flat_map(|(i, &t0)| {
            grid.theta_t.iter().enumerate().filter(move |&(j, _)| grid.cell(i, j)).map(move |(_, &tt)| (t0, tt))
        })
        .collect();
    if valid.is_empty() {
        return SpotCheck { checked: 0, failures: Vec::new() };
    }
    let amount = ((valid.len() as f64 * fraction).ceil() as usize).clamp(1, valid.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = sample(&mut rng, valid.len(), amount).into_vec();
    picks.sort_unstable();
    let failures: Vec<(f64, f64, String)> = picks
        .par_iter()
        .filter_map(|&k| {
            let (t0, tt) = valid[k];
            let outcome = GateRequest::new(t0, tt, grid.variant).and_then(|r| synthesis::synthesize(&r));
            outcome.err().map(|e| (t0, tt, e.to_string()))
        })
        .collect();
    SpotCheck { checked: amount, failures }
}

//! The three scan experiments.

use std::f64::consts::FRAC_PI_2;

use super::{observe, PhaseQuantizer, ScanResult, SpamModel, ZoneSeries};
use crate::beam::{self, BeamModel, Zone};
use crate::par::*;
use crate::region::FULL_RANGE_WINDOW;
use crate::su2::{self, PhaseSequence};
use crate::synthesis::{synthesize, GateRequest, GateSolution, Variant};
use crate::tolerances;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub spam: SpamModel,
    /// 0 for noiseless populations.
    pub shots: u64,
    pub seed: u64,
    /// Realise phases as quantized displacements.
    pub quantizer: Option<PhaseQuantizer>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { spam: SpamModel::IDEAL, shots: 0, seed: 0, quantizer: None }
    }
}

impl ScanOptions {
    fn is_ideal(&self) -> bool {
        self.shots == 0 && self.spam.is_ideal() && self.quantizer.is_none()
    }

    fn realise(&self, s: &PhaseSequence) -> Result<PhaseSequence> {
        match &self.quantizer {
            Some(q) => q.quantize(s),
            None => Ok(s.clone()),
        }
    }
}

fn population(s: &PhaseSequence, theta: f64) -> f64 {
    su2::excited_population(&su2::compose_sequence(s, theta))
}

fn validate_pulse(t_p: f64) -> Result<()> {
    if !(t_p.is_finite() && t_p > 0.0) {
        return Err(Error::Domain(format!("pulse duration {t_p} must be positive")));
    }
    Ok(())
}

/// Two equal pulses with phases `0` and `Δφ`; ideal population `cos²(Δφ/2)` at `π/2` pulses.
///
/// `t_p = None` calibrates the pulse to a π/2 rotation at the zone. A noiseless, SPAM-free,
/// unquantized scan requires the base rotation to be π/2 within 1e-9.
pub fn ramsey_scan(
    beam: &BeamModel,
    zone: &Zone,
    t_p: Option<f64>,
    delta_phi: &[f64],
    opts: &ScanOptions,
) -> Result<ScanResult> {
    let t_p = t_p.unwrap_or_else(|| FRAC_PI_2 / zone.rabi(beam));
    validate_pulse(t_p)?;
    let theta = beam::base_rotation(beam, zone, t_p);
    if opts.is_ideal() && (theta - FRAC_PI_2).abs() > tolerances::CONTRACT {
        return Err(Error::Calibration(format!(
            "zone {} base rotation {theta:.9} is not π/2 (t_p = {t_p:.6e} s)",
            zone.label
        )));
    }
    let points: Vec<(f64, f64)> = delta_phi
        .par_iter()
        .enumerate()
        .map(|(j, &dphi)| {
            let wrap = |e: Error| Error::Scan { x: dphi, source: Box::new(e) };
            let s = opts.realise(&PhaseSequence::new(vec![0.0, dphi]).map_err(wrap)?).map_err(wrap)?;
            let p = population(&s, theta);
            Ok((p, observe(p, &opts.spam, opts.shots, opts.seed, 0, j).map_err(wrap)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult {
        x: delta_phi.to_vec(),
        zones: vec![series(&zone.label, points)],
        shots: opts.shots,
        seed: opts.seed,
    })
}

fn series(label: &str, points: Vec<(f64, f64)>) -> ZoneSeries {
    let (ideal, population) = points.into_iter().unzip();
    ZoneSeries { label: label.to_string(), ideal, population }
}

fn solve_at(theta0: f64, theta_t: f64, variant: Variant) -> Result<GateSolution> {
    GateRequest::new(theta0, theta_t, variant)
        .and_then(|r| synthesize(&r))
        .map_err(|e| Error::Scan { x: theta_t, source: Box::new(e) })
}

/// Single-zone scan of composite gates designed for `theta0`, composed at the zone's
/// actual base rotation. `t_p = None` sets the pulse so that the two coincide.
pub fn composite_scan(
    beam: &BeamModel,
    zone: &Zone,
    theta0: f64,
    t_p: Option<f64>,
    targets: &[f64],
    variant: Variant,
    opts: &ScanOptions,
) -> Result<ScanResult> {
    let t_p = t_p.unwrap_or_else(|| theta0 / zone.rabi(beam));
    validate_pulse(t_p)?;
    let theta = beam::base_rotation(beam, zone, t_p);
    let points = targets
        .par_iter()
        .enumerate()
        .map(|(j, &tt)| {
            let sol = solve_at(theta0, tt, variant)?;
            let wrap = |e: Error| Error::Scan { x: tt, source: Box::new(e) };
            let p = population(&opts.realise(&sol.phases).map_err(wrap)?, theta);
            Ok((p, observe(p, &opts.spam, opts.shots, opts.seed, 0, j).map_err(wrap)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult { x: targets.to_vec(), zones: vec![series(&zone.label, points)], shots: opts.shots, seed: opts.seed })
}

/// Two zones driven by the same pulses: zone `scanned` sweeps `targets` while the other
/// holds `constant_target`. Each zone runs its own phase sequence, designed for its own
/// base rotation under the calibrated pulse duration.
pub fn two_zone_scan(
    beam: &BeamModel,
    zones: &[Zone],
    scanned: usize,
    constant_target: f64,
    targets: &[f64],
    variant: Variant,
    opts: &ScanOptions,
) -> Result<ScanResult> {
    if zones.len() != 2 || scanned > 1 {
        return Err(Error::Domain("two-zone scans need exactly two zones and scanned ∈ {0, 1}".into()));
    }
    let t_p = beam::calibrate_pulse_duration(beam, zones, beam::DEFAULT_THETA_FLOOR)?;
    let thetas: Vec<f64> = zones.iter().map(|z| beam::base_rotation(beam, z, t_p)).collect();
    for (z, &t) in zones.iter().zip(&thetas) {
        if t < FULL_RANGE_WINDOW.0 - tolerances::BOUNDARY || t > FULL_RANGE_WINDOW.1 + tolerances::BOUNDARY {
            return Err(Error::Calibration(format!("zone {} base rotation {:.4}π outside the full-range window", z.label, t / std::f64::consts::PI)));
        }
    }
    let held = 1 - scanned;
    let constant = solve_at(thetas[held], constant_target, variant)?;
    let constant_phases = opts.realise(&constant.phases).map_err(|e| Error::Scan { x: constant_target, source: Box::new(e) })?;
    let p_held = population(&constant_phases, thetas[held]);

    let points = targets
        .par_iter()
        .enumerate()
        .map(|(j, &tt)| {
            let sol = solve_at(thetas[scanned], tt, variant)?;
            let wrap = |e: Error| Error::Scan { x: tt, source: Box::new(e) };
            let p = population(&opts.realise(&sol.phases).map_err(wrap)?, thetas[scanned]);
            let mut out = [(0.0, 0.0); 2];
            out[scanned] = (p, observe(p, &opts.spam, opts.shots, opts.seed, scanned, j).map_err(wrap)?);
            out[held] = (p_held, observe(p_held, &opts.spam, opts.shots, opts.seed, held, j).map_err(wrap)?);
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let zone_series = (0..2).map(|k| series(&zones[k].label, points.iter().map(|p| p[k]).collect())).collect();
    Ok(ScanResult { x: targets.to_vec(), zones: zone_series, shots: opts.shots, seed: opts.seed })
}

//! Subcommand bodies. Each job is fully described by its resolved parameters, so a
//! manifest can rerun it exactly.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use phasegate::beam::{self, QuantizationMode, Zone};
use phasegate::config::{ExperimentConfig, ModelConfig, RunConfig};
use phasegate::experiment::{
    composite_scan, fit_contrast, ramsey_scan, residual_correlation, two_zone_scan, FringeFamily, PhaseQuantizer,
    ScanOptions, ScanResult, TimingSequence,
};
use phasegate::region;
use phasegate::synthesis::{synthesize, GateRequest, Variant};
use phasegate::{Error, Result};

/// Resolutions coarser than this get a warning.
pub const COARSE_RESOLUTION: f64 = 0.05 * PI;
/// Fraction of true cells re-synthesized as a spot check of region maps.
const SPOT_CHECK_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub theta0: f64,
    pub theta_t: f64,
    pub variant: Variant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionParams {
    pub variant: Variant,
    pub theta0_range: (f64, f64),
    pub theta_t_range: (f64, f64),
    pub resolution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", content = "parameters", rename_all = "snake_case")]
pub enum Job {
    Synth(SynthParams),
    Region(RegionParams),
    Simulate(ExperimentConfig),
    Quantize(ModelConfig),
}

impl Job {
    pub fn seed(&self) -> Option<u64> {
        match self {
            Job::Simulate(c) => Some(c.seed),
            _ => None,
        }
    }
}

/// A named output file.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn json(name: &str, v: &impl Serialize) -> Self {
        let mut bytes = serde_json::to_vec_pretty(v).expect("serializable");
        bytes.push(b'\n');
        Self { name: name.to_string(), bytes }
    }

    fn text(name: &str, s: String) -> Self {
        Self { name: name.to_string(), bytes: s.into_bytes() }
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub warnings: Vec<String>,
}

pub fn run(job: &Job) -> Result<Outcome> {
    match job {
        Job::Synth(p) => synth(p),
        Job::Region(p) => region_map(p),
        Job::Simulate(c) => simulate(c),
        Job::Quantize(m) => quantize(m),
    }
}

fn synth(p: &SynthParams) -> Result<Outcome> {
    let solution = synthesize(&GateRequest::new(p.theta0, p.theta_t, p.variant)?)?;
    let validity: BTreeMap<&str, bool> =
        Variant::ALL.iter().map(|&v| (v.name(), region::is_valid(v, p.theta0, p.theta_t))).collect();
    let doc = json!({ "solution": solution, "validity": validity });
    Ok(Outcome { artifacts: vec![Artifact::json("solution.json", &doc)], warnings: Vec::new() })
}

fn region_map(p: &RegionParams) -> Result<Outcome> {
    let mut warnings = Vec::new();
    if p.resolution > COARSE_RESOLUTION {
        warnings.push(format!(
            "resolution {:.4}π is coarser than 0.05π; boundaries will be poorly resolved",
            p.resolution / PI
        ));
    }
    let grid = region::validity_grid(p.variant, p.theta0_range, p.theta_t_range, p.resolution)?;
    let interval = region::full_range_interval(p.variant, p.resolution)?;
    let ratio = interval.map(|(lo, hi)| region::intensity_ratio(lo, hi)).transpose()?;
    let check = region::spot_check(&grid, SPOT_CHECK_FRACTION, 0);
    if !check.failures.is_empty() {
        warnings.push(format!("{} of {} spot-checked cells failed to synthesize", check.failures.len(), check.checked));
    }
    let stem = format!("region_{}", p.variant.name());
    let summary = json!({
        "variant": p.variant,
        "resolution": p.resolution,
        "theta0_range": p.theta0_range,
        "theta_t_range": p.theta_t_range,
        "theta0_points": grid.theta0.len(),
        "theta_t_points": grid.theta_t.len(),
        "valid_cells": grid.valid_count(),
        "full_range_interval": interval.map(|(lo, hi)| [lo, hi]),
        "full_range_interval_over_pi": interval.map(|(lo, hi)| [lo / PI, hi / PI]),
        "intensity_ratio": ratio,
        "spot_check": check,
    });
    Ok(Outcome {
        artifacts: vec![
            Artifact::text(&format!("{stem}.csv"), grid.to_csv()),
            Artifact::json(&format!("{stem}_summary.json"), &summary),
        ],
        warnings,
    })
}

fn zone<'a>(c: &'a ExperimentConfig, label: &str) -> Result<(usize, &'a Zone)> {
    c.zones
        .iter()
        .enumerate()
        .find(|(_, z)| z.label == label)
        .ok_or_else(|| Error::Config(format!("unknown zone '{label}'")))
}

fn fits(scan: &ScanResult, zones: &[usize], family: FringeFamily) -> Vec<Value> {
    zones
        .iter()
        .map(|&k| match fit_contrast(scan, k, family) {
            Ok(f) => json!({ "zone": scan.zones[k].label, "fit": f }),
            Err(e) => json!({ "zone": scan.zones[k].label, "fit": null, "error": e.to_string() }),
        })
        .collect()
}

fn schedule(c: &ExperimentConfig, pulses: usize) -> Value {
    match &c.timing {
        Some(t) => {
            let s = TimingSequence::composite(pulses, t.pulse_s, t.move_s);
            json!({ "pulses": pulses, "total_s": s.total(), "steps": s.steps })
        }
        None => Value::Null,
    }
}

/// Independent shot-noise stream per run.
pub fn run_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add((index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn simulate(c: &ExperimentConfig) -> Result<Outcome> {
    c.validate()?;
    let beam = c.model.beam()?;
    let awg = c.model.awg()?;
    let base = ScanOptions {
        spam: c.spam_model(),
        shots: c.shots,
        seed: c.seed,
        quantizer: c.quantize_phases.then_some(PhaseQuantizer { model: awg, wavelength_m: beam.wavelength_m }),
    };
    let mut artifacts = Vec::new();
    let mut runs = Vec::new();
    for (index, run) in c.runs.iter().enumerate() {
        let opts = ScanOptions { seed: run_seed(c.seed, index), ..base };
        let csv = format!("{}.csv", run.id());
        let entry = match run {
            RunConfig::Ramsey { zone: label, delta_phi, pulse_s, .. } => {
                let (_, z) = zone(c, label)?;
                let t_p = pulse_s.unwrap_or(std::f64::consts::FRAC_PI_2 / z.rabi(&beam));
                let scan = ramsey_scan(&beam, z, Some(t_p), &delta_phi.values(), &opts)?;
                artifacts.push(Artifact::text(&csv, scan.to_csv()));
                json!({
                    "pulse_s": t_p,
                    "base_rotation": beam::base_rotation(&beam, z, t_p),
                    "fits": fits(&scan, &[0], FringeFamily::Ramsey),
                    "schedule": schedule(c, 2),
                })
            }
            RunConfig::Composite { zone: label, theta0, variant, targets, pulse_s, .. } => {
                let (_, z) = zone(c, label)?;
                let t_p = pulse_s.unwrap_or(theta0.radians() / z.rabi(&beam));
                let scan = composite_scan(&beam, z, theta0.radians(), Some(t_p), &targets.values(), *variant, &opts)?;
                artifacts.push(Artifact::text(&csv, scan.to_csv()));
                json!({
                    "pulse_s": t_p,
                    "theta0": theta0.radians(),
                    "base_rotation": beam::base_rotation(&beam, z, t_p),
                    "variant": variant,
                    "fits": fits(&scan, &[0], FringeFamily::TargetScan),
                    "schedule": schedule(c, variant.length()),
                })
            }
            RunConfig::TwoZone { scanned, constant_target, variant, targets, .. } => {
                let (k, _) = zone(c, scanned)?;
                let t_p = beam::calibrate_pulse_duration(&beam, &c.zones, beam::DEFAULT_THETA_FLOOR)?;
                let scan = two_zone_scan(&beam, &c.zones, k, constant_target.radians(), &targets.values(), *variant, &opts)?;
                artifacts.push(Artifact::text(&csv, scan.to_csv()));
                let held = 1 - k;
                let correlation = match residual_correlation(&scan, k, &scan.zones[k].ideal, held, &scan.zones[held].ideal) {
                    Ok(r) => json!({ "pearson_r": r }),
                    Err(e) => json!({ "pearson_r": null, "error": e.to_string() }),
                };
                let rotations: Vec<f64> = c.zones.iter().map(|z| beam::base_rotation(&beam, z, t_p)).collect();
                json!({
                    "pulse_s": t_p,
                    "base_rotations": rotations,
                    "constant_target": constant_target.radians(),
                    "variant": variant,
                    "fits": fits(&scan, &[k], FringeFamily::TargetScan),
                    "held_zone_mean": scan.zones[held].population.iter().sum::<f64>() / scan.x.len() as f64,
                    "residual_correlation": correlation,
                    "schedule": schedule(c, variant.length()),
                })
            }
        };
        let mut entry = entry;
        entry["id"] = json!(run.id());
        entry["kind"] = json!(run.kind());
        entry["seed"] = json!(opts.seed);
        entry["csv"] = json!(csv);
        runs.push(entry);
    }
    let report = json!({ "name": c.name, "shots": c.shots, "seed": c.seed, "runs": runs });
    artifacts.push(Artifact::json("report.json", &report));
    Ok(Outcome { artifacts, warnings: Vec::new() })
}

fn quantize(m: &ModelConfig) -> Result<Outcome> {
    let beam = m.beam()?;
    let awg = m.awg()?;
    let lambda = beam.wavelength_m;
    let report = json!({
        "wavelength_m": lambda,
        "dac_bits": awg.dac_bits,
        "configured_mode": awg.quantization_mode,
        "calibrated": beam::quantization_report(&awg.with_mode(QuantizationMode::Calibrated), lambda),
        "physics": beam::quantization_report(&awg.with_mode(QuantizationMode::Physics), lambda),
    });
    let mut warnings = Vec::new();
    if report["physics"]["inconsistent_with_reference"] == json!(true) {
        warnings.push("physics-mode resolution is inconsistent with the 12-bit reference estimate".to_string());
    }
    Ok(Outcome { artifacts: vec![Artifact::json("quantize.json", &report)], warnings })
}

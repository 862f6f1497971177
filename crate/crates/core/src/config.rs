//! JSON configuration documents for the physical model and for simulated experiments.
//!
//! Angles may be given as numbers (radians) or as strings such as `"0.7pi"`, `"pi"`,
//! `"-1.5π"`. Unknown keys are rejected, and every offending key is listed in the error.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::beam::{BeamModel, QuantizationMode, TrapAwgModel, Zone};
use crate::experiment::SpamModel;
use crate::synthesis::Variant;
use crate::{Error, Result};

/// Radians, parsed from a number or a `"<float>pi"` literal.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(pub f64);

impl Angle {
    pub fn radians(self) -> f64 {
        self.0
    }
}

/// Parse `"1.25"`, `"0.7pi"`, `"pi"`, `"-pi"`, `"2π"`, `"0.5*pi"`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase().replace('π', "pi");
    let bad = || Error::Domain(format!("cannot parse angle '{s}'"));
    let value = if let Some(head) = t.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let k = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h.parse::<f64>().map_err(|_| bad())?,
        };
        k * std::f64::consts::PI
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

impl FromStr for Angle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_angle(s).map(Angle)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::Number(n) => n.as_f64().map(Angle).ok_or_else(|| serde::de::Error::custom("angle out of range")),
            Value::String(s) => parse_angle(&s).map(Angle).map_err(serde::de::Error::custom),
            other => Err(serde::de::Error::custom(format!("expected an angle, got {other}"))),
        }
    }
}

/// Beam and trap/AWG parameters, flat. Missing keys take the documented defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub wavelength_m: f64,
    pub waist_m: f64,
    pub omega0_rad_s: f64,
    pub waist_position_m: f64,
    pub vmax_v: f64,
    pub dac_bits: u32,
    pub field_per_volt: f64,
    pub ion_mass_u: f64,
    pub omega_z_rad_s: f64,
    pub quantization_mode: QuantizationMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub displacement_per_volt_override: Option<f64>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let b = BeamModel::default();
        let t = TrapAwgModel::default();
        Self {
            wavelength_m: b.wavelength_m,
            waist_m: b.waist_m,
            omega0_rad_s: b.omega0_rad_s,
            waist_position_m: b.waist_position_m,
            vmax_v: t.vmax_v,
            dac_bits: t.dac_bits,
            field_per_volt: t.field_per_volt,
            ion_mass_u: t.ion_mass_u,
            omega_z_rad_s: t.omega_z_rad_s,
            quantization_mode: t.quantization_mode,
            displacement_per_volt_override: t.displacement_per_volt_override,
        }
    }
}

const MODEL_KEYS: &[&str] = &[
    "wavelength_m",
    "waist_m",
    "omega0_rad_s",
    "waist_position_m",
    "vmax_v",
    "dac_bits",
    "field_per_volt",
    "ion_mass_u",
    "omega_z_rad_s",
    "quantization_mode",
    "displacement_per_volt_override",
];

impl ModelConfig {
    pub fn beam(&self) -> Result<BeamModel> {
        BeamModel::new(self.wavelength_m, self.waist_m, self.omega0_rad_s, self.waist_position_m)
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn awg(&self) -> Result<TrapAwgModel> {
        let m = TrapAwgModel {
            vmax_v: self.vmax_v,
            dac_bits: self.dac_bits,
            field_per_volt: self.field_per_volt,
            ion_mass_u: self.ion_mass_u,
            omega_z_rad_s: self.omega_z_rad_s,
            displacement_per_volt_override: self.displacement_per_volt_override,
            quantization_mode: self.quantization_mode,
        };
        m.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(m)
    }
}

/// `points` evenly spaced values from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub start: Angle,
    pub stop: Angle,
    pub points: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let (a, b) = (self.start.0, self.stop.0);
        match self.points {
            0 => Vec::new(),
            1 => vec![a],
            n => (0..n).map(|i| a + (b - a) * (i as f64 / (n - 1) as f64)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingConfig {
    pub pulse_s: f64,
    pub move_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RunConfig {
    Ramsey {
        id: String,
        zone: String,
        delta_phi: Sweep,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pulse_s: Option<f64>,
    },
    Composite {
        id: String,
        zone: String,
        theta0: Angle,
        variant: Variant,
        targets: Sweep,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pulse_s: Option<f64>,
    },
    TwoZone {
        id: String,
        scanned: String,
        constant_target: Angle,
        variant: Variant,
        targets: Sweep,
    },
}

impl RunConfig {
    pub fn id(&self) -> &str {
        match self {
            RunConfig::Ramsey { id, .. } | RunConfig::Composite { id, .. } | RunConfig::TwoZone { id, .. } => id,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RunConfig::Ramsey { .. } => "ramsey",
            RunConfig::Composite { .. } => "composite",
            RunConfig::TwoZone { .. } => "two_zone",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub model: ModelConfig,
    /// Absent means ideal preparation and readout.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spam: Option<SpamModel>,
    #[serde(default)]
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub quantize_phases: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<TimingConfig>,
    pub zones: Vec<Zone>,
    pub runs: Vec<RunConfig>,
}

const EXPERIMENT_KEYS: &[&str] = &["name", "model", "spam", "shots", "seed", "quantize_phases", "timing", "zones", "runs"];
const SPAM_KEYS: &[&str] = &["prep_fidelity", "readout_fidelity"];
const TIMING_KEYS: &[&str] = &["pulse_s", "move_s"];
const ZONE_KEYS: &[&str] = &["label", "z_m", "displacement_m", "rabi_rad_s"];
const SWEEP_KEYS: &[&str] = &["start", "stop", "points"];

fn run_keys(kind: &str) -> Option<&'static [&'static str]> {
    match kind {
        "ramsey" => Some(&["kind", "id", "zone", "delta_phi", "pulse_s"]),
        "composite" => Some(&["kind", "id", "zone", "theta0", "variant", "targets", "pulse_s"]),
        "two_zone" => Some(&["kind", "id", "scanned", "constant_target", "variant", "targets"]),
        _ => None,
    }
}

fn collect_unknown(v: &Value, known: &[&str], path: &str, out: &mut Vec<String>) {
    if let Value::Object(map) = v {
        for k in map.keys() {
            if !known.contains(&k.as_str()) {
                out.push(if path.is_empty() { k.clone() } else { format!("{path}.{k}") });
            }
        }
    }
}

/// Every key of a model document not in the schema, as dotted paths.
pub fn unknown_model_keys(v: &Value) -> Vec<String> {
    let mut out = Vec::new();
    collect_unknown(v, MODEL_KEYS, "", &mut out);
    out
}

/// Every key of an experiment document not in the schema, as dotted paths.
pub fn unknown_experiment_keys(v: &Value) -> Vec<String> {
    let mut out = Vec::new();
    collect_unknown(v, EXPERIMENT_KEYS, "", &mut out);
    let Value::Object(top) = v else { return out };
    if let Some(m) = top.get("model") {
        collect_unknown(m, MODEL_KEYS, "model", &mut out);
    }
    if let Some(s) = top.get("spam") {
        collect_unknown(s, SPAM_KEYS, "spam", &mut out);
    }
    if let Some(t) = top.get("timing") {
        collect_unknown(t, TIMING_KEYS, "timing", &mut out);
    }
    if let Some(Value::Array(zones)) = top.get("zones") {
        for (i, z) in zones.iter().enumerate() {
            collect_unknown(z, ZONE_KEYS, &format!("zones[{i}]"), &mut out);
        }
    }
    if let Some(Value::Array(runs)) = top.get("runs") {
        for (i, r) in runs.iter().enumerate() {
            let path = format!("runs[{i}]");
            if let Some(keys) = r.get("kind").and_then(Value::as_str).and_then(run_keys) {
                collect_unknown(r, keys, &path, &mut out);
                for sweep in ["delta_phi", "targets"] {
                    if let Some(s) = r.get(sweep) {
                        collect_unknown(s, SWEEP_KEYS, &format!("{path}.{sweep}"), &mut out);
                    }
                }
            }
        }
    }
    out
}

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))
}

fn reject_unknown(keys: Vec<String>) -> Result<()> {
    if keys.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(format!("unknown keys: {}", keys.join(", "))))
    }
}

pub fn parse_model(text: &str) -> Result<ModelConfig> {
    let v = parse_value(text)?;
    reject_unknown(unknown_model_keys(&v))?;
    let m: ModelConfig = serde_json::from_value(v).map_err(|e| Error::Config(e.to_string()))?;
    m.beam()?;
    m.awg()?;
    Ok(m)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let v = parse_value(text)?;
        reject_unknown(unknown_experiment_keys(&v))?;
        let c: ExperimentConfig = serde_json::from_value(v).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.beam()?;
        self.model.awg()?;
        if let Some(s) = &self.spam {
            s.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.zones.is_empty() {
            return Err(Error::Config("at least one zone is required".into()));
        }
        for (i, z) in self.zones.iter().enumerate() {
            if self.zones[..i].iter().any(|o| o.label == z.label) {
                return Err(Error::Config(format!("duplicate zone label '{}'", z.label)));
            }
        }
        let zone_exists = |l: &str| self.zones.iter().any(|z| z.label == l);
        for (i, r) in self.runs.iter().enumerate() {
            if self.runs[..i].iter().any(|o| o.id() == r.id()) {
                return Err(Error::Config(format!("duplicate run id '{}'", r.id())));
            }
            let (label, sweep) = match r {
                RunConfig::Ramsey { zone, delta_phi, .. } => (zone, delta_phi),
                RunConfig::Composite { zone, targets, .. } => (zone, targets),
                RunConfig::TwoZone { scanned, targets, .. } => (scanned, targets),
            };
            if !zone_exists(label) {
                return Err(Error::Config(format!("run '{}' names unknown zone '{label}'", r.id())));
            }
            if sweep.points == 0 {
                return Err(Error::Config(format!("run '{}' has an empty sweep", r.id())));
            }
            if matches!(r, RunConfig::TwoZone { .. }) && self.zones.len() != 2 {
                return Err(Error::Config(format!("run '{}' needs exactly two zones", r.id())));
            }
        }
        Ok(())
    }

    pub fn spam_model(&self) -> SpamModel {
        self.spam.unwrap_or(SpamModel::IDEAL)
    }
}

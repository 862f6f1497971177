//! Simulated scans: Ramsey displacement scans, single-zone composite target scans and
//! two-zone parallel gates, with optional SPAM error, shot noise and phase quantization.
//!
//! Noise for point `j` of zone `k` comes from a ChaCha8 stream selected by `(k, j)` under
//! the scan seed, so results do not depend on evaluation order or thread count.

mod fit;
mod scans;

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::beam::{self, TrapAwgModel};
use crate::format::sig9;
use crate::su2::{self, PhaseSequence};
use crate::{Error, Result};

pub use fit::{fit_contrast, pearson, residual_correlation, ContrastFit, FringeFamily};
pub use scans::{composite_scan, ramsey_scan, two_zone_scan, ScanOptions};

/// State preparation and readout fidelities.
///
/// Each is a depolarizing factor: with probability `1 − f` the step yields a fair coin, so
/// `p ↦ f_read (f_prep p + (1 − f_prep)/2) + (1 − f_read)/2` and fringe contrast scales by
/// `f_prep · f_read`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpamModel {
    pub prep_fidelity: f64,
    pub readout_fidelity: f64,
}

impl Default for SpamModel {
    fn default() -> Self {
        Self { prep_fidelity: 0.995, readout_fidelity: 0.999 }
    }
}

impl SpamModel {
    pub const IDEAL: SpamModel = SpamModel { prep_fidelity: 1.0, readout_fidelity: 1.0 };

    pub fn new(prep_fidelity: f64, readout_fidelity: f64) -> Result<Self> {
        let m = Self { prep_fidelity, readout_fidelity };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, f) in [("prep", self.prep_fidelity), ("readout", self.readout_fidelity)] {
            if !(0.5..=1.0).contains(&f) {
                return Err(Error::Domain(format!("{name} fidelity {f} outside [0.5, 1]")));
            }
        }
        Ok(())
    }

    pub fn is_ideal(&self) -> bool {
        self.prep_fidelity == 1.0 && self.readout_fidelity == 1.0
    }

    /// Observed `|1⟩` probability for ideal population `p`.
    pub fn apply(&self, p: f64) -> f64 {
        let prepared = self.prep_fidelity * p + 0.5 * (1.0 - self.prep_fidelity);
        (self.readout_fidelity * prepared + 0.5 * (1.0 - self.readout_fidelity)).clamp(0.0, 1.0)
    }

    /// Factor applied to fringe contrast.
    pub fn contrast(&self) -> f64 {
        self.prep_fidelity * self.readout_fidelity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Pulse,
    Move,
}

/// Pulse/move schedule of a composite gate. Moves are instantaneous phase updates in the
/// simulation; durations are reported only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingSequence {
    pub pulse_s: f64,
    pub move_s: f64,
    pub steps: Vec<Step>,
}

impl TimingSequence {
    /// `pulses` pulses with a move between consecutive ones.
    pub fn composite(pulses: usize, pulse_s: f64, move_s: f64) -> Self {
        let steps = (0..pulses)
            .flat_map(|i| if i == 0 { vec![Step::Pulse] } else { vec![Step::Move, Step::Pulse] })
            .collect();
        Self { pulse_s, move_s, steps }
    }

    pub fn total(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| match s {
                Step::Pulse => self.pulse_s,
                Step::Move => self.move_s,
            })
            .sum()
    }
}

/// Realises phases as DAC-quantized ion displacements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseQuantizer {
    pub model: TrapAwgModel,
    pub wavelength_m: f64,
}

impl PhaseQuantizer {
    pub fn quantize_phase(&self, phi: f64) -> Result<f64> {
        let dz = beam::phase_to_displacement(self.wavelength_m, su2::reduce_phase(phi));
        let q = beam::quantize_displacement(&self.model, self.wavelength_m, dz)?;
        Ok(beam::displacement_to_phase(self.wavelength_m, q.displacement_m))
    }

    pub fn quantize(&self, s: &PhaseSequence) -> Result<PhaseSequence> {
        let phases = s.phases().iter().map(|&p| self.quantize_phase(p)).collect::<Result<Vec<_>>>()?;
        PhaseSequence::new(phases)
    }

    /// Largest phase error of one quantized pulse, `π Δz_LSB / λ`.
    pub fn max_phase_error(&self) -> f64 {
        std::f64::consts::PI * self.model.displacement_per_lsb(self.wavelength_m) / self.wavelength_m
    }
}

/// Populations of one zone across a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZoneSeries {
    pub label: String,
    /// Oracle `|1⟩` population before SPAM and shot noise.
    pub ideal: Vec<f64>,
    /// Observed population: after SPAM, then shot-noise sampled when shots > 0.
    pub population: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub x: Vec<f64>,
    pub zones: Vec<ZoneSeries>,
    pub shots: u64,
    pub seed: u64,
}

impl ScanResult {
    pub fn zone(&self, label: &str) -> Option<&ZoneSeries> {
        self.zones.iter().find(|z| z.label == label)
    }

    /// The same scan observed under different noise: SPAM and shot sampling are redrawn
    /// from `ideal`, giving exactly what a fresh scan with these options would return.
    pub fn resample(&self, spam: &SpamModel, shots: u64, seed: u64) -> Result<ScanResult> {
        let zones = self
            .zones
            .iter()
            .enumerate()
            .map(|(k, z)| {
                let population = z
                    .ideal
                    .iter()
                    .enumerate()
                    .map(|(j, &p)| observe(p, spam, shots, seed, k, j))
                    .collect::<Result<Vec<_>>>()?;
                Ok(ZoneSeries { label: z.label.clone(), ideal: z.ideal.clone(), population })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ScanResult { x: self.x.clone(), zones, shots, seed })
    }

    /// CSV with header `x,zone,label,population,shots,seed`; zone is the index in `zones`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,zone,label,population,shots,seed\n");
        for (k, z) in self.zones.iter().enumerate() {
            for (x, p) in self.x.iter().zip(&z.population) {
                let _ = writeln!(out, "{},{},{},{},{},{}", sig9(*x), k, z.label, sig9(*p), self.shots, self.seed);
            }
        }
        out
    }
}

/// Independent stream for point `point` of zone `zone`.
pub(crate) fn point_rng(seed: u64, zone: usize, point: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((zone as u64) << 32) | point as u64);
    rng
}

/// SPAM then (for `shots > 0`) a binomial draw.
pub(crate) fn observe(p: f64, spam: &SpamModel, shots: u64, seed: u64, zone: usize, point: usize) -> Result<f64> {
    let q = spam.apply(p);
    if shots == 0 {
        return Ok(q);
    }
    let dist = Binomial::new(shots, q).map_err(|e| Error::Internal(format!("binomial({shots}, {q}): {e}")))?;
    Ok(dist.sample(&mut point_rng(seed, zone, point)) as f64 / shots as f64)
}

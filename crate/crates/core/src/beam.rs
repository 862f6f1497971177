//! Gaussian beam along the trap axis, zone base rotations, and DAC-quantized displacements.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::region::FULL_RANGE_WINDOW;
use crate::{Error, Result};

pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// ⁸⁸Sr⁺ in atomic mass units.
pub const STRONTIUM_88_MASS_U: f64 = 87.905;

/// Displacement steps per wavelength in calibrated quantization mode.
pub const CALIBRATED_STEPS_PER_WAVELENGTH: f64 = 4096.0;
/// Resolution quoted for the AWG; a physics-mode estimate further than half a bit away is flagged.
pub const REFERENCE_PHASE_BITS: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamModel {
    pub wavelength_m: f64,
    pub waist_m: f64,
    /// Rabi frequency on axis at the waist.
    pub omega0_rad_s: f64,
    pub waist_position_m: f64,
}

impl Default for BeamModel {
    fn default() -> Self {
        Self { wavelength_m: 674e-9, waist_m: 25e-6, omega0_rad_s: TAU * 166e3, waist_position_m: 0.0 }
    }
}

impl BeamModel {
    pub fn new(wavelength_m: f64, waist_m: f64, omega0_rad_s: f64, waist_position_m: f64) -> Result<Self> {
        let b = Self { wavelength_m, waist_m, omega0_rad_s, waist_position_m };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !(positive(self.wavelength_m) && positive(self.waist_m) && positive(self.omega0_rad_s)) {
            return Err(Error::Domain(format!("beam needs positive wavelength, waist and Rabi frequency: {self:?}")));
        }
        if !self.waist_position_m.is_finite() {
            return Err(Error::Domain("beam waist position must be finite".into()));
        }
        Ok(())
    }
}

/// `z_R = π w₀² / λ`.
pub fn rayleigh_range(beam: &BeamModel) -> f64 {
    PI * beam.waist_m * beam.waist_m / beam.wavelength_m
}

/// On-axis Rabi frequency `Ω₀ / √(1 + ((z − z_w)/z_R)²)` (Ω tracks the field amplitude).
pub fn rabi_at(beam: &BeamModel, z: f64) -> f64 {
    let u = (z - beam.waist_position_m) / rayleigh_range(beam);
    beam.omega0_rad_s / (1.0 + u * u).sqrt()
}

/// Axial length over which the base rotation stays within `window`, for a beam whose
/// waist carries the upper end: `2 z_R √((θ_max/θ_min)² − 1)`.
pub fn full_range_span(beam: &BeamModel, window: (f64, f64)) -> f64 {
    let r = window.1 / window.0;
    2.0 * rayleigh_range(beam) * (r * r - 1.0).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Zone {
    pub label: String,
    /// Axial position.
    pub z_m: f64,
    /// Current displacement from `z_m`.
    #[serde(default)]
    pub displacement_m: f64,
    /// Measured Rabi frequency; replaces the beam model at this zone when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rabi_rad_s: Option<f64>,
}

impl Zone {
    pub fn new(label: impl Into<String>, z_m: f64) -> Self {
        Self { label: label.into(), z_m, displacement_m: 0.0, rabi_rad_s: None }
    }

    pub fn with_rabi(mut self, rabi_rad_s: f64) -> Self {
        self.rabi_rad_s = Some(rabi_rad_s);
        self
    }

    /// Move the ion by `dz`; at most one wavelength from the zone centre.
    pub fn displace(&mut self, dz: f64, wavelength_m: f64) -> Result<()> {
        if !(dz.is_finite() && dz.abs() <= wavelength_m) {
            return Err(Error::Range { value: dz, limit: wavelength_m });
        }
        self.displacement_m = dz;
        Ok(())
    }

    pub fn rabi(&self, beam: &BeamModel) -> f64 {
        self.rabi_rad_s.unwrap_or_else(|| rabi_at(beam, self.z_m + self.displacement_m))
    }
}

/// `θ_z = Ω(z) t_p` for a constant-amplitude pulse.
pub fn base_rotation(beam: &BeamModel, zone: &Zone, t_p: f64) -> f64 {
    zone.rabi(beam) * t_p
}

/// Pulse duration putting the weakest zone at `theta_floor`.
///
/// Fails when any zone would then exceed the upper end of [`FULL_RANGE_WINDOW`].
pub fn calibrate_pulse_duration(beam: &BeamModel, zones: &[Zone], theta_floor: f64) -> Result<f64> {
    if zones.is_empty() {
        return Err(Error::Domain("no zones to calibrate".into()));
    }
    let rabis: Vec<f64> = zones.iter().map(|z| z.rabi(beam)).collect();
    if let Some(bad) = rabis.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::Calibration(format!("zone Rabi frequency {bad} is not positive")));
    }
    let min = rabis.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = rabis.iter().cloned().fold(0.0, f64::max);
    let limit = FULL_RANGE_WINDOW.1 / theta_floor;
    if max / min > limit {
        return Err(Error::Uncoverable { ratio: max / min, limit });
    }
    Ok(theta_floor / min)
}

/// Default floor for [`calibrate_pulse_duration`].
pub const DEFAULT_THETA_FLOOR: f64 = FRAC_PI_2;

/// `φ = 2π Δz / λ`.
pub fn displacement_to_phase(wavelength_m: f64, dz: f64) -> f64 {
    TAU * dz / wavelength_m
}

/// `Δz = λ φ / 2π`.
pub fn phase_to_displacement(wavelength_m: f64, phi: f64) -> f64 {
    wavelength_m * phi / TAU
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QuantizationMode {
    /// One LSB moves the ion `λ/4096`.
    #[default]
    Calibrated,
    /// LSB displacement from the electrode field and trap frequency.
    Physics,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapAwgModel {
    pub vmax_v: f64,
    pub dac_bits: u32,
    /// Field at the ion per electrode volt, (V/m)/V.
    pub field_per_volt: f64,
    pub ion_mass_u: f64,
    pub omega_z_rad_s: f64,
    pub displacement_per_volt_override: Option<f64>,
    pub quantization_mode: QuantizationMode,
}

impl Default for TrapAwgModel {
    fn default() -> Self {
        Self {
            vmax_v: 10.0,
            dac_bits: 20,
            field_per_volt: 250.0,
            ion_mass_u: STRONTIUM_88_MASS_U,
            omega_z_rad_s: TAU * 1.25e6,
            displacement_per_volt_override: None,
            quantization_mode: QuantizationMode::Calibrated,
        }
    }
}

impl TrapAwgModel {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !(positive(self.vmax_v) && positive(self.field_per_volt) && positive(self.ion_mass_u) && positive(self.omega_z_rad_s)) {
            return Err(Error::Domain(format!("AWG model needs positive parameters: {self:?}")));
        }
        if !(1..=52).contains(&self.dac_bits) {
            return Err(Error::Domain(format!("dac_bits {} outside 1..=52", self.dac_bits)));
        }
        if let Some(o) = self.displacement_per_volt_override {
            if !positive(o) {
                return Err(Error::Domain(format!("displacement_per_volt_override {o} must be positive")));
            }
        }
        Ok(())
    }

    /// `2 V_max / 2^bits`.
    pub fn lsb_voltage(&self) -> f64 {
        2.0 * self.vmax_v / 2f64.powi(self.dac_bits as i32)
    }

    /// `q E_v / (m ω_z²)` unless overridden.
    pub fn physics_displacement_per_volt(&self) -> f64 {
        self.displacement_per_volt_override.unwrap_or_else(|| {
            ELEMENTARY_CHARGE * self.field_per_volt / (self.ion_mass_u * ATOMIC_MASS_UNIT * self.omega_z_rad_s.powi(2))
        })
    }

    /// Ion displacement per DAC step in the configured mode.
    pub fn displacement_per_lsb(&self, wavelength_m: f64) -> f64 {
        match self.quantization_mode {
            QuantizationMode::Calibrated => wavelength_m / CALIBRATED_STEPS_PER_WAVELENGTH,
            QuantizationMode::Physics => self.physics_displacement_per_volt() * self.lsb_voltage(),
        }
    }

    pub fn displacement_per_volt(&self, wavelength_m: f64) -> f64 {
        self.displacement_per_lsb(wavelength_m) / self.lsb_voltage()
    }

    /// Largest reachable displacement, `(2^(bits−1) − 1)` steps from mid-scale.
    pub fn full_scale_displacement(&self, wavelength_m: f64) -> f64 {
        (2f64.powi(self.dac_bits as i32 - 1) - 1.0) * self.displacement_per_lsb(wavelength_m)
    }

    pub fn with_mode(mut self, mode: QuantizationMode) -> Self {
        self.quantization_mode = mode;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizedDisplacement {
    pub displacement_m: f64,
    /// Unsigned DAC code; mid-scale is `2^(bits−1)`.
    pub code: u64,
    /// Steps from mid-scale.
    pub offset: i64,
}

/// Round `dz` to the nearest DAC step.
pub fn quantize_displacement(model: &TrapAwgModel, wavelength_m: f64, dz: f64) -> Result<QuantizedDisplacement> {
    let step = model.displacement_per_lsb(wavelength_m);
    let limit = model.full_scale_displacement(wavelength_m);
    if !(dz.is_finite() && dz.abs() <= limit) {
        return Err(Error::Range { value: dz, limit });
    }
    let offset = (dz / step).round() as i64;
    let mid = 1u64 << (model.dac_bits - 1);
    Ok(QuantizedDisplacement {
        displacement_m: offset as f64 * step,
        code: (mid as i64 + offset) as u64,
        offset,
    })
}

/// `log₂(λ / Δz_LSB)`.
pub fn effective_phase_bits(model: &TrapAwgModel, wavelength_m: f64) -> f64 {
    (wavelength_m / model.displacement_per_lsb(wavelength_m)).log2()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationReport {
    pub mode: QuantizationMode,
    pub lsb_voltage_v: f64,
    pub displacement_per_volt_m: f64,
    pub displacement_per_lsb_m: f64,
    pub phase_step_rad: f64,
    pub effective_bits: f64,
    /// More than half a bit away from the 12-bit reference.
    pub inconsistent_with_reference: bool,
}

pub fn quantization_report(model: &TrapAwgModel, wavelength_m: f64) -> QuantizationReport {
    let dz = model.displacement_per_lsb(wavelength_m);
    let bits = effective_phase_bits(model, wavelength_m);
    QuantizationReport {
        mode: model.quantization_mode,
        lsb_voltage_v: model.lsb_voltage(),
        displacement_per_volt_m: model.displacement_per_volt(wavelength_m),
        displacement_per_lsb_m: dz,
        phase_step_rad: displacement_to_phase(wavelength_m, dz),
        effective_bits: bits,
        inconsistent_with_reference: (bits - REFERENCE_PHASE_BITS).abs() > 0.5,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rayleigh_range_examples() {
        let b = BeamModel::default();
        assert!((rayleigh_range(&b) - 2.913e-3).abs() < 1e-6);
        let wide = BeamModel { waist_m: b.waist_m * 2f64.sqrt(), ..b };
        assert!((rayleigh_range(&wide) / rayleigh_range(&b) - 2.0).abs() < 1e-12);
        let red = BeamModel { wavelength_m: 2.0 * b.wavelength_m, ..b };
        assert!((rayleigh_range(&red) / rayleigh_range(&b) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rabi_profile() {
        let b = BeamModel { waist_position_m: 1e-4, ..BeamModel::default() };
        let zr = rayleigh_range(&b);
        assert_eq!(rabi_at(&b, 1e-4), b.omega0_rad_s);
        assert!((rabi_at(&b, 1e-4 + zr) - b.omega0_rad_s / 2f64.sqrt()).abs() < 1e-9 * b.omega0_rad_s);
        for d in [1e-4, 1e-3, 3e-3] {
            assert_eq!(rabi_at(&b, 1e-4 + d), rabi_at(&b, 1e-4 - d));
            assert!(rabi_at(&b, 1e-4 + d) > rabi_at(&b, 1e-4 + 2.0 * d));
        }
        // the point where Ω falls by 1.456
        let z = zr * (1.456f64.powi(2) - 1.0).sqrt();
        assert!((z / zr - 1.0586).abs() < 1e-3);
        assert!((rabi_at(&b, 1e-4 + z) * 1.456 - b.omega0_rad_s).abs() < 1e-9 * b.omega0_rad_s);
        assert!((full_range_span(&b, FULL_RANGE_WINDOW) / zr - 2.117).abs() < 1e-3);
    }

    #[test]
    fn base_rotation_examples() {
        let b = BeamModel::default();
        let z1 = Zone::new("Z1", 0.0).with_rabi(TAU * 166e3);
        let z2 = Zone::new("Z2", 7e-4).with_rabi(TAU * 159e3);
        assert!((base_rotation(&b, &z1, 1.5e-6) - 1.5645).abs() < 1e-4);
        assert!((base_rotation(&b, &z1, 1.5e-6) / PI - 0.498).abs() < 1e-3);
        assert!((base_rotation(&b, &z2, 1.5e-6) - 1.4986).abs() < 1e-4);
        assert_eq!(base_rotation(&b, &z1, 0.0), 0.0);
        assert!((base_rotation(&b, &z1, 3e-6) - 2.0 * base_rotation(&b, &z1, 1.5e-6)).abs() < 1e-15);
    }

    #[test]
    fn calibration() {
        let b = BeamModel::default();
        let zones = [Zone::new("Z1", 0.0).with_rabi(TAU * 166e3), Zone::new("Z2", 7e-4).with_rabi(TAU * 159e3)];
        let tp = calibrate_pulse_duration(&b, &zones, FRAC_PI_2).unwrap();
        assert!((tp - 1.5723e-6).abs() < 1e-9);
        assert!((base_rotation(&b, &zones[0], tp) / PI - 0.522).abs() < 1e-3);
        let single = calibrate_pulse_duration(&b, &zones[..1], FRAC_PI_2).unwrap();
        assert!((single - FRAC_PI_2 / (TAU * 166e3)).abs() < 1e-18);
        let wide = [Zone::new("a", 0.0).with_rabi(2.0), Zone::new("b", 0.0).with_rabi(1.0)];
        assert!(matches!(calibrate_pulse_duration(&b, &wide, FRAC_PI_2), Err(Error::Uncoverable { .. })));
    }

    #[test]
    fn displacement_phase() {
        assert_eq!(displacement_to_phase(674e-9, 0.0), 0.0);
        assert!((displacement_to_phase(674e-9, 337e-9) - PI).abs() < 1e-12);
        assert!((phase_to_displacement(674e-9, PI) - 337e-9).abs() < 1e-18);
    }

    #[test]
    fn quantization_modes() {
        let m = TrapAwgModel::default();
        let lambda = 674e-9;
        assert!((m.lsb_voltage() - 19.073_486e-6).abs() < 1e-11);
        assert_eq!(effective_phase_bits(&m, lambda), 12.0);
        let r = quantization_report(&m, lambda);
        assert!((r.phase_step_rad - 0.001_53).abs() < 1e-5);
        assert!(!r.inconsistent_with_reference);

        let p = m.with_mode(QuantizationMode::Physics);
        assert!((p.physics_displacement_per_volt() - 4.448e-6).abs() < 2e-9);
        let rp = quantization_report(&p, lambda);
        assert!(rp.inconsistent_with_reference);
        assert!((rp.effective_bits - 12.96).abs() < 0.01);

        let coarse = TrapAwgModel { dac_bits: 10, ..p };
        let ratio = coarse.displacement_per_lsb(lambda) / p.displacement_per_lsb(lambda);
        assert!((ratio - 1024.0).abs() < 1e-9);
    }

    #[test]
    fn quantize_round_trip() {
        let m = TrapAwgModel::default();
        let lambda = 674e-9;
        let q = quantize_displacement(&m, lambda, 0.0).unwrap();
        assert_eq!((q.code, q.displacement_m), (1 << 19, 0.0));
        let step = m.displacement_per_lsb(lambda);
        for dz in [1e-9, -2.3e-7, 3.37e-7] {
            let q = quantize_displacement(&m, lambda, dz).unwrap();
            assert!((q.displacement_m - dz).abs() <= 0.5 * step + 1e-24);
        }
        assert!(matches!(quantize_displacement(&m, lambda, 1.0), Err(Error::Range { .. })));
    }

    #[test]
    fn zone_displacement_budget() {
        let mut z = Zone::new("Z1", 0.0);
        assert!(z.displace(600e-9, 674e-9).is_ok());
        assert!(z.displace(700e-9, 674e-9).is_err());
    }
}

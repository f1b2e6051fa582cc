//! Physical constants, unit conversions, and intensity/flux/density transforms.
//!
//! All internal computation is SI; the `Unit` vocabulary converts the common
//! mixed-unit inputs (W/cm^2, cm^-3, eV, nm) at the API boundary so that no
//! hidden 1e4 or 1e6 factors can leak into a formula.
//!
//! Constant values are CODATA 2018, hard-coded at full published precision.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Planck constant (J·s), exact since the 2019 SI redefinition.
pub const PLANCK_H: f64 = 6.626_070_15e-34;

/// Reduced Planck constant h/(2π) (J·s).
pub const HBAR: f64 = PLANCK_H / (2.0 * std::f64::consts::PI);

/// Speed of light in vacuum (m/s), exact.
pub const LIGHT_SPEED: f64 = 299_792_458.0;

/// Elementary charge (C), exact.
pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;

/// Electron mass (kg).
pub const ELECTRON_MASS: f64 = 9.109_383_7015e-31;

/// Vacuum permittivity (F/m).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_8128e-12;

/// Bohr radius (m).
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;

/// Fine structure constant (dimensionless).
pub const FINE_STRUCTURE: f64 = 7.297_352_5693e-3;

/// One electronvolt (J), exact.
pub const EV: f64 = ELECTRON_CHARGE;

/// The constants bundle used by every formula in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub planck_h: f64,
    pub hbar: f64,
    pub light_speed_c: f64,
    pub electron_charge_e: f64,
    pub electron_mass_m: f64,
    pub vacuum_permittivity_eps0: f64,
    pub bohr_radius: f64,
    pub fine_structure_alpha: f64,
}

impl PhysicalConstants {
    /// CODATA 2018 recommended values.
    pub const fn codata2018() -> Self {
        PhysicalConstants {
            planck_h: PLANCK_H,
            hbar: HBAR,
            light_speed_c: LIGHT_SPEED,
            electron_charge_e: ELECTRON_CHARGE,
            electron_mass_m: ELECTRON_MASS,
            vacuum_permittivity_eps0: VACUUM_PERMITTIVITY,
            bohr_radius: BOHR_RADIUS,
            fine_structure_alpha: FINE_STRUCTURE,
        }
    }

    /// Checks the structural invariants of the bundle.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("planck_h", self.planck_h),
            ("hbar", self.hbar),
            ("light_speed_c", self.light_speed_c),
            ("electron_charge_e", self.electron_charge_e),
            ("electron_mass_m", self.electron_mass_m),
            ("vacuum_permittivity_eps0", self.vacuum_permittivity_eps0),
            ("bohr_radius", self.bohr_radius),
            ("fine_structure_alpha", self.fine_structure_alpha),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Validation {
                    key: name.to_string(),
                    detail: format!("must be strictly positive and finite, got {v}"),
                });
            }
        }
        let derived_hbar = self.planck_h / (2.0 * std::f64::consts::PI);
        if ((self.hbar - derived_hbar) / derived_hbar).abs() > 1e-12 {
            return Err(Error::Validation {
                key: "hbar".to_string(),
                detail: "hbar must equal planck_h / (2 pi) to relative 1e-12".to_string(),
            });
        }
        if (self.fine_structure_alpha - 7.297_352_5693e-3).abs() > 1e-6 {
            return Err(Error::Validation {
                key: "fine_structure_alpha".to_string(),
                detail: "must be within 1e-6 of 7.2973525693e-3".to_string(),
            });
        }
        Ok(())
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::codata2018()
    }
}

/// Dimension class of a unit tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Length,
    Time,
    Energy,
    Intensity,
    NumberDensity,
    Flux,
    Frequency,
    AngularFrequency,
    Dimensionless,
}

/// Fixed vocabulary of unit tags accepted in configs, CSV headers, and CLI
/// quantity suffixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "m")]
    Meter,
    #[serde(rename = "nm")]
    Nanometer,
    #[serde(rename = "um")]
    Micrometer,
    #[serde(rename = "s")]
    Second,
    #[serde(rename = "J")]
    Joule,
    #[serde(rename = "eV")]
    Electronvolt,
    #[serde(rename = "W_per_m2")]
    WattPerM2,
    #[serde(rename = "W_per_cm2")]
    WattPerCm2,
    #[serde(rename = "per_m3")]
    PerM3,
    #[serde(rename = "per_cm3")]
    PerCm3,
}

impl Unit {
    pub const ALL: [Unit; 10] = [
        Unit::Meter,
        Unit::Nanometer,
        Unit::Micrometer,
        Unit::Second,
        Unit::Joule,
        Unit::Electronvolt,
        Unit::WattPerM2,
        Unit::WattPerCm2,
        Unit::PerM3,
        Unit::PerCm3,
    ];

    /// The tag spelled exactly as it appears in configs and headers.
    pub fn tag(&self) -> &'static str {
        match self {
            Unit::Meter => "m",
            Unit::Nanometer => "nm",
            Unit::Micrometer => "um",
            Unit::Second => "s",
            Unit::Joule => "J",
            Unit::Electronvolt => "eV",
            Unit::WattPerM2 => "W_per_m2",
            Unit::WattPerCm2 => "W_per_cm2",
            Unit::PerM3 => "per_m3",
            Unit::PerCm3 => "per_cm3",
        }
    }

    pub fn parse_tag(tag: &str) -> Option<Unit> {
        Unit::ALL.iter().copied().find(|u| u.tag() == tag)
    }

    pub fn dimension(&self) -> Dimension {
        match self {
            Unit::Meter | Unit::Nanometer | Unit::Micrometer => Dimension::Length,
            Unit::Second => Dimension::Time,
            Unit::Joule | Unit::Electronvolt => Dimension::Energy,
            Unit::WattPerM2 | Unit::WattPerCm2 => Dimension::Intensity,
            Unit::PerM3 | Unit::PerCm3 => Dimension::NumberDensity,
        }
    }

    /// Exact ratio converting one of this unit into the SI unit of its
    /// dimension.
    pub fn si_factor(&self) -> f64 {
        match self {
            Unit::Meter | Unit::Second | Unit::Joule | Unit::WattPerM2 | Unit::PerM3 => 1.0,
            Unit::Nanometer => 1e-9,
            Unit::Micrometer => 1e-6,
            Unit::Electronvolt => EV,
            Unit::WattPerCm2 => 1e4,
            Unit::PerCm3 => 1e6,
        }
    }
}

/// A number tagged with one of the vocabulary units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: Unit,
}

impl Quantity {
    pub fn new(value: f64, unit: Unit) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::Domain(format!(
                "quantity value must be finite, got {value}"
            )));
        }
        Ok(Quantity { value, unit })
    }

    /// Value expressed in the SI unit of this quantity's dimension.
    pub fn to_si(&self) -> f64 {
        self.value * self.unit.si_factor()
    }

    /// Converts to another unit of the same dimension.
    pub fn convert_to(&self, target: Unit) -> Result<Quantity> {
        if self.unit.dimension() != target.dimension() {
            return Err(Error::Domain(format!(
                "cannot convert {} to {}: incompatible dimensions",
                self.unit.tag(),
                target.tag()
            )));
        }
        let value = self.value * self.unit.si_factor() / target.si_factor();
        if !value.is_finite() {
            return Err(Error::Domain(format!(
                "conversion of {} {} to {} overflowed",
                self.value,
                self.unit.tag(),
                target.tag()
            )));
        }
        Ok(Quantity {
            value,
            unit: target,
        })
    }
}

/// Photon energy h·c/λ (J) for light of the given vacuum wavelength (m).
pub fn photon_energy(light_wavelength: f64) -> Result<f64> {
    if !(light_wavelength > 0.0) || !light_wavelength.is_finite() {
        return Err(Error::Domain(format!(
            "wavelength must be positive and finite, got {light_wavelength}"
        )));
    }
    Ok(PLANCK_H * LIGHT_SPEED / light_wavelength)
}

/// Photon frequency ν = c/λ (Hz).
pub fn photon_frequency(light_wavelength: f64) -> Result<f64> {
    if !(light_wavelength > 0.0) || !light_wavelength.is_finite() {
        return Err(Error::Domain(format!(
            "wavelength must be positive and finite, got {light_wavelength}"
        )));
    }
    Ok(LIGHT_SPEED / light_wavelength)
}

/// Photon angular frequency ω = 2πν (rad/s).
pub fn photon_angular_frequency(light_wavelength: f64) -> Result<f64> {
    Ok(2.0 * std::f64::consts::PI * photon_frequency(light_wavelength)?)
}

/// Photon flux Φ = I/hν (photons m^-2 s^-1) carried by a beam of the given
/// intensity (W/m^2).
pub fn intensity_to_flux(intensity: f64, photon_energy: f64) -> Result<f64> {
    if !(photon_energy > 0.0) {
        return Err(Error::Domain(format!(
            "photon energy must be positive, got {photon_energy}"
        )));
    }
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return Err(Error::Domain(format!(
            "intensity must be nonnegative and finite, got {intensity}"
        )));
    }
    Ok(intensity / photon_energy)
}

/// Photon number density n = Φ/c (m^-3) in a beam of the given flux.
pub fn flux_to_photon_density(flux: f64) -> Result<f64> {
    if !(flux >= 0.0) || !flux.is_finite() {
        return Err(Error::Domain(format!(
            "flux must be nonnegative and finite, got {flux}"
        )));
    }
    Ok(flux / LIGHT_SPEED)
}

/// Mean inter-photon distance n^(-1/3) (m) at number density n (m^-3).
pub fn mean_photon_spacing(number_density: f64) -> Result<f64> {
    if !(number_density > 0.0) || !number_density.is_finite() {
        return Err(Error::Domain(format!(
            "number density must be positive and finite, got {number_density}"
        )));
    }
    Ok(number_density.powf(-1.0 / 3.0))
}

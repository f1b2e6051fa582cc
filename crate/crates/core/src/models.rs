//! The three photoionization rate models and metal photoemission.
//!
//! * Multiphoton: perturbative N-photon absorption with rate s_N·Φ^N, so the
//!   log-log slope of rate vs intensity equals N.
//! * Effective photon: intensity-dependent photon energy ε = hν/(1 − β_ν·f(I)).
//! * Extended-electron (anomalous) model: the electron's cloud absorbs
//!   N = σ·n^(2/3) coherent photons at once, which makes the transition
//!   probability linear in intensity.
//!
//! The two pulse treatments are a triangular ramp (first-order time-dependent
//! perturbation, probability ∝ I_p·t²) and a flat pulse (golden rule,
//! probability ∝ N²·I).

use crate::error::{Error, Result};
use crate::units::{
    photon_angular_frequency, photon_energy, BOHR_RADIUS, ELECTRON_CHARGE, ELECTRON_MASS,
    FINE_STRUCTURE, HBAR, LIGHT_SPEED, VACUUM_PERMITTIVITY,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Phase |Δ·t| below which the exact pulse integral switches to its series
/// form to avoid trigonometric cancellation.
pub const SERIES_PHASE_CUTOFF: f64 = 1e-3;

/// Minimum phase Δ·t for which the asymptotic pulse integral is accepted.
pub const ASYMPTOTIC_MIN_PHASE: f64 = 10.0;

/// Fraction of the ramp duration up to which the first-order ramp probability
/// is trusted (t ≪ t_p enforced as t ≤ t_p/10).
pub const RAMP_VALIDITY_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseShape {
    /// Intensity runs 0 → I_p over [0, t_peak] and back down over [t_peak, Δt].
    Triangular,
    /// Intensity holds I_p over the full duration.
    Rectangular,
}

/// A laser pulse: wavelength, peak intensity, duration, and shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserPulse {
    /// Vacuum wavelength (m).
    pub light_wavelength: f64,
    /// Peak intensity (W/m²).
    pub peak_intensity: f64,
    /// Full pulse duration Δt (s).
    pub duration: f64,
    pub shape: PulseShape,
}

impl LaserPulse {
    pub fn new(
        light_wavelength: f64,
        peak_intensity: f64,
        duration: f64,
        shape: PulseShape,
    ) -> Result<Self> {
        if !(light_wavelength > 0.0) || !light_wavelength.is_finite() {
            return Err(Error::Domain(format!(
                "wavelength must be positive, got {light_wavelength}"
            )));
        }
        if !(peak_intensity >= 0.0) || !peak_intensity.is_finite() {
            return Err(Error::Domain(format!(
                "peak intensity must be nonnegative, got {peak_intensity}"
            )));
        }
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::Domain(format!(
                "duration must be positive, got {duration}"
            )));
        }
        Ok(LaserPulse {
            light_wavelength,
            peak_intensity,
            duration,
            shape,
        })
    }

    /// Time of peak intensity: Δt/2 for the triangular ramp.
    pub fn t_peak(&self) -> f64 {
        self.duration / 2.0
    }

    /// Instantaneous intensity at time t from pulse start (0 outside the pulse).
    pub fn intensity_at(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.duration {
            return 0.0;
        }
        match self.shape {
            PulseShape::Rectangular => self.peak_intensity,
            PulseShape::Triangular => {
                let tp = self.t_peak();
                if t <= tp {
                    self.peak_intensity * t / tp
                } else {
                    self.peak_intensity * (self.duration - t) / tp
                }
            }
        }
    }

    pub fn photon_energy(&self) -> f64 {
        photon_energy(self.light_wavelength).expect("validated wavelength")
    }

    pub fn angular_frequency(&self) -> f64 {
        photon_angular_frequency(self.light_wavelength).expect("validated wavelength")
    }

    /// Photon flux at peak intensity (m^-2 s^-1).
    pub fn peak_flux(&self) -> f64 {
        self.peak_intensity / self.photon_energy()
    }

    /// Photon number density at peak intensity (m^-3).
    pub fn peak_photon_density(&self) -> f64 {
        self.peak_flux() / LIGHT_SPEED
    }
}

/// Gas target parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasTarget {
    /// Initial atom concentration (m^-3).
    pub atom_density_na0: f64,
    /// Ionization potential W (J).
    pub ionization_potential_w: f64,
    /// Nuclear charge number Z.
    pub nuclear_charge_z: u32,
    /// Effective atom radius (m).
    pub atom_radius_r: f64,
}

impl GasTarget {
    pub fn new(na0: f64, w: f64, z: u32, r: f64) -> Result<Self> {
        if !(na0 > 0.0) || !(w > 0.0) || !(r > 0.0) || z < 1 {
            return Err(Error::Domain(format!(
                "gas target fields must be positive (na0={na0}, W={w}, Z={z}, r={r})"
            )));
        }
        Ok(GasTarget {
            atom_density_na0: na0,
            ionization_potential_w: w,
            nuclear_charge_z: z,
            atom_radius_r: r,
        })
    }
}

/// Metal target with an intensity-dependent work function W(I) = max(W0 − slope·I, 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetalTarget {
    /// Zero-intensity work function W0 (J).
    pub work_function_w0: f64,
    /// Linear decrease of the work function with intensity (J per W/m²).
    pub work_function_slope: f64,
    /// Conduction electron density (m^-3).
    pub electron_density: f64,
    /// Correlation exponent γ > 0.
    pub correlation_gamma: f64,
}

impl MetalTarget {
    pub fn new(w0: f64, slope: f64, electron_density: f64, gamma: f64) -> Result<Self> {
        if !(w0 > 0.0) || !(slope >= 0.0) || !(electron_density > 0.0) || !(gamma > 0.0) {
            return Err(Error::Domain(format!(
                "metal target fields out of range (W0={w0}, slope={slope}, n_elec={electron_density}, gamma={gamma})"
            )));
        }
        Ok(MetalTarget {
            work_function_w0: w0,
            work_function_slope: slope,
            electron_density,
            correlation_gamma: gamma,
        })
    }

    /// Work function at intensity I, floored at zero.
    pub fn work_function(&self, intensity: f64) -> f64 {
        (self.work_function_w0 - self.work_function_slope * intensity).max(0.0)
    }
}

/// Inputs for the one-photon transition matrix element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixElementInputs {
    /// Momentum of the stripped electron (kg·m/s); must equal m·v.
    pub free_momentum_p: f64,
    /// Speed of the stripped electron (m/s).
    pub free_velocity_v: f64,
    /// Emission polar angle (rad).
    pub theta: f64,
    /// Emission azimuthal angle (rad).
    pub phi: f64,
    /// Normalizing volume V (m³).
    pub normalizing_volume: f64,
    /// Light angular frequency ω (rad/s).
    pub angular_frequency: f64,
    /// Nuclear charge number Z.
    pub nuclear_charge_z: u32,
}

impl MatrixElementInputs {
    /// Builds consistent inputs from the free-electron speed (p = m·v).
    pub fn for_free_electron(
        velocity: f64,
        theta: f64,
        phi: f64,
        normalizing_volume: f64,
        angular_frequency: f64,
        nuclear_charge_z: u32,
    ) -> Result<Self> {
        let inputs = MatrixElementInputs {
            free_momentum_p: ELECTRON_MASS * velocity,
            free_velocity_v: velocity,
            theta,
            phi,
            normalizing_volume,
            angular_frequency,
            nuclear_charge_z,
        };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.free_velocity_v.is_finite() || self.free_velocity_v >= LIGHT_SPEED {
            return Err(Error::Relativistic {
                v0: self.free_velocity_v,
            });
        }
        if self.free_velocity_v <= 0.0 {
            return Err(Error::Domain(format!(
                "free velocity must be positive, got {}",
                self.free_velocity_v
            )));
        }
        let expected_p = ELECTRON_MASS * self.free_velocity_v;
        if ((self.free_momentum_p - expected_p) / expected_p).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "inconsistent momentum: |p| = {:.6e} but m*v = {:.6e}",
                self.free_momentum_p, expected_p
            )));
        }
        if !(self.normalizing_volume > 0.0) || !(self.angular_frequency > 0.0) {
            return Err(Error::Domain(
                "normalizing volume and angular frequency must be positive".to_string(),
            ));
        }
        if self.nuclear_charge_z < 1 {
            return Err(Error::Domain("nuclear charge Z must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// Intensity response f(I) of the effective-photon model, a monotone map into
/// [0, f_max].
#[derive(Debug, Clone, Copy)]
pub enum IntensityMap {
    /// f(I) = I/(I + i_ref): bounded in [0, 1), monotone, f(0) = 0.
    Saturating { i_ref: f64 },
    /// Caller-supplied map.
    Custom(fn(f64) -> f64),
}

impl IntensityMap {
    pub fn eval(&self, intensity: f64) -> f64 {
        match self {
            IntensityMap::Saturating { i_ref } => intensity / (intensity + i_ref),
            IntensityMap::Custom(f) => f(intensity),
        }
    }
}

/// Effective-photon model ε = hν/(1 − β_ν·f(I)).
#[derive(Debug, Clone, Copy)]
pub struct EffectivePhotonModel {
    pub beta_nu: f64,
    pub intensity_map: IntensityMap,
}

impl EffectivePhotonModel {
    pub fn saturating(beta_nu: f64, i_ref: f64) -> Result<Self> {
        if !(beta_nu >= 0.0) || !beta_nu.is_finite() {
            return Err(Error::Domain(format!(
                "beta_nu must be nonnegative, got {beta_nu}"
            )));
        }
        if !(i_ref > 0.0) || !i_ref.is_finite() {
            return Err(Error::Domain(format!(
                "reference intensity must be positive, got {i_ref}"
            )));
        }
        Ok(EffectivePhotonModel {
            beta_nu,
            intensity_map: IntensityMap::Saturating { i_ref },
        })
    }
}

/// Generalized N-photon cross section, held in log space because the linear
/// value underflows f64 for order above ~10 at atomic radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedCrossSection {
    pub order_n: u32,
    /// ln of the value in m^(2N)·s^(N−1).
    pub ln_value: f64,
}

impl GeneralizedCrossSection {
    /// Linear value; may underflow to 0 for large N.
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }
}

/// Generalized cross section s_N = 2π·(8πα)^N·r^(2N)·ω^(−N+1).
pub fn generalized_cross_section(
    order_n: u32,
    atom_radius: f64,
    omega: f64,
) -> Result<GeneralizedCrossSection> {
    if order_n < 1 {
        return Err(Error::Domain("photon order N must be >= 1".to_string()));
    }
    if !(atom_radius > 0.0) || !(omega > 0.0) {
        return Err(Error::Domain(format!(
            "atom radius and omega must be positive (r={atom_radius}, omega={omega})"
        )));
    }
    let n = order_n as f64;
    let ln_value = (2.0 * PI).ln() + n * (8.0 * PI * FINE_STRUCTURE).ln()
        + 2.0 * n * atom_radius.ln()
        - (n - 1.0) * omega.ln();
    Ok(GeneralizedCrossSection { order_n, ln_value })
}

/// Multiphoton ionization rate w_N = s_N·Φ^N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiphotonRate {
    /// ln of the rate in s^-1 (−∞ at zero flux).
    pub ln_rate: f64,
    /// exp(ln_rate); 0.0 or +∞ when out of f64 range.
    pub rate: f64,
    /// True when `rate` under- or overflowed and only `ln_rate` is faithful.
    pub out_of_range: bool,
}

/// Rate of N-photon ionization at photon flux Φ (m^-2 s^-1).
pub fn multiphoton_rate(s_n: &GeneralizedCrossSection, flux: f64) -> Result<MultiphotonRate> {
    if !(flux >= 0.0) || !flux.is_finite() {
        return Err(Error::Domain(format!(
            "flux must be nonnegative and finite, got {flux}"
        )));
    }
    if flux == 0.0 {
        return Ok(MultiphotonRate {
            ln_rate: f64::NEG_INFINITY,
            rate: 0.0,
            out_of_range: false,
        });
    }
    let ln_rate = s_n.ln_value + s_n.order_n as f64 * flux.ln();
    let rate = ln_rate.exp();
    Ok(MultiphotonRate {
        ln_rate,
        rate,
        out_of_range: rate == 0.0 || rate.is_infinite(),
    })
}

/// Photoelectron energy ledger E_c = (N+S)·hν − E_i.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotoelectronEnergy {
    /// Kinetic energy of the ejected electron (J); negative below threshold.
    pub energy: f64,
    pub below_threshold: bool,
}

/// Energy of an electron ejected by N photons plus S above-threshold photons.
pub fn photoelectron_energy(
    order_n: u32,
    photon_energy: f64,
    binding_energy: f64,
    above_threshold_s: u32,
) -> Result<PhotoelectronEnergy> {
    if order_n < 1 {
        return Err(Error::Domain("photon order N must be >= 1".to_string()));
    }
    if !(photon_energy > 0.0) || !(binding_energy > 0.0) {
        return Err(Error::Domain(format!(
            "photon energy and binding energy must be positive (hv={photon_energy}, E_i={binding_energy})"
        )));
    }
    let energy = (order_n + above_threshold_s) as f64 * photon_energy - binding_energy;
    Ok(PhotoelectronEnergy {
        energy,
        below_threshold: energy < 0.0,
    })
}

/// Effective photon energy ε = hν/(1 − β_ν·f(I)); ≥ hν, equality at f(I) = 0.
pub fn effective_photon_energy(
    model: &EffectivePhotonModel,
    photon_energy: f64,
    intensity: f64,
) -> Result<f64> {
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
    let coupling = model.beta_nu * model.intensity_map.eval(intensity);
    if coupling >= 1.0 {
        return Err(Error::Pole {
            coupling,
            intensity,
        });
    }
    Ok(photon_energy / (1.0 - coupling))
}

/// Squared peak vector potential A_p² = I_p/(ε0·c²·ω²).
pub fn vector_potential_sq(peak_intensity: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!(
            "omega must be positive, got {omega}"
        )));
    }
    if !(peak_intensity >= 0.0) || !peak_intensity.is_finite() {
        return Err(Error::Domain(format!(
            "intensity must be nonnegative, got {peak_intensity}"
        )));
    }
    Ok(peak_intensity / (VACUUM_PERMITTIVITY * LIGHT_SPEED * LIGHT_SPEED * omega * omega))
}

/// Emission anisotropy sin²θ·cos²φ/(1 − (v/c)·cosθ)⁴ of the ejected electron.
pub fn angular_factor(theta: f64, phi: f64, velocity: f64) -> Result<f64> {
    if !velocity.is_finite() || velocity >= LIGHT_SPEED {
        return Err(Error::Relativistic { v0: velocity });
    }
    if velocity < 0.0 {
        return Err(Error::Domain(format!(
            "velocity must be nonnegative, got {velocity}"
        )));
    }
    let s = theta.sin();
    let c = phi.cos();
    let denom = 1.0 - velocity / LIGHT_SPEED * theta.cos();
    Ok(s * s * c * c / denom.powi(4))
}

/// Full-sphere integral of the angular factor, ∫ sin²θcos²φ/(1−βcosθ)⁴ dΩ,
/// by composite Simpson over θ (the φ integral is π exactly).
pub fn angular_factor_sphere_integral(velocity: f64) -> Result<f64> {
    if !velocity.is_finite() || velocity >= LIGHT_SPEED {
        return Err(Error::Relativistic { v0: velocity });
    }
    if velocity < 0.0 {
        return Err(Error::Domain(format!(
            "velocity must be nonnegative, got {velocity}"
        )));
    }
    let beta = velocity / LIGHT_SPEED;
    let g = |theta: f64| {
        let s = theta.sin();
        s * s * s / (1.0 - beta * theta.cos()).powi(4)
    };
    let panels = 4000;
    let h = PI / panels as f64;
    let mut sum = g(0.0) + g(PI);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * g(i as f64 * h);
    }
    Ok(PI * sum * h / 3.0)
}

/// Per-intensity transition kernel |𝓜|² of the one-photon matrix element,
/// defined so that |M|² = |𝓜|²·I_p exactly:
///
/// |𝓜|² = 16π·e²ħ²/(ε0·c²·ω²·m²·V)·(Z/a_Bohr)⁵·(ħ/|p|)⁶·angular_factor.
pub fn matrix_element_sq(inputs: &MatrixElementInputs) -> Result<f64> {
    inputs.validate()?;
    if inputs.free_momentum_p == 0.0 {
        return Err(Error::Singularity(
            "free momentum is zero; the (hbar/p)^6 factor diverges".to_string(),
        ));
    }
    let prefactor = 16.0 * PI * ELECTRON_CHARGE * ELECTRON_CHARGE * HBAR * HBAR
        / (VACUUM_PERMITTIVITY
            * LIGHT_SPEED
            * LIGHT_SPEED
            * inputs.angular_frequency
            * inputs.angular_frequency
            * ELECTRON_MASS
            * ELECTRON_MASS
            * inputs.normalizing_volume);
    let charge_factor = (inputs.nuclear_charge_z as f64 / BOHR_RADIUS).powi(5);
    let momentum_factor = (HBAR / inputs.free_momentum_p).powi(6);
    let angular = angular_factor(inputs.theta, inputs.phi, inputs.free_velocity_v)?;
    Ok(prefactor * charge_factor * momentum_factor * angular)
}

/// Closed trigonometric form of the squared ramp integral
/// |∫₀ᵗ K·τ·e^{iΔτ} dτ|² with K = N_th/t_p.
///
/// The textbook arrangement t² − (2t/Δ)sin(Δt) + (2/Δ²)(1 − cos(Δt)) loses up
/// to half its digits near Δt ~ 1e-3 to subtractive cancellation; with
/// u = Δt/2 it regroups into the sum of two nonnegative terms
/// (u − sin u·cos u)² + sin⁴u, which evaluates to machine accuracy for all
/// phases. [`pulse_integral_exact`] still switches to the series branch below
/// the cutoff.
pub fn pulse_integral_closed_form(n_th: f64, t_p: f64, delta_omega: f64, t: f64) -> f64 {
    let k = n_th / t_p;
    let u = 0.5 * delta_omega * t;
    let (su, cu) = u.sin_cos();
    let odd = u - su * cu;
    let bracket = 4.0 / (delta_omega * delta_omega) * (odd * odd + su.powi(4));
    (k / delta_omega).powi(2) * bracket
}

/// Small-phase series of the squared ramp integral:
/// K²·t⁴/4·(1 − (Δt)²/18), accurate to O((Δt)⁴) relative.
pub fn pulse_integral_series(n_th: f64, t_p: f64, delta_omega: f64, t: f64) -> f64 {
    let k = n_th / t_p;
    let phase = delta_omega * t;
    k * k * t.powi(4) / 4.0 * (1.0 - phase * phase / 18.0)
}

/// Squared ramp integral |𝓘(t)|², switching to the series branch for
/// |Δ·t| < 1e-3 to avoid cancellation at resonance.
pub fn pulse_integral_exact(n_th: f64, t_p: f64, delta_omega: f64, t: f64) -> Result<f64> {
    if !(n_th > 0.0) || !(t_p > 0.0) {
        return Err(Error::Domain(format!(
            "n_th and t_p must be positive (n_th={n_th}, t_p={t_p})"
        )));
    }
    if !(0.0..=t_p).contains(&t) {
        return Err(Error::Domain(format!(
            "t = {t:.6e} s outside the ramp interval [0, {t_p:.6e}]"
        )));
    }
    let phase = (delta_omega * t).abs();
    if phase < SERIES_PHASE_CUTOFF {
        Ok(pulse_integral_series(n_th, t_p, delta_omega, t))
    } else {
        Ok(pulse_integral_closed_form(n_th, t_p, delta_omega, t))
    }
}

/// Large-phase asymptotic form (N_th/(Δ·t_p))²·t², valid for Δ·t ≫ 1.
pub fn pulse_integral_asymptotic(n_th: f64, t_p: f64, delta_omega: f64, t: f64) -> Result<f64> {
    if !(n_th > 0.0) || !(t_p > 0.0) || !(t >= 0.0) {
        return Err(Error::Domain(format!(
            "n_th, t_p must be positive and t nonnegative (n_th={n_th}, t_p={t_p}, t={t})"
        )));
    }
    let phase = (delta_omega * t).abs();
    if phase < ASYMPTOTIC_MIN_PHASE {
        return Err(Error::AsymptoticValidity {
            phase,
            required: ASYMPTOTIC_MIN_PHASE,
        });
    }
    Ok((n_th / (delta_omega * t_p)).powi(2) * t * t)
}

/// First-order ionization probability on the rising ramp:
/// P(t) = |𝓜|²·(ħ·N_th/(W·t_p))²·I_p·t².
///
/// Valid for t ≪ t_p (enforced as t ≤ t_p/10); P ∝ t² exactly, so
/// d ln P/dt = 2/t.
pub fn ionization_probability_ramp(
    matrix_element_sq: f64,
    n_th: f64,
    work: f64,
    t_p: f64,
    peak_intensity: f64,
    t: f64,
) -> Result<f64> {
    if !(matrix_element_sq >= 0.0) || !(n_th > 0.0) || !(work > 0.0) || !(t_p > 0.0) {
        return Err(Error::Domain(format!(
            "inputs must be positive (m2={matrix_element_sq}, n_th={n_th}, W={work}, t_p={t_p})"
        )));
    }
    if !(peak_intensity >= 0.0) || !peak_intensity.is_finite() {
        return Err(Error::Domain(format!(
            "peak intensity must be nonnegative, got {peak_intensity}"
        )));
    }
    if !(t >= 0.0) || t > t_p * RAMP_VALIDITY_FRACTION {
        return Err(Error::Domain(format!(
            "t = {t:.6e} s outside the first-order validity window [0, t_p/10 = {:.6e}]",
            t_p * RAMP_VALIDITY_FRACTION
        )));
    }
    let p = matrix_element_sq * (HBAR * n_th / (work * t_p)).powi(2) * peak_intensity * t * t;
    if p > 1.0 {
        return Err(Error::PerturbationBreakdown { probability: p });
    }
    Ok(p)
}

/// Golden-rule ionization probability for a flat pulse:
/// P0 = (2π/ħ)·|𝓜|²·N²·I·V·m·|p|·Δt·dΩ.
///
/// Linear in I at fixed N; validity additionally requires the coupling energy
/// (see [`effective_coupling_energy`]) to stay well below the binding energy.
#[allow(clippy::too_many_arguments)]
pub fn ionization_probability_flat(
    matrix_element_sq: f64,
    photons_n: f64,
    intensity: f64,
    volume: f64,
    free_momentum_p: f64,
    duration: f64,
    solid_angle: f64,
) -> Result<f64> {
    if !(matrix_element_sq >= 0.0)
        || !(photons_n >= 0.0)
        || !(volume > 0.0)
        || !(free_momentum_p > 0.0)
        || !(duration > 0.0)
        || !(solid_angle > 0.0)
    {
        return Err(Error::Domain(
            "flat-pulse probability requires nonnegative m2, N and positive V, p, dt, dOmega"
                .to_string(),
        ));
    }
    if !(intensity >= 0.0) || !intensity.is_finite() {
        return Err(Error::Domain(format!(
            "intensity must be nonnegative and finite, got {intensity}"
        )));
    }
    let p0 = 2.0 * PI / HBAR
        * matrix_element_sq
        * photons_n
        * photons_n
        * intensity
        * volume
        * ELECTRON_MASS
        * free_momentum_p
        * duration
        * solid_angle;
    if p0 > 1.0 {
        return Err(Error::PerturbationBreakdown { probability: p0 });
    }
    Ok(p0)
}

/// Ionized-atom concentration N_i = N_a·P.
pub fn ion_concentration(atom_density: f64, probability: f64) -> Result<f64> {
    if !(atom_density >= 0.0) || !atom_density.is_finite() {
        return Err(Error::Domain(format!(
            "atom density must be nonnegative, got {atom_density}"
        )));
    }
    if !(0.0..=1.0).contains(&probability) {
        return Err(Error::Domain(format!(
            "probability must lie in [0, 1], got {probability}"
        )));
    }
    Ok(atom_density * probability)
}

/// Coupling energy of the N-photon interaction operator,
/// W_eff = (e·|p|/m)·A_p·N with A_p = sqrt(I/(ε0·c²·ω²)).
///
/// A_p is the per-photon field amplitude at intensity I; the simultaneous
/// absorption of N photons enters as the linear factor N. Compare W_eff
/// against the binding energy W: first-order results require W ≫ W_eff.
pub fn effective_coupling_energy(
    intensity: f64,
    photons_n: f64,
    momentum: f64,
    omega: f64,
) -> Result<f64> {
    if !(momentum > 0.0) || !(photons_n >= 0.0) {
        return Err(Error::Domain(format!(
            "momentum must be positive and N nonnegative (p={momentum}, N={photons_n})"
        )));
    }
    let a_sq = vector_potential_sq(intensity, omega)?;
    Ok(ELECTRON_CHARGE * momentum / ELECTRON_MASS * a_sq.sqrt() * photons_n)
}

/// Metal photoemission probability kernel P0 = const·(σ·n^(2/3)·F)²·I.
///
/// At F = 1 this is the uncorrelated extended-electron form (σ·n^(2/3))²·I.
pub fn metal_emission_probability(
    const_c: f64,
    sigma: f64,
    photon_density: f64,
    correlation_f: f64,
    intensity: f64,
) -> Result<f64> {
    if !(const_c >= 0.0) || !(sigma > 0.0) {
        return Err(Error::Domain(format!(
            "const and sigma must be nonnegative/positive (const={const_c}, sigma={sigma})"
        )));
    }
    if !(correlation_f >= 0.0) {
        return Err(Error::Domain(format!(
            "correlation factor must be nonnegative, got {correlation_f}"
        )));
    }
    if !(photon_density >= 0.0) || !(intensity >= 0.0) {
        return Err(Error::Domain(format!(
            "photon density and intensity must be nonnegative (n={photon_density}, I={intensity})"
        )));
    }
    let coupling = sigma * photon_density.powf(2.0 / 3.0) * correlation_f;
    Ok(const_c * coupling * coupling * intensity)
}

/// Maximum emitted-electron energy ε_max = N·hν − W(I).
pub fn max_electron_energy(
    photons_n: f64,
    photon_energy: f64,
    metal: &MetalTarget,
    intensity: f64,
) -> Result<PhotoelectronEnergy> {
    if !(photons_n >= 1.0) {
        return Err(Error::Domain(format!(
            "threshold photon count must be >= 1, got {photons_n}"
        )));
    }
    if !(photon_energy > 0.0) || !(intensity >= 0.0) {
        return Err(Error::Domain(format!(
            "photon energy must be positive and intensity nonnegative (hv={photon_energy}, I={intensity})"
        )));
    }
    let energy = photons_n * photon_energy - metal.work_function(intensity);
    Ok(PhotoelectronEnergy {
        energy,
        below_threshold: energy < 0.0,
    })
}

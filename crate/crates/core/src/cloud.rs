//! Geometry of the extended cloud around a moving electron and the photon-count
//! coupling N = σ·n^(2/3) that it produces.
//!
//! A free electron of speed v0 has matter wavelength λ = h/(m·v0); the cloud
//! it excites oscillates with spatial amplitude Λ = λ·c/v0 and radius Λ/π.
//! The electron-plus-cloud capture cross section is bounded by
//! λ²/(4π) < σ < Λ²/π.

use crate::error::{Error, Result};
use crate::units::{LIGHT_SPEED, PLANCK_H};
use serde::{Deserialize, Serialize};

/// Derived kinematics of a moving particle and its excitation cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleKinematics {
    /// Particle speed (m/s), 0 < v0 < c.
    pub velocity_v0: f64,
    /// Particle mass (kg).
    pub mass: f64,
    /// Matter wavelength h/(m·v0) (m).
    pub de_broglie_lambda: f64,
    /// Cloud oscillation amplitude Λ = λ·c/v0 (m).
    pub cloud_amplitude: f64,
    /// Cloud radius Λ/π (m).
    pub cloud_radius: f64,
}

/// Admissible window for the electron-plus-cloud cross section (m²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossSectionWindow {
    /// λ²/(4π), the bare matter-wave lower bound.
    pub sigma_lower: f64,
    /// Λ²/π, the full-cloud upper bound.
    pub sigma_upper: f64,
    /// Working value inside the window; defaults to the geometric mean.
    pub sigma_chosen: f64,
}

impl CrossSectionWindow {
    /// Replaces the working cross section, keeping it inside the window.
    pub fn with_chosen(mut self, sigma: f64) -> Result<Self> {
        if !(sigma >= self.sigma_lower && sigma <= self.sigma_upper) {
            return Err(Error::Domain(format!(
                "sigma = {sigma:.6e} m^2 outside the window [{:.6e}, {:.6e}]",
                self.sigma_lower, self.sigma_upper
            )));
        }
        self.sigma_chosen = sigma;
        Ok(self)
    }
}

/// Derives matter wavelength, cloud amplitude, and cloud radius for a particle
/// of speed `v0` (m/s) and mass `mass` (kg).
pub fn derive_kinematics(v0: f64, mass: f64) -> Result<ParticleKinematics> {
    if !(mass > 0.0) || !mass.is_finite() {
        return Err(Error::Domain(format!(
            "mass must be positive and finite, got {mass}"
        )));
    }
    if !v0.is_finite() || v0 >= LIGHT_SPEED {
        return Err(Error::Relativistic { v0 });
    }
    if v0 <= 0.0 {
        return Err(Error::Degenerate(format!(
            "v0 = {v0} m/s: cloud amplitude diverges as v0 -> 0"
        )));
    }
    let de_broglie_lambda = PLANCK_H / (mass * v0);
    let cloud_amplitude = de_broglie_lambda * LIGHT_SPEED / v0;
    Ok(ParticleKinematics {
        velocity_v0: v0,
        mass,
        de_broglie_lambda,
        cloud_amplitude,
        cloud_radius: cloud_amplitude / std::f64::consts::PI,
    })
}

/// Cross-section window λ²/(4π) < σ < Λ²/π for the given kinematics.
pub fn cross_section_bounds(k: &ParticleKinematics) -> CrossSectionWindow {
    let sigma_lower = k.de_broglie_lambda * k.de_broglie_lambda / (4.0 * std::f64::consts::PI);
    let sigma_upper = k.cloud_amplitude * k.cloud_amplitude / std::f64::consts::PI;
    CrossSectionWindow {
        sigma_lower,
        sigma_upper,
        // Geometric mean: scale-symmetric default in a log-bounded interval.
        sigma_chosen: (sigma_lower * sigma_upper).sqrt(),
    }
}

/// Number of photons striking the cloud, N = σ·n^(2/3).
///
/// Returned as a real value; rate formulas use it as a continuous coupling
/// factor. Use [`threshold_photon_number`] for the integer reading.
pub fn photons_on_cloud(sigma: f64, number_density: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::Domain(format!(
            "sigma must be positive and finite, got {sigma}"
        )));
    }
    if !(number_density >= 0.0) || !number_density.is_finite() {
        return Err(Error::Domain(format!(
            "number density must be nonnegative and finite, got {number_density}"
        )));
    }
    Ok(sigma * number_density.powf(2.0 / 3.0))
}

/// Threshold photon count N_th = W/hν needed to supply the binding energy `work`,
/// as the real ratio and its integer ceiling.
pub fn threshold_photon_number(work: f64, photon_energy: f64) -> Result<(f64, u64)> {
    if !(work > 0.0) || !work.is_finite() {
        return Err(Error::Domain(format!(
            "work must be positive and finite, got {work}"
        )));
    }
    if !(photon_energy > 0.0) || !photon_energy.is_finite() {
        return Err(Error::Domain(format!(
            "photon energy must be positive and finite, got {photon_energy}"
        )));
    }
    let n_th = work / photon_energy;
    Ok((n_th, n_th.ceil() as u64))
}

/// Photon count absorbed by time `t` on the rising edge of a triangular pulse:
/// N(t) = N_th·t/t_p, valid for t in [0, t_p].
pub fn ramp_photon_number(n_th: f64, t: f64, t_peak: f64) -> Result<f64> {
    if !(t_peak > 0.0) || !t_peak.is_finite() {
        return Err(Error::Domain(format!(
            "t_peak must be positive and finite, got {t_peak}"
        )));
    }
    if !(0.0..=t_peak).contains(&t) {
        return Err(Error::Domain(format!(
            "t = {t:.6e} s outside the rising-edge interval [0, {t_peak:.6e}]"
        )));
    }
    Ok(n_th * t / t_peak)
}

/// Correlation factor F = (Λ·n_elec^(1/3))^γ comparing the cloud amplitude to
/// the mean electron spacing in a dense medium.
pub fn correlation_factor(cloud_amplitude: f64, n_elec: f64, gamma: f64) -> Result<f64> {
    if !(cloud_amplitude > 0.0) || !cloud_amplitude.is_finite() {
        return Err(Error::Domain(format!(
            "cloud amplitude must be positive and finite, got {cloud_amplitude}"
        )));
    }
    if !(n_elec > 0.0) || !n_elec.is_finite() {
        return Err(Error::Domain(format!(
            "electron density must be positive and finite, got {n_elec}"
        )));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::Domain(format!(
            "correlation exponent gamma must be positive, got {gamma}"
        )));
    }
    Ok((cloud_amplitude * n_elec.powf(1.0 / 3.0)).powf(gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{ELECTRON_MASS, EV};

    /// Strict relative comparison with no absolute floor: tiny magnitudes
    /// (cross sections ~1e-70) must still match to the stated tolerance.
    fn assert_close(actual: f64, expected: f64, rel_tol: f64) {
        let denom = expected.abs().max(actual.abs());
        let err = if denom == 0.0 {
            (actual - expected).abs()
        } else {
            ((actual - expected) / denom).abs()
        };
        assert!(
            err <= rel_tol,
            "relative error {err:.3e} exceeds {rel_tol:.1e}: actual {actual:.17e}, expected {expected:.17e}"
        );
    }

    #[test]
    fn kinematics_at_fermi_speed() {
        // Published reference point: v0 = 2e6 m/s gives lambda ~ 0.36 nm and
        // cloud radius ~ 17 nm. Oracle: direct CODATA arithmetic.
        let k = derive_kinematics(2e6, ELECTRON_MASS).unwrap();
        let lambda = PLANCK_H / (ELECTRON_MASS * 2e6);
        assert_close(k.de_broglie_lambda, lambda, 1e-15);
        assert_close(k.de_broglie_lambda, 3.637e-10, 1e-3);
        assert_close(k.cloud_radius, 1.735e-8, 1e-3);
        assert_close(k.cloud_amplitude,
            lambda * LIGHT_SPEED / 2e6, 1e-15);
    }

    #[test]
    fn amplitude_approaches_lambda_near_light_speed() {
        let k = derive_kinematics(LIGHT_SPEED * (1.0 - 1e-12), ELECTRON_MASS).unwrap();
        assert_close(k.cloud_amplitude, k.de_broglie_lambda, 1e-9);
    }

    #[test]
    fn kinematics_decade_scaling() {
        let k = derive_kinematics(2e5, ELECTRON_MASS).unwrap();
        assert_close(k.de_broglie_lambda, 3.637e-9, 1e-3);
        assert_close(k.cloud_amplitude, 5.452e-6, 1e-3);
    }

    #[test]
    fn kinematics_domain_errors() {
        assert!(matches!(
            derive_kinematics(LIGHT_SPEED, ELECTRON_MASS),
            Err(Error::Relativistic { .. })
        ));
        assert!(matches!(
            derive_kinematics(0.0, ELECTRON_MASS),
            Err(Error::Degenerate(_))
        ));
        assert!(derive_kinematics(1e6, 0.0).is_err());
    }

    #[test]
    fn amplitude_to_lambda_ratio_is_c_over_v0() {
        for v0 in [1e3, 2e5, 2e6, 1e8] {
            let k = derive_kinematics(v0, ELECTRON_MASS).unwrap();
            assert_close(k.cloud_amplitude / k.de_broglie_lambda,
                LIGHT_SPEED / v0, 1e-14);
        }
    }

    #[test]
    fn cross_section_window_at_fermi_speed() {
        let k = derive_kinematics(2e6, ELECTRON_MASS).unwrap();
        let w = cross_section_bounds(&k);
        // Oracle: lambda^2/(4 pi) and Lambda^2/pi by hand.
        let lo = k.de_broglie_lambda.powi(2) / (4.0 * std::f64::consts::PI);
        let hi = k.cloud_amplitude.powi(2) / std::f64::consts::PI;
        assert_close(w.sigma_lower, lo, 1e-15);
        assert_close(w.sigma_upper, hi, 1e-15);
        assert_close(w.sigma_lower, 1.0526e-20, 1e-4);
        assert_close(w.sigma_upper, 9.461e-16, 1e-3);
        assert!(w.sigma_lower < w.sigma_chosen && w.sigma_chosen < w.sigma_upper);
    }

    #[test]
    fn lower_bound_scales_quadratically_with_lambda() {
        let k1 = derive_kinematics(2e6, ELECTRON_MASS).unwrap();
        let k2 = derive_kinematics(1e6, ELECTRON_MASS).unwrap(); // lambda doubled
        let w1 = cross_section_bounds(&k1);
        let w2 = cross_section_bounds(&k2);
        assert_close(w2.sigma_lower, 4.0 * w1.sigma_lower, 1e-12);
    }

    #[test]
    fn window_ratio_is_4_c_over_v0_squared() {
        for v0 in [2e5, 2e6, 5e7] {
            let w = cross_section_bounds(&derive_kinematics(v0, ELECTRON_MASS).unwrap());
            assert_close(w.sigma_upper / w.sigma_lower,
                4.0 * (LIGHT_SPEED / v0).powi(2), 1e-12);
        }
    }

    #[test]
    fn with_chosen_enforces_window() {
        let w = cross_section_bounds(&derive_kinematics(2e6, ELECTRON_MASS).unwrap());
        assert!(w.with_chosen(1e-18).is_ok());
        assert!(w.with_chosen(1e-10).is_err());
    }

    #[test]
    fn photon_count_on_cloud() {
        // sigma at the upper bound, density 3e25 m^-3.
        let n = photons_on_cloud(9.461e-16, 3e25).unwrap();
        assert_close(n, 9.461e-16 * 3e25_f64.powf(2.0 / 3.0), 1e-15);
        assert_close(n, 91.3, 1e-3);
        assert_eq!(photons_on_cloud(9.461e-16, 0.0).unwrap(), 0.0);
        assert_close(photons_on_cloud(1e-20, 3e25).unwrap(),
            9.65e-4, 1e-3);
    }

    #[test]
    fn photon_count_homogeneity() {
        let base = photons_on_cloud(1e-18, 1e24).unwrap();
        for k in [2.0_f64, 10.0, 0.5] {
            let scaled = photons_on_cloud(1e-18, k.powi(3) * 1e24).unwrap();
            assert_close(scaled, k * k * base, 1e-12);
        }
    }

    #[test]
    fn threshold_count_for_rare_gas() {
        let hv = crate::units::photon_energy(1.06e-6).unwrap();
        let (n_th, ceil) = threshold_photon_number(15.76 * EV, hv).unwrap();
        assert_close(n_th, 13.47, 1e-3);
        assert_eq!(ceil, 14);
    }

    #[test]
    fn threshold_count_limits() {
        let (n_th, ceil) = threshold_photon_number(2.0, 2.0).unwrap();
        assert_eq!(n_th, 1.0);
        assert_eq!(ceil, 1);
        // Metal work function ~6 eV under 1.1697 eV photons.
        let (n_th, ceil) = threshold_photon_number(6.0 * EV, 1.1697 * EV).unwrap();
        assert_close(n_th, 5.13, 1e-3);
        assert_eq!(ceil, 6);
    }

    #[test]
    fn ramp_count_linear_in_time() {
        assert_close(ramp_photon_number(14.0, 5e-9, 5e-9).unwrap(),
            14.0, 1e-15);
        assert_close(ramp_photon_number(14.0, 2.5e-9, 5e-9).unwrap(),
            7.0, 1e-15);
        assert_close(ramp_photon_number(13.47, 0.3 * 5e-9, 5e-9).unwrap(),
            4.041, 1e-3);
        assert!(ramp_photon_number(14.0, 6e-9, 5e-9).is_err());
        assert!(ramp_photon_number(14.0, -1e-12, 5e-9).is_err());
    }

    #[test]
    fn ramp_count_monotone() {
        let mut prev = 0.0;
        for i in 0..=100 {
            let t = 5e-9 * i as f64 / 100.0;
            let n = ramp_photon_number(13.47, t, 5e-9).unwrap();
            assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn correlation_factor_values() {
        // Metal electron density 1e27 m^-3 (~1 nm spacing), amplitude from the
        // v0 = 2e6 m/s kinematics: F = Lambda * n^(1/3) at gamma = 1.
        let k = derive_kinematics(2e6, ELECTRON_MASS).unwrap();
        let f = correlation_factor(k.cloud_amplitude, 1e27, 1.0).unwrap();
        assert_close(f, k.cloud_amplitude * 1e9, 1e-12);
        assert_close(f, 54.52, 1e-3);
        // gamma -> 0+ pushes F -> 1.
        let f0 = correlation_factor(5.452e-8, 1e27, 1e-12).unwrap();
        assert_close(f0, 1.0, 1e-9);
        // Unit base: Lambda * n^(1/3) = 1 gives F = 1 for any gamma.
        for gamma in [0.5, 1.0, 3.7] {
            let f1 = correlation_factor(1e-9, 1e27, gamma).unwrap();
            assert_close(f1, 1.0, 1e-12);
        }
        assert!(correlation_factor(1e-8, 1e27, 0.0).is_err());
        assert!(correlation_factor(1e-8, 1e27, -1.0).is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fabrication fits: coupling versus waveguide spacing, and propagation
/// constant detuning versus laser writing-speed detuning.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CouplingCalibration {
    /// Coupling at zero spacing, cm^-1.
    pub amplitude_cm: f64,
    /// Exponential decay rate of the coupling with spacing, um^-1.
    pub decay_per_um: f64,
    /// mm^-1 of detuning per mm/s of speed detuning.
    pub delta_beta_slope: f64,
}

impl Default for CouplingCalibration {
    fn default() -> Self {
        CouplingCalibration {
            amplitude_cm: 47.19,
            decay_per_um: 0.2243,
            delta_beta_slope: 0.02,
        }
    }
}

impl CouplingCalibration {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude_cm > 0.0) {
            return Err(Error::invalid("amplitude_cm", "must be positive"));
        }
        if !(self.decay_per_um > 0.0) {
            return Err(Error::invalid("decay_per_um", "must be positive"));
        }
        if !(self.delta_beta_slope > 0.0) {
            return Err(Error::invalid("delta_beta_slope", "must be positive"));
        }
        Ok(())
    }

    /// C = a exp(-b d), cm^-1 for spacing `d_um` in micrometres.
    pub fn coupling_for_spacing(&self, d_um: f64) -> f64 {
        self.amplitude_cm * (-self.decay_per_um * d_um).exp()
    }

    /// Inverse of [`coupling_for_spacing`](Self::coupling_for_spacing).
    pub fn spacing_for_coupling(&self, c_cm: f64) -> Result<f64> {
        if !(c_cm > 0.0 && c_cm <= self.amplitude_cm) {
            return Err(Error::invalid(
                "coupling",
                format!("{c_cm} cm^-1 is outside (0, {}]", self.amplitude_cm),
            ));
        }
        Ok((self.amplitude_cm / c_cm).ln() / self.decay_per_um)
    }

    pub fn delta_beta_for_speed(&self, dv_mm_per_s: f64) -> f64 {
        self.delta_beta_slope * dv_mm_per_s
    }

    pub fn speed_for_delta_beta(&self, db_per_mm: f64) -> f64 {
        db_per_mm / self.delta_beta_slope
    }
}

/// Coupling of a detuned directional coupler, sqrt((db/2)^2 + c0^2).
pub fn effective_coupling(c0: f64, db: f64) -> Result<f64> {
    if !(c0 > 0.0) {
        return Err(Error::invalid("c0", "base coupling must be positive"));
    }
    Ok((0.5 * db).hypot(c0))
}

/// Exact coupling shift C_eff - C0, evaluated as (db/2)^2 / (C_eff + C0) to
/// avoid cancellation. Approaches db^2 / (8 c0) for small detuning.
pub fn delta_c(c0: f64, db: f64) -> Result<f64> {
    let ceff = effective_coupling(c0, db)?;
    Ok(0.25 * db * db / (ceff + c0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_zero_gives_amplitude() {
        let cal = CouplingCalibration::default();
        assert_eq!(cal.coupling_for_spacing(0.0), 47.19);
    }

    #[test]
    fn spacing_for_strongest_chip_coupling() {
        let cal = CouplingCalibration::default();
        let d = cal.spacing_for_coupling(0.14 * 96.0).unwrap();
        assert!((d - 5.597_f64).abs() < 5e-3, "{d}");
        let direct = (47.19f64 / 13.44).ln() / 0.2243;
        assert!((d - direct).abs() < 1e-12);
    }

    #[test]
    fn spacing_rejects_out_of_range() {
        let cal = CouplingCalibration::default();
        assert!(cal.spacing_for_coupling(0.0).is_err());
        assert!(cal.spacing_for_coupling(-1.0).is_err());
        assert!(cal.spacing_for_coupling(47.2).is_err());
        assert!(cal.spacing_for_coupling(47.19).is_ok());
    }

    #[test]
    fn spacing_round_trip() {
        let cal = CouplingCalibration::default();
        for k in 0..=300 {
            let d = k as f64 * 0.1;
            let back = cal
                .spacing_for_coupling(cal.coupling_for_spacing(d))
                .unwrap();
            assert!((back - d).abs() < 1e-12, "{d} -> {back}");
        }
    }

    #[test]
    fn speed_mapping() {
        let cal = CouplingCalibration::default();
        assert_eq!(cal.delta_beta_for_speed(0.0), 0.0);
        assert!((cal.delta_beta_for_speed(30.0) - 0.6).abs() < 1e-15);
        assert!((cal.speed_for_delta_beta(1.0) - 50.0).abs() < 1e-12);
    }

    #[test]
    fn effective_coupling_values() {
        assert_eq!(effective_coupling(1.3, 0.0).unwrap(), 1.3);
        assert_eq!(delta_c(1.3, 0.0).unwrap(), 0.0);
        assert!((effective_coupling(1.0, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let exact = delta_c(1.344, 0.4).unwrap();
        let approx = 0.4 * 0.4 / (8.0 * 1.344);
        assert!((exact / approx - 1.0).abs() < 0.05);
        assert!(delta_c(0.0, 0.1).is_err());
    }

    #[test]
    fn delta_c_small_detuning_limit() {
        for c0 in [0.2, 1.0, 1.344, 7.0] {
            for k in 1..=10 {
                let db = 0.01 * k as f64 * c0;
                let ratio = delta_c(c0, db).unwrap() / (db * db / (8.0 * c0));
                assert!(ratio <= 1.0 && ratio > 0.99, "{c0} {db} {ratio}");
            }
        }
    }
}

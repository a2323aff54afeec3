use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::EfficiencyMode;
use crate::dynamics::{
    DeltaCCorrection, Propagator, DEFAULT_FINE_STEP_MM, DEFAULT_SEGMENT_LENGTH_MM,
};
use crate::error::{Error, Result};
use crate::model::{
    attach_sink, attach_vibrational_mode, build_fmo_hamiltonian, FmoSpec, Hamiltonian,
    VibrationalCoupling,
};
use crate::noise::{NoiseConfig, NoiseKind};

/// Sink chain attached to the drain site.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SinkSpec {
    pub length: usize,
    pub drain_coupling_per_mm: f64,
    pub internal_coupling_per_mm: f64,
}

impl Default for SinkSpec {
    fn default() -> Self {
        SinkSpec {
            length: 100,
            drain_coupling_per_mm: 0.6,
            internal_coupling_per_mm: 0.7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemSpec {
    pub fmo: FmoSpec,
    pub sink: Option<SinkSpec>,
    pub vibration: Option<VibrationalCoupling>,
}

impl Default for SystemSpec {
    fn default() -> Self {
        SystemSpec {
            fmo: FmoSpec::default(),
            sink: Some(SinkSpec::default()),
            vibration: None,
        }
    }
}

impl SystemSpec {
    /// Seven sites, then the optional vibrational mode, then the sink chain.
    pub fn build(&self) -> Result<Hamiltonian> {
        let mut h = build_fmo_hamiltonian(&self.fmo)?;
        if let Some(v) = self.vibration {
            h = attach_vibrational_mode(&h, v)?;
        }
        if let Some(s) = &self.sink {
            h = attach_sink(
                &h,
                s.length,
                s.drain_coupling_per_mm,
                s.internal_coupling_per_mm,
            )?;
        }
        Ok(h)
    }
}

/// Scalar extracted from each realization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Observable {
    /// Transport efficiency at distance `z_mm`.
    EfficiencyAt { z_mm: f64 },
    /// Efficiency averaged over the samples with 0 < z <= z_max_mm.
    WindowMeanEfficiency { z_max_mm: f64 },
    /// Transfer time evaluated at total length `z_mm`.
    TransferTime { z_mm: f64 },
}

impl Default for Observable {
    fn default() -> Self {
        Observable::EfficiencyAt { z_mm: 20.0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisorderMode {
    /// New disorder for every realization and grid point.
    #[default]
    Redraw,
    /// Realization r uses the same disorder at every grid point.
    Fixed,
}

/// A Monte Carlo sweep over the detuning amplitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub system: SystemSpec,
    /// Template for every realization; its amplitude and seed are replaced.
    pub noise: NoiseConfig,
    /// Swept amplitudes in mm^-1, ascending.
    pub amplitudes_per_mm: Vec<f64>,
    pub realizations: usize,
    pub disorder_gamma_per_mm: f64,
    pub disorder: DisorderMode,
    pub segment_length_mm: f64,
    pub fine_step_mm: f64,
    pub observable: Observable,
    pub efficiency_mode: EfficiencyMode,
    pub delta_c: Option<DeltaCCorrection>,
    pub propagator: Propagator,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            system: SystemSpec::default(),
            noise: default_colored_noise(),
            amplitudes_per_mm: linear_grid(0.0, 1.0, 11),
            realizations: 100,
            disorder_gamma_per_mm: 0.0,
            disorder: DisorderMode::Redraw,
            segment_length_mm: DEFAULT_SEGMENT_LENGTH_MM,
            fine_step_mm: DEFAULT_FINE_STEP_MM,
            observable: Observable::default(),
            efficiency_mode: EfficiencyMode::Intensity,
            delta_c: None,
            propagator: Propagator::Chebyshev,
            seed: 0,
        }
    }
}

/// Colored noise as used for the chip: twenty 1 mm segments drawn at
/// f_s = 0.5 mm^-1 (t_c = 40 mm on the filter's time axis).
pub fn default_colored_noise() -> NoiseConfig {
    NoiseConfig {
        kind: NoiseKind::Colored,
        segments: 20,
        total_length_mm: 40.0,
        ..NoiseConfig::default()
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            return Err(Error::invalid("realizations", "must be at least 1"));
        }
        if self.amplitudes_per_mm.is_empty() {
            return Err(Error::Empty("amplitude grid"));
        }
        if self.amplitudes_per_mm.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::invalid(
                "amplitudes_per_mm",
                "grid must be sorted ascending",
            ));
        }
        if !(self.disorder_gamma_per_mm >= 0.0) {
            return Err(Error::invalid(
                "disorder_gamma_per_mm",
                "must be non-negative",
            ));
        }
        self.noise.validate()?;
        Ok(())
    }

    pub fn total_length(&self) -> f64 {
        self.noise.segments as f64 * self.segment_length_mm
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        config_hash(self)
    }
}

pub fn config_hash<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("configs serialize");
    Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// `n` evenly spaced points from `lo` to `hi`, rounded to 12 decimals so
/// that e.g. 0.1-steps are exact decimal values.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| {
            let v = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            (v * 1e12).round() / 1e12
        })
        .collect()
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = linear_grid(0.0, 1.0, 11);
        assert_eq!(g[3], 0.3);
        assert_eq!(g[10], 1.0);
        let l = log_grid(0.1, 100.0, 31);
        assert!((l[0] - 0.1).abs() < 1e-15 && (l[30] - 100.0).abs() < 1e-12);
        assert!((l[10] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn system_dimensions() {
        let h = SystemSpec::default().build().unwrap();
        assert_eq!(h.dim(), 107);
        let with_mode = SystemSpec {
            vibration: Some(VibrationalCoupling::Auto),
            ..SystemSpec::default()
        };
        let h = with_mode.build().unwrap();
        assert_eq!(h.dim(), 108);
        assert_eq!(h.vibration_index(), Some(7));
        assert_eq!(h.sink_indices()[0], 8);
    }

    #[test]
    fn validation() {
        let mut c = SweepConfig::default();
        assert!(c.validate().is_ok());
        c.amplitudes_per_mm = vec![0.5, 0.1];
        assert!(c.validate().is_err());
        c.amplitudes_per_mm = vec![];
        assert!(c.validate().is_err());
        let c = SweepConfig {
            realizations: 0,
            ..SweepConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = SweepConfig::default();
        let b = SweepConfig {
            seed: 1,
            ..a.clone()
        };
        assert_eq!(a.hash(), a.clone().hash());
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}

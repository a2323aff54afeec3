//! Versioned JSON run files for each command.

use std::fs;
use std::path::Path;

use fmo_core::analysis::EfficiencyMode;
use fmo_core::dynamics::{DeltaCCorrection, DEFAULT_FINE_STEP_MM, DEFAULT_SEGMENT_LENGTH_MM};
use fmo_core::experiments::{SweepConfig, SystemSpec};
use fmo_core::model::{CouplingCalibration, FmoSpec, DEFAULT_MIN_COUPLING_CM};
use fmo_core::noise::{NoiseConfig, NoiseKind};
use fmo_core::Propagator;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// A run file with a schema version check.
pub trait RunFile: DeserializeOwned {
    fn schema_version(&self) -> u32;
}

pub fn load<T: RunFile>(path: &Path) -> Result<T, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse<T: RunFile>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path.is_empty() || path == "." {
            CliError::Config(inner.to_string())
        } else {
            CliError::Config(format!("at `{path}`: {inner}"))
        }
    })?;
    if value.schema_version() != SCHEMA_VERSION {
        return Err(CliError::Config(format!(
            "schema_version {} is not supported (expected {SCHEMA_VERSION})",
            value.schema_version()
        )));
    }
    Ok(value)
}

/// One noise realization evolved with the full trace recorded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub schema_version: u32,
    pub system: SystemSpec,
    pub noise: NoiseConfig,
    pub disorder_gamma_per_mm: f64,
    pub segment_length_mm: f64,
    pub fine_step_mm: f64,
    pub propagator: Propagator,
    pub delta_c: Option<DeltaCCorrection>,
    pub efficiency_mode: EfficiencyMode,
    /// Write every k-th trace sample.
    pub trace_stride: usize,
    pub seed: u64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            schema_version: 0,
            system: SystemSpec::default(),
            noise: NoiseConfig {
                kind: NoiseKind::Colored,
                segments: 20,
                total_length_mm: 40.0,
                ..NoiseConfig::default()
            },
            disorder_gamma_per_mm: 0.0,
            segment_length_mm: DEFAULT_SEGMENT_LENGTH_MM,
            fine_step_mm: DEFAULT_FINE_STEP_MM,
            propagator: Propagator::Eigen,
            delta_c: None,
            efficiency_mode: EfficiencyMode::Intensity,
            trace_stride: 1,
            seed: 0,
        }
    }
}

impl RunFile for SimulateConfig {
    fn schema_version(&self) -> u32 {
        self.schema_version
    }
}

impl SimulateConfig {
    /// The equivalent one-point, one-realization sweep.
    pub fn as_sweep(&self) -> SweepConfig {
        SweepConfig {
            system: self.system.clone(),
            noise: self.noise.clone(),
            amplitudes_per_mm: vec![self.noise.amplitude_per_mm],
            realizations: 1,
            disorder_gamma_per_mm: self.disorder_gamma_per_mm,
            segment_length_mm: self.segment_length_mm,
            fine_step_mm: self.fine_step_mm,
            efficiency_mode: self.efficiency_mode,
            delta_c: self.delta_c,
            propagator: self.propagator,
            seed: self.seed,
            ..SweepConfig::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub schema_version: u32,
    #[serde(default)]
    pub sweep: SweepConfig,
}

impl RunFile for SweepFile {
    fn schema_version(&self) -> u32 {
        self.schema_version
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChipPlanConfig {
    pub schema_version: u32,
    pub fmo: FmoSpec,
    /// Detuning schedule to convert into writing speeds; none gives a
    /// plan with spacings only.
    pub noise: Option<NoiseConfig>,
    pub calibration: CouplingCalibration,
    /// Pairs weaker than this get no spacing row.
    pub min_coupling_cm: f64,
    pub seed: u64,
}

impl Default for ChipPlanConfig {
    fn default() -> Self {
        ChipPlanConfig {
            schema_version: 0,
            fmo: FmoSpec::default(),
            noise: None,
            calibration: CouplingCalibration::default(),
            min_coupling_cm: DEFAULT_MIN_COUPLING_CM,
            seed: 0,
        }
    }
}

impl RunFile for ChipPlanConfig {
    fn schema_version(&self) -> u32 {
        self.schema_version
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_files_parse() {
        let s: SweepFile = parse(r#"{"schema_version": 1}"#).unwrap();
        assert_eq!(s.sweep, SweepConfig::default());
        let c: ChipPlanConfig = parse(r#"{"schema_version": 1}"#).unwrap();
        assert!(c.noise.is_none());
    }

    #[test]
    fn unknown_field_reports_path() {
        let err = parse::<SweepFile>(
            r#"{"schema_version": 1, "sweep": {"noise": {"kind": "colored", "bogus": 1}}}"#,
        )
        .unwrap_err();
        match err {
            CliError::Config(m) => assert!(m.contains("sweep.noise"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_schema_version() {
        assert!(matches!(
            parse::<SimulateConfig>(r#"{"schema_version": 2}"#),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            parse::<SimulateConfig>("{}"),
            Err(CliError::Config(_))
        ));
    }
}

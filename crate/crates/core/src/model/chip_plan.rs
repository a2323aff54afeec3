//! Fabrication plan: waveguide spacings for coupled pairs and per-segment
//! writing-speed detunings.
//!
//! Speed rows give the detuning magnitude `dV = dbeta / slope` relative to
//! each waveguide's base writing speed. A faster write lowers the propagation
//! constant, so the base speed is chosen such that every listed detuning
//! raises beta by the tabulated amount.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::calibration::CouplingCalibration;
use super::fmo::{CM_TO_MM, WEAK_COUPLING_CM};
use super::hamiltonian::{Hamiltonian, SiteRole};
use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::noise::NoiseRealization;

/// Pairs whose on-chip coupling falls below this many cm^-1 are not exported
/// as designed spacings (the strong-coupling threshold after the 14% scale).
pub const DEFAULT_MIN_COUPLING_CM: f64 = WEAK_COUPLING_CM * 0.14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordType {
    Spacing,
    Speed,
}

impl RecordType {
    fn as_str(self) -> &'static str {
        match self {
            RecordType::Spacing => "spacing",
            RecordType::Speed => "speed",
        }
    }
}

/// One row of a chip plan. Site numbers are 1-based matrix indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "record_type")]
pub enum ChipRecord {
    Spacing {
        site_a: usize,
        site_b: usize,
        spacing_um: f64,
    },
    Speed {
        site: usize,
        segment: usize,
        speed_mm_per_s: f64,
    },
}

impl ChipRecord {
    pub fn record_type(&self) -> RecordType {
        match self {
            ChipRecord::Spacing { .. } => RecordType::Spacing,
            ChipRecord::Speed { .. } => RecordType::Speed,
        }
    }

    fn sort_key(&self) -> (RecordType, usize, usize) {
        match *self {
            ChipRecord::Spacing { site_a, site_b, .. } => (RecordType::Spacing, site_a, site_b),
            ChipRecord::Speed { site, segment, .. } => (RecordType::Speed, site, segment),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChipPlan {
    pub records: Vec<ChipRecord>,
}

impl ChipPlan {
    pub fn spacings(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.records.iter().filter_map(|r| match *r {
            ChipRecord::Spacing {
                site_a,
                site_b,
                spacing_um,
            } => Some((site_a, site_b, spacing_um)),
            _ => None,
        })
    }

    pub fn speeds(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.records.iter().filter_map(|r| match *r {
            ChipRecord::Speed {
                site,
                segment,
                speed_mm_per_s,
            } => Some((site, segment, speed_mm_per_s)),
            _ => None,
        })
    }

    /// Coupling magnitudes (mm^-1) implied by the spacing rows.
    pub fn rebuild_couplings(&self, cal: &CouplingCalibration) -> Vec<(usize, usize, f64)> {
        self.spacings()
            .map(|(a, b, d)| (a, b, cal.coupling_for_spacing(d) * CM_TO_MM))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "record_type",
            "site_a",
            "site_b",
            "segment_index",
            "value",
            "unit",
        ])?;
        for r in &self.records {
            match *r {
                ChipRecord::Spacing {
                    site_a,
                    site_b,
                    spacing_um,
                } => w.write_record([
                    RecordType::Spacing.as_str(),
                    &site_a.to_string(),
                    &site_b.to_string(),
                    "",
                    &fmt_f64(spacing_um),
                    "um",
                ])?,
                ChipRecord::Speed {
                    site,
                    segment,
                    speed_mm_per_s,
                } => w.write_record([
                    RecordType::Speed.as_str(),
                    &site.to_string(),
                    "",
                    &segment.to_string(),
                    &fmt_f64(speed_mm_per_s),
                    "mm/s",
                ])?,
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut records = Vec::new();
        for (k, row) in rdr.records().enumerate() {
            let row = row?;
            let line = k + 2;
            let field = |i: usize| row.get(i).unwrap_or("").trim();
            let parse_usize = |i: usize| {
                field(i).parse::<usize>().map_err(|e| Error::Parse {
                    line,
                    reason: format!("column {i}: {e}"),
                })
            };
            let value: f64 = field(4).parse().map_err(|e| Error::Parse {
                line,
                reason: format!("value: {e}"),
            })?;
            let rec = match field(0) {
                "spacing" => ChipRecord::Spacing {
                    site_a: parse_usize(1)?,
                    site_b: parse_usize(2)?,
                    spacing_um: value,
                },
                "speed" => ChipRecord::Speed {
                    site: parse_usize(1)?,
                    segment: parse_usize(3)?,
                    speed_mm_per_s: value,
                },
                other => {
                    return Err(Error::Parse {
                        line,
                        reason: format!("unknown record_type `{other}`"),
                    })
                }
            };
            records.push(rec);
        }
        Ok(ChipPlan { records })
    }
}

/// Exports spacings for every coupled pair whose magnitude is at least
/// `min_coupling_cm` and, when `noise` is given, the per-segment speed
/// detunings of each FMO site.
pub fn export_chip_plan(
    h: &Hamiltonian,
    noise: Option<&NoiseRealization>,
    cal: &CouplingCalibration,
    min_coupling_cm: f64,
) -> Result<ChipPlan> {
    cal.validate()?;
    let mut records = Vec::new();
    let n = h.dim();
    for i in 0..n {
        for j in (i + 1)..n {
            if h.roles()[i] == SiteRole::Vibration || h.roles()[j] == SiteRole::Vibration {
                continue;
            }
            let c_cm = h.coupling(i, j).norm() / CM_TO_MM;
            if c_cm == 0.0 || c_cm < min_coupling_cm {
                continue;
            }
            if c_cm > cal.amplitude_cm {
                return Err(Error::CouplingOutOfRange {
                    site_a: i + 1,
                    site_b: j + 1,
                    value_cm: c_cm,
                    max_cm: cal.amplitude_cm,
                });
            }
            records.push(ChipRecord::Spacing {
                site_a: i + 1,
                site_b: j + 1,
                spacing_um: cal.spacing_for_coupling(c_cm)?,
            });
        }
    }
    if let Some(noise) = noise {
        let fmo = h.fmo_indices();
        if noise.n_sites() < fmo.len() {
            return Err(Error::invalid(
                "noise",
                format!("{} sequences for {} FMO sites", noise.n_sites(), fmo.len()),
            ));
        }
        for (k, &idx) in fmo.iter().enumerate() {
            for (seg, &db) in noise.sequence(k).iter().enumerate() {
                records.push(ChipRecord::Speed {
                    site: idx + 1,
                    segment: seg,
                    speed_mm_per_s: cal.speed_for_delta_beta(db),
                });
            }
        }
    }
    records.sort_by_key(ChipRecord::sort_key);
    Ok(ChipPlan { records })
}

//! Per-site, per-segment propagation-constant detunings.

pub mod filter;

use std::io::{Read, Write};

use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

pub use filter::Discretization;

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::rng::stream_rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    UniformWhite,
    Colored,
    NormalAbs,
    Exponential,
    Cauchy,
}

impl NoiseKind {
    pub const ALL: [NoiseKind; 5] = [
        NoiseKind::UniformWhite,
        NoiseKind::Colored,
        NoiseKind::NormalAbs,
        NoiseKind::Exponential,
        NoiseKind::Cauchy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::UniformWhite => "uniform_white",
            NoiseKind::Colored => "colored",
            NoiseKind::NormalAbs => "normal_abs",
            NoiseKind::Exponential => "exponential",
            NoiseKind::Cauchy => "cauchy",
        }
    }

    pub fn default_normalization(self) -> Normalization {
        match self {
            NoiseKind::UniformWhite => Normalization::None,
            _ => Normalization::ByMax,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Divide each sequence by its maximum, then scale by the amplitude.
    ByMax,
    /// Draws are already on [0, amplitude].
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub kind: NoiseKind,
    /// Amplitude, mm^-1. Every emitted value lies in [0, amplitude].
    pub amplitude_per_mm: f64,
    pub segments: usize,
    /// Length t_c spanned by the sequence; sampling frequency is segments / t_c.
    pub total_length_mm: f64,
    pub seed: u64,
    /// `None` selects the kind's default (by-max except for uniform white).
    pub normalization: Option<Normalization>,
    pub discretization: Discretization,
    /// Overrides the colored-noise warm-up length in samples.
    pub burn_in: Option<usize>,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            kind: NoiseKind::UniformWhite,
            amplitude_per_mm: 0.5,
            segments: 20,
            total_length_mm: 20.0,
            seed: 0,
            normalization: None,
            discretization: Discretization::Bilinear,
            burn_in: None,
        }
    }
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude_per_mm >= 0.0) || !self.amplitude_per_mm.is_finite() {
            return Err(Error::invalid(
                "amplitude_per_mm",
                "must be finite and non-negative",
            ));
        }
        if self.segments == 0 {
            return Err(Error::invalid("segments", "must be at least 1"));
        }
        if !(self.total_length_mm > 0.0) || !self.total_length_mm.is_finite() {
            return Err(Error::invalid("total_length_mm", "must be positive"));
        }
        Ok(())
    }

    pub fn sampling_frequency(&self) -> f64 {
        self.segments as f64 / self.total_length_mm
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
            .unwrap_or(self.kind.default_normalization())
    }

    /// Draws `n_sites` independent sequences, site `k` from stream `k` of the
    /// configured seed.
    pub fn generate(&self, n_sites: usize) -> Result<NoiseRealization> {
        self.validate()?;
        let sequences = (0..n_sites)
            .map(|site| self.generate_site(site as u64))
            .collect();
        Ok(NoiseRealization {
            sequences,
            amplitude_per_mm: self.amplitude_per_mm,
            config: self.clone(),
        })
    }

    fn generate_site(&self, stream: u64) -> Vec<f64> {
        let n = self.segments;
        let amp = self.amplitude_per_mm;
        if amp == 0.0 {
            return vec![0.0; n];
        }
        let mut rng = stream_rng(self.seed, stream);
        let raw: Vec<f64> = match self.kind {
            NoiseKind::UniformWhite => (0..n).map(|_| rng.random::<f64>()).collect(),
            NoiseKind::Colored => {
                let fs = self.sampling_frequency();
                let burn = self.burn_in.unwrap_or_else(|| filter::burn_in_samples(fs));
                let x: Vec<f64> = (0..burn + n)
                    .map(|_| StandardNormal.sample(&mut rng))
                    .collect();
                filter::apply(self.discretization, fs, &x)[burn..]
                    .iter()
                    .map(|y| y.abs())
                    .collect()
            }
            NoiseKind::NormalAbs => (0..n)
                .map(|_| StandardNormal.sample(&mut rng))
                .map(|x: f64| x.abs())
                .collect(),
            NoiseKind::Exponential => {
                let exp = Exp::new(2.0).expect("rate 2 is valid");
                (0..n).map(|_| exp.sample(&mut rng)).collect()
            }
            NoiseKind::Cauchy => (0..n).map(|_| abs_normal_ratio(&mut rng)).collect(),
        };
        match self.normalization() {
            Normalization::None => raw.into_iter().map(|x| x * amp).collect(),
            Normalization::ByMax => {
                let max = raw.iter().copied().fold(0.0, f64::max);
                if max > 0.0 {
                    // Dividing first keeps the maximum at exactly `amp`.
                    raw.into_iter().map(|x| (x / max) * amp).collect()
                } else {
                    vec![0.0; n]
                }
            }
        }
    }
}

/// |X / Y| for independent standard normals, redrawing Y when it is exactly 0.
fn abs_normal_ratio<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let x: f64 = StandardNormal.sample(rng);
    loop {
        let y: f64 = StandardNormal.sample(rng);
        if y != 0.0 {
            return (x / y).abs();
        }
    }
}

/// Detuning sequences, one per site, each `segments` long, in mm^-1.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseRealization {
    sequences: Vec<Vec<f64>>,
    amplitude_per_mm: f64,
    config: NoiseConfig,
}

impl NoiseRealization {
    /// Wraps externally supplied sequences. The amplitude is taken as the
    /// largest value present.
    pub fn from_sequences(sequences: Vec<Vec<f64>>) -> Result<Self> {
        let segments = sequences.first().map_or(0, Vec::len);
        if sequences.is_empty() || segments == 0 {
            return Err(Error::Empty("noise sequences"));
        }
        if let Some(bad) = sequences.iter().find(|s| s.len() != segments) {
            return Err(Error::Dimension {
                expected: segments,
                actual: bad.len(),
            });
        }
        if sequences
            .iter()
            .flatten()
            .any(|x| !(x.is_finite() && *x >= 0.0))
        {
            return Err(Error::invalid(
                "delta_beta",
                "values must be finite and non-negative",
            ));
        }
        let amplitude = sequences.iter().flatten().copied().fold(0.0, f64::max);
        Ok(NoiseRealization {
            sequences,
            amplitude_per_mm: amplitude,
            config: NoiseConfig {
                amplitude_per_mm: amplitude,
                segments,
                total_length_mm: segments as f64,
                ..NoiseConfig::default()
            },
        })
    }

    /// All-zero detunings.
    pub fn zeros(n_sites: usize, segments: usize) -> Self {
        NoiseRealization {
            sequences: vec![vec![0.0; segments]; n_sites],
            amplitude_per_mm: 0.0,
            config: NoiseConfig {
                amplitude_per_mm: 0.0,
                segments,
                total_length_mm: segments as f64,
                ..NoiseConfig::default()
            },
        }
    }

    pub fn n_sites(&self) -> usize {
        self.sequences.len()
    }

    pub fn segments(&self) -> usize {
        self.sequences.first().map_or(0, Vec::len)
    }

    pub fn sequence(&self, site: usize) -> &[f64] {
        &self.sequences[site]
    }

    pub fn sequences(&self) -> &[Vec<f64>] {
        &self.sequences
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude_per_mm
    }

    pub fn config(&self) -> &NoiseConfig {
        &self.config
    }

    /// Detunings of every site during segment `s`.
    pub fn segment(&self, s: usize) -> Vec<f64> {
        self.sequences.iter().map(|seq| seq[s]).collect()
    }

    /// Rescales every value by `new_amplitude / amplitude`.
    pub fn resample_amplitude(&self, new_amplitude: f64) -> Result<Self> {
        if !(self.amplitude_per_mm > 0.0) {
            return Err(Error::invalid("amplitude", "source amplitude is zero"));
        }
        if !(new_amplitude >= 0.0) || !new_amplitude.is_finite() {
            return Err(Error::invalid(
                "new_amplitude",
                "must be finite and non-negative",
            ));
        }
        let ratio = new_amplitude / self.amplitude_per_mm;
        let sequences = self
            .sequences
            .iter()
            .map(|s| s.iter().map(|x| x * ratio).collect())
            .collect();
        Ok(NoiseRealization {
            sequences,
            amplitude_per_mm: new_amplitude,
            config: NoiseConfig {
                amplitude_per_mm: new_amplitude,
                ..self.config.clone()
            },
        })
    }

    /// CSV with columns `site, segment_index, delta_beta`; sites are 1-based.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["site", "segment_index", "delta_beta"])?;
        for (site, seq) in self.sequences.iter().enumerate() {
            for (seg, &v) in seq.iter().enumerate() {
                w.write_record([(site + 1).to_string(), seg.to_string(), fmt_f64(v)])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (k, row) in rdr.records().enumerate() {
            let row = row?;
            let line = k + 2;
            let get = |i: usize| row.get(i).unwrap_or("").trim();
            let parse_err = |what: &str, e: &dyn std::fmt::Display| Error::Parse {
                line,
                reason: format!("{what}: {e}"),
            };
            let site: usize = get(0).parse().map_err(|e| parse_err("site", &e))?;
            let seg: usize = get(1).parse().map_err(|e| parse_err("segment_index", &e))?;
            let v: f64 = get(2).parse().map_err(|e| parse_err("delta_beta", &e))?;
            if site == 0 {
                return Err(Error::Parse {
                    line,
                    reason: "sites are numbered from 1".into(),
                });
            }
            entries.push((site - 1, seg, v));
        }
        let n_sites = entries.iter().map(|e| e.0 + 1).max().unwrap_or(0);
        let segments = entries.iter().map(|e| e.1 + 1).max().unwrap_or(0);
        if entries.len() != n_sites * segments {
            return Err(Error::invalid(
                "noise file",
                format!(
                    "{} rows do not fill {n_sites} sites x {segments} segments",
                    entries.len()
                ),
            ));
        }
        let mut seqs = vec![vec![f64::NAN; segments]; n_sites];
        for (site, seg, v) in entries {
            seqs[site][seg] = v;
        }
        Self::from_sequences(seqs)
    }
}

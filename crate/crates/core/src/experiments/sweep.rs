use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DisorderMode, Observable, SweepConfig};
use crate::analysis::{efficiency_series, sink_fraction, transfer_time, transport_efficiency};
use crate::dynamics::{evolve_final, evolve_with, PiecewiseHamiltonian};
use crate::error::{Error, Result};
use crate::model::{apply_static_disorder_with, Hamiltonian};
use crate::noise::{NoiseConfig, NoiseKind, NoiseRealization};
use crate::rng::{derive_seed, stream_rng, DISORDER_STREAM};

/// Statistics of one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub parameter: f64,
    pub mean: f64,
    /// Sample standard deviation (zero for a single realization).
    pub std: f64,
    pub values: Vec<f64>,
}

impl PointSummary {
    pub fn from_values(parameter: f64, values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        PointSummary {
            parameter,
            mean,
            std,
            values,
        }
    }

    /// Standard error of the mean.
    pub fn sem(&self) -> f64 {
        self.std / (self.values.len() as f64).sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub parameter_name: String,
    pub points: Vec<PointSummary>,
    pub config_hash: String,
    pub seed: u64,
}

impl SweepResult {
    pub fn means(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.mean).collect()
    }

    pub fn parameters(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.parameter).collect()
    }

    /// Index of the largest mean (first one on ties).
    pub fn argmax_index(&self) -> usize {
        let mut best = 0;
        for (k, p) in self.points.iter().enumerate() {
            if p.mean > self.points[best].mean {
                best = k;
            }
        }
        best
    }

    pub fn argmax(&self) -> f64 {
        self.points[self.argmax_index()].parameter
    }

    pub fn point_at(&self, parameter: f64) -> Option<&PointSummary> {
        self.points
            .iter()
            .find(|p| (p.parameter - parameter).abs() < 1e-12)
    }
}

/// Seed of realization `r` at grid point `g`.
pub fn realization_seed(master: u64, g: usize, r: usize) -> u64 {
    derive_seed(master, &[g as u64, r as u64])
}

fn disorder_seed(cfg: &SweepConfig, g: usize, r: usize) -> u64 {
    match cfg.disorder {
        DisorderMode::Redraw => realization_seed(cfg.seed, g, r),
        DisorderMode::Fixed => derive_seed(cfg.seed, &[u64::MAX, r as u64]),
    }
}

/// Builds the piecewise Hamiltonian of one realization.
pub fn realization_hamiltonian(
    cfg: &SweepConfig,
    base: &Hamiltonian,
    noise: &NoiseConfig,
    g: usize,
    r: usize,
) -> Result<PiecewiseHamiltonian> {
    let mut h = base.clone();
    if cfg.disorder_gamma_per_mm > 0.0 {
        let mut rng = stream_rng(disorder_seed(cfg, g, r), DISORDER_STREAM);
        h = apply_static_disorder_with(&h, cfg.disorder_gamma_per_mm, &mut rng)?;
    }
    let detunings = NoiseConfig {
        seed: realization_seed(cfg.seed, g, r),
        ..noise.clone()
    }
    .generate(base.fmo_indices().len())?;
    Ok(PiecewiseHamiltonian::new(h, detunings, cfg.segment_length_mm)?.with_delta_c(cfg.delta_c))
}

/// Evaluates `obs` on a single realization.
pub fn observe(cfg: &SweepConfig, ph: &PiecewiseHamiltonian, obs: Observable) -> Result<f64> {
    let total = ph.total_length();
    match obs {
        Observable::EfficiencyAt { z_mm } if (z_mm - total).abs() < 1e-9 => {
            let sink = ph.base().sink_indices();
            if sink.is_empty() {
                return Err(Error::NoSink);
            }
            let psi = evolve_final(ph, cfg.propagator);
            Ok(cfg.efficiency_mode.weight()? * sink_fraction(&psi, &sink))
        }
        Observable::EfficiencyAt { z_mm } => {
            let tr = evolve_with(ph, cfg.fine_step_mm, cfg.propagator)?;
            transport_efficiency(&tr, cfg.efficiency_mode, z_mm)
        }
        Observable::WindowMeanEfficiency { z_max_mm } => {
            let tr = evolve_with(ph, cfg.fine_step_mm, cfg.propagator)?;
            let eta = efficiency_series(&tr, cfg.efficiency_mode)?;
            let picked: Vec<f64> = tr
                .z()
                .iter()
                .zip(&eta)
                .filter(|(z, _)| **z > 0.0 && **z <= z_max_mm + 1e-9)
                .map(|(_, e)| *e)
                .collect();
            if picked.is_empty() {
                return Err(Error::invalid("z_max_mm", "window contains no samples"));
            }
            Ok(picked.iter().sum::<f64>() / picked.len() as f64)
        }
        Observable::TransferTime { z_mm } => {
            let tr = evolve_with(ph, cfg.fine_step_mm, cfg.propagator)?;
            transfer_time(&tr, z_mm)
        }
    }
}

/// Runs `f(g, r)` over every grid point and realization in parallel and
/// collects results in grid-major order, independent of scheduling.
pub(crate) fn grid_map<T, F>(points: usize, realizations: usize, f: F) -> Result<Vec<Vec<T>>>
where
    T: Send,
    F: Fn(usize, usize) -> Result<T> + Sync,
{
    let flat: Vec<T> = (0..points * realizations)
        .into_par_iter()
        .map(|k| f(k / realizations, k % realizations))
        .collect::<Result<Vec<T>>>()?;
    let mut it = flat.into_iter();
    Ok((0..points)
        .map(|_| it.by_ref().take(realizations).collect())
        .collect())
}

/// Mean observable versus detuning amplitude.
pub fn sweep_dephasing(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let base = cfg.system.build()?;
    let values = grid_map(cfg.amplitudes_per_mm.len(), cfg.realizations, |g, r| {
        let noise = NoiseConfig {
            amplitude_per_mm: cfg.amplitudes_per_mm[g],
            ..cfg.noise.clone()
        };
        let ph = realization_hamiltonian(cfg, &base, &noise, g, r)?;
        observe(cfg, &ph, cfg.observable)
    })?;
    Ok(SweepResult {
        parameter_name: "amplitude_per_mm".into(),
        points: cfg
            .amplitudes_per_mm
            .iter()
            .zip(values)
            .map(|(&a, v)| PointSummary::from_values(a, v))
            .collect(),
        config_hash: cfg.hash(),
        seed: cfg.seed,
    })
}

pub const DEFAULT_SEGMENT_COUNTS: [usize; 5] = [10, 20, 40, 60, 80];

/// Efficiency at the full length when the chip is cut into each of `counts`
/// equal segments, at the first amplitude of `cfg`. The noise keeps its
/// sampling frequency, so its sequence length grows with the segment count.
pub fn segment_count_study(cfg: &SweepConfig, counts: &[usize]) -> Result<SweepResult> {
    cfg.validate()?;
    if counts.is_empty() || counts.contains(&0) {
        return Err(Error::invalid(
            "segment counts",
            "must be non-empty and positive",
        ));
    }
    let total = cfg.total_length();
    let amplitude = cfg.amplitudes_per_mm[0];
    let base = cfg.system.build()?;
    let values = grid_map(counts.len(), cfg.realizations, |g, r| {
        let n = counts[g];
        let noise = NoiseConfig {
            amplitude_per_mm: amplitude,
            segments: n,
            total_length_mm: cfg.noise.total_length_mm * n as f64 / cfg.noise.segments as f64,
            ..cfg.noise.clone()
        };
        let local = SweepConfig {
            segment_length_mm: total / n as f64,
            ..cfg.clone()
        };
        let ph = realization_hamiltonian(&local, &base, &noise, g, r)?;
        observe(
            &local,
            &ph,
            Observable::EfficiencyAt {
                z_mm: ph.total_length(),
            },
        )
    })?;
    Ok(SweepResult {
        parameter_name: "segments".into(),
        points: counts
            .iter()
            .zip(values)
            .map(|(&n, v)| PointSummary::from_values(n as f64, v))
            .collect(),
        config_hash: cfg.hash(),
        seed: cfg.seed,
    })
}

/// Sweep result and normalized-profile mean for one noise distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionCurve {
    pub kind: NoiseKind,
    pub sweep: SweepResult,
    /// Mean of the unit-amplitude profile over all realizations and sites.
    pub profile_mean: f64,
}

/// One amplitude sweep per noise kind, all other settings shared.
pub fn noise_distribution_comparison(
    cfg: &SweepConfig,
    kinds: &[NoiseKind],
) -> Result<Vec<DistributionCurve>> {
    kinds
        .iter()
        .map(|&kind| {
            let local = SweepConfig {
                noise: NoiseConfig {
                    kind,
                    normalization: None,
                    ..cfg.noise.clone()
                },
                ..cfg.clone()
            };
            let sweep = sweep_dephasing(&local)?;
            let profile_mean = profile_mean(&local)?;
            Ok(DistributionCurve {
                kind,
                sweep,
                profile_mean,
            })
        })
        .collect()
}

/// Mean of the unit-amplitude sequences the sweep would draw at grid point 0.
pub fn profile_mean(cfg: &SweepConfig) -> Result<f64> {
    let n_sites = cfg.system.build()?.fmo_indices().len();
    let profiles: Vec<NoiseRealization> = (0..cfg.realizations)
        .into_par_iter()
        .map(|r| {
            NoiseConfig {
                amplitude_per_mm: 1.0,
                seed: realization_seed(cfg.seed, 0, r),
                ..cfg.noise.clone()
            }
            .generate(n_sites)
        })
        .collect::<Result<_>>()?;
    let (sum, count) = profiles
        .iter()
        .flat_map(|p| p.sequences().iter().flatten())
        .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    Ok(sum / count as f64)
}

/// Spearman rank correlation (average ranks for ties).
pub fn rank_correlation(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::invalid(
            "rank correlation",
            "needs two equal-length series of length >= 2",
        ));
    }
    let rx = ranks(x);
    let ry = ranks(y);
    crate::analysis::linear_fit(&rx, &ry).map(|f| {
        let sign = f.slope.signum();
        sign * f.r_squared.sqrt()
    })
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

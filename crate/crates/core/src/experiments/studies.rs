use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{linear_grid, SweepConfig, SystemSpec};
use super::sweep::{grid_map, realization_hamiltonian, realization_seed};
use crate::analysis::{
    efficiency_series, eigen_site_distribution, fit_reorganization_law, ipr, psd_periodogram,
    reorganization_energy, variance, EigenSiteDistribution, LinearFitResult, PsdScaling,
    DEFAULT_NFFT,
};
use crate::dynamics::{evolve_with, site_probabilities};
use crate::error::{Error, Result};
use crate::model::{
    apply_static_disorder_with, build_fmo_hamiltonian, FmoSpec, VibrationalCoupling,
};
use crate::noise::{NoiseConfig, NoiseKind};
use crate::rng::{derive_seed, stream_rng, DISORDER_STREAM};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReorganizationConfig {
    /// Sequence template; amplitude and seed are replaced.
    pub noise: NoiseConfig,
    pub amplitudes_per_mm: Vec<f64>,
    pub realizations: usize,
    pub sites: usize,
    pub nfft: usize,
    pub seed: u64,
}

impl Default for ReorganizationConfig {
    fn default() -> Self {
        ReorganizationConfig {
            noise: NoiseConfig {
                kind: NoiseKind::Colored,
                segments: 20,
                total_length_mm: 20.0,
                ..NoiseConfig::default()
            },
            amplitudes_per_mm: linear_grid(0.0, 1.0, 11),
            realizations: 100,
            sites: 7,
            nfft: DEFAULT_NFFT,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReorganizationPoint {
    pub amplitude: f64,
    pub variance: f64,
    pub reorganization_energy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReorganizationResult {
    pub points: Vec<ReorganizationPoint>,
    /// sigma^2 against E^R over the points with nonzero amplitude.
    pub fit: LinearFitResult,
}

/// Ensemble-mean noise variance and reorganization energy per amplitude.
/// Every amplitude rescales the same unit-amplitude profiles.
pub fn reorganization_curve(cfg: &ReorganizationConfig) -> Result<ReorganizationResult> {
    if cfg.realizations == 0 || cfg.sites == 0 {
        return Err(Error::invalid(
            "realizations",
            "realizations and sites must be positive",
        ));
    }
    let fs = cfg.noise.sampling_frequency();
    // Per realization: unit-amplitude (variance, E^R) averaged over sites.
    let unit: Vec<(f64, f64)> = (0..cfg.realizations)
        .into_par_iter()
        .map(|r| {
            let nr = NoiseConfig {
                amplitude_per_mm: 1.0,
                seed: realization_seed(cfg.seed, 0, r),
                ..cfg.noise.clone()
            }
            .generate(cfg.sites)?;
            let mut v = 0.0;
            let mut e = 0.0;
            for seq in nr.sequences() {
                v += variance(seq)?;
                e += reorganization_energy(&psd_periodogram(
                    seq,
                    fs,
                    cfg.nfft,
                    PsdScaling::Density,
                )?)?;
            }
            Ok((v / cfg.sites as f64, e / cfg.sites as f64))
        })
        .collect::<Result<_>>()?;
    let n = unit.len() as f64;
    let v1 = unit.iter().map(|u| u.0).sum::<f64>() / n;
    let e1 = unit.iter().map(|u| u.1).sum::<f64>() / n;
    let points: Vec<ReorganizationPoint> = cfg
        .amplitudes_per_mm
        .iter()
        .map(|&a| ReorganizationPoint {
            amplitude: a,
            variance: a * a * v1,
            reorganization_energy: a * a * e1,
        })
        .collect();
    let fit_points: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.amplitude > 0.0)
        .map(|p| (p.variance, p.reorganization_energy))
        .collect();
    let fit = fit_reorganization_law(&fit_points)?;
    Ok(ReorganizationResult { points, fit })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VibrationalCase {
    pub amplitude: f64,
    /// Mean efficiency at every fine sample, with the eighth mode.
    pub with_mode: Vec<f64>,
    pub without_mode: Vec<f64>,
    /// Means of the two curves over 0 < z <= window.
    pub window_with: f64,
    pub window_without: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VibrationalResult {
    pub z: Vec<f64>,
    pub window_mm: f64,
    pub coupling_per_mm: f64,
    pub cases: Vec<VibrationalCase>,
}

/// Paired efficiency curves with and without the vibrational waveguide.
/// Both systems see identical detunings on the seven sites.
pub fn vibrational_comparison(
    cfg: &SweepConfig,
    coupling: VibrationalCoupling,
    window_mm: f64,
) -> Result<VibrationalResult> {
    cfg.validate()?;
    let without = SystemSpec {
        vibration: None,
        ..cfg.system.clone()
    };
    let with = SystemSpec {
        vibration: Some(coupling),
        ..cfg.system.clone()
    };
    let h_without = without.build()?;
    let h_with = with.build()?;
    let g = h_with
        .coupling(0, h_with.vibration_index().expect("mode attached"))
        .re;
    let curves = grid_map(cfg.amplitudes_per_mm.len(), cfg.realizations, |gi, r| {
        let noise = NoiseConfig {
            amplitude_per_mm: cfg.amplitudes_per_mm[gi],
            ..cfg.noise.clone()
        };
        let mut out = Vec::with_capacity(2);
        for base in [&h_with, &h_without] {
            let ph = realization_hamiltonian(cfg, base, &noise, gi, r)?;
            let tr = evolve_with(&ph, cfg.fine_step_mm, cfg.propagator)?;
            out.push((
                tr.z().to_vec(),
                efficiency_series(&tr, cfg.efficiency_mode)?,
            ));
        }
        Ok(out)
    })?;
    let z = curves[0][0][0].0.clone();
    let window: Vec<bool> = z
        .iter()
        .map(|&v| v > 0.0 && v <= window_mm + 1e-9)
        .collect();
    let count = window.iter().filter(|&&b| b).count().max(1) as f64;
    let cases = cfg
        .amplitudes_per_mm
        .iter()
        .zip(curves)
        .map(|(&a, reals)| {
            let mean_curve = |which: usize| -> Vec<f64> {
                let mut acc = vec![0.0; z.len()];
                for pair in &reals {
                    for (s, v) in acc.iter_mut().zip(&pair[which].1) {
                        *s += v;
                    }
                }
                acc.iter().map(|s| s / reals.len() as f64).collect()
            };
            let with_mode = mean_curve(0);
            let without_mode = mean_curve(1);
            let wmean = |c: &[f64]| {
                c.iter()
                    .zip(&window)
                    .filter(|(_, &b)| b)
                    .map(|(v, _)| v)
                    .sum::<f64>()
                    / count
            };
            VibrationalCase {
                amplitude: a,
                window_with: wmean(&with_mode),
                window_without: wmean(&without_mode),
                with_mode,
                without_mode,
            }
        })
        .collect();
    Ok(VibrationalResult {
        z,
        window_mm,
        coupling_per_mm: g,
        cases,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcitationCase {
    pub gamma: f64,
    pub amplitude: f64,
    /// Ensemble-mean renormalized seven-site probabilities, one row per sample.
    pub probabilities: Vec<Vec<f64>>,
    /// Most probable site (1-based) of the mean probabilities at each sample.
    pub most_probable_site: Vec<u8>,
    /// Per-site fraction of samples at which that site is the most
    /// probable, averaged over realizations.
    pub dwell_fraction: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcitationResult {
    pub z: Vec<f64>,
    pub cases: Vec<ExcitationCase>,
}

/// Renormalized seven-site probabilities for each `(gamma, amplitude)` case.
pub fn excitation_trace_study(cfg: &SweepConfig, cases: &[(f64, f64)]) -> Result<ExcitationResult> {
    if cases.is_empty() {
        return Err(Error::Empty("excitation cases"));
    }
    let base_cfg = SweepConfig {
        amplitudes_per_mm: vec![0.0],
        ..cfg.clone()
    };
    base_cfg.validate()?;
    let base = cfg.system.build()?;
    let fmo = base.fmo_indices();
    let runs = grid_map(cases.len(), cfg.realizations, |ci, r| {
        let (gamma, amp) = cases[ci];
        let local = SweepConfig {
            disorder_gamma_per_mm: gamma,
            ..base_cfg.clone()
        };
        let noise = NoiseConfig {
            amplitude_per_mm: amp,
            ..cfg.noise.clone()
        };
        let ph = realization_hamiltonian(&local, &base, &noise, ci, r)?;
        let tr = evolve_with(&ph, cfg.fine_step_mm, cfg.propagator)?;
        Ok((tr.z().to_vec(), site_probabilities(&tr, &fmo, true)?))
    })?;
    let z = runs[0][0].0.clone();
    let n_sites = fmo.len();
    let out = cases
        .iter()
        .zip(runs)
        .map(|(&(gamma, amplitude), reals)| {
            let rn = reals.len() as f64;
            let mut probabilities = vec![vec![0.0; n_sites]; z.len()];
            let mut dwell = vec![0.0; n_sites];
            for (_, p) in &reals {
                for (acc, row) in probabilities.iter_mut().zip(p) {
                    for (a, v) in acc.iter_mut().zip(row) {
                        *a += v / rn;
                    }
                    dwell[argmax(row)] += 1.0 / (rn * z.len() as f64);
                }
            }
            let most_probable_site = probabilities
                .iter()
                .map(|row| argmax(row) as u8 + 1)
                .collect();
            ExcitationCase {
                gamma,
                amplitude,
                probabilities,
                most_probable_site,
                dwell_fraction: dwell,
            }
        })
        .collect();
    Ok(ExcitationResult { z, cases: out })
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = i;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationPoint {
    pub gamma: f64,
    pub mean_ipr: f64,
    pub std_ipr: f64,
    /// Median over draws of the mean per-site maximum eigenstate weight.
    pub median_localization: f64,
}

/// IPR statistics of the seven-site block under static disorder.
pub fn localization_study(
    fmo: &FmoSpec,
    gammas: &[f64],
    draws: usize,
    seed: u64,
) -> Result<Vec<LocalizationPoint>> {
    if draws == 0 {
        return Err(Error::invalid("draws", "must be at least 1"));
    }
    let h7 = build_fmo_hamiltonian(fmo)?;
    let all: Vec<usize> = (0..h7.dim()).collect();
    let per = grid_map(gammas.len(), draws, |g, r| {
        let h = disorder_draw(&h7, gammas[g], seed, g, r)?;
        Ok((
            ipr(&h, &all)?,
            eigen_site_distribution(&h).localization_score(),
        ))
    })?;
    Ok(gammas
        .iter()
        .zip(per)
        .map(|(&gamma, v)| {
            let n = v.len() as f64;
            let mean = v.iter().map(|x| x.0).sum::<f64>() / n;
            let std = if v.len() > 1 {
                (v.iter().map(|x| (x.0 - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            let mut loc: Vec<f64> = v.iter().map(|x| x.1).collect();
            loc.sort_by(f64::total_cmp);
            let median = if loc.len() % 2 == 1 {
                loc[loc.len() / 2]
            } else {
                0.5 * (loc[loc.len() / 2 - 1] + loc[loc.len() / 2])
            };
            LocalizationPoint {
                gamma,
                mean_ipr: mean,
                std_ipr: std,
                median_localization: median,
            }
        })
        .collect())
}

fn disorder_draw(
    h7: &crate::model::Hamiltonian,
    gamma: f64,
    seed: u64,
    g: usize,
    r: usize,
) -> Result<crate::model::Hamiltonian> {
    let mut rng = stream_rng(derive_seed(seed, &[g as u64, r as u64]), DISORDER_STREAM);
    apply_static_disorder_with(h7, gamma, &mut rng)
}

/// Eigen-level site distributions of one disorder draw per `gamma`.
pub fn eigen_distribution_study(
    fmo: &FmoSpec,
    gammas: &[f64],
    seed: u64,
) -> Result<Vec<(f64, EigenSiteDistribution)>> {
    let h7 = build_fmo_hamiltonian(fmo)?;
    gammas
        .iter()
        .enumerate()
        .map(|(g, &gamma)| {
            Ok((
                gamma,
                eigen_site_distribution(&disorder_draw(&h7, gamma, seed, g, 0)?),
            ))
        })
        .collect()
}

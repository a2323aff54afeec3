//! Named studies with their default parameters, each writing its tables and
//! a manifest into an output directory.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{linear_grid, log_grid, SweepConfig};
use super::output::{write_json, write_manifest, write_sweep, write_table};
use super::studies::{
    eigen_distribution_study, excitation_trace_study, localization_study, reorganization_curve,
    vibrational_comparison, ReorganizationConfig,
};
use super::sweep::{
    noise_distribution_comparison, segment_count_study, sweep_dephasing, DEFAULT_SEGMENT_COUNTS,
};
use crate::dynamics::DeltaCCorrection;
use crate::error::{Error, Result};
use crate::model::{FmoSpec, VibrationalCoupling};
use crate::noise::{NoiseConfig, NoiseKind};

pub const FIGURE_IDS: [&str; 11] = [
    "fig3b", "fig3c", "fig4e", "figS3", "figS5", "figS6", "figS7", "figS8", "figS9", "figS15",
    "figS16",
];

/// Everything needed to rerun a named study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureRequest {
    pub figure: String,
    pub seed: u64,
    /// Overrides the study's default number of realizations.
    #[serde(default)]
    pub realizations: Option<usize>,
}

/// White-noise template: twenty 1 mm segments.
pub fn white_noise() -> NoiseConfig {
    NoiseConfig {
        kind: NoiseKind::UniformWhite,
        segments: 20,
        total_length_mm: 20.0,
        ..NoiseConfig::default()
    }
}

/// Amplitude sweep at zero disorder, 0 to 1 mm^-1 in 0.1 steps.
pub fn enaqt_sweep(noise: NoiseConfig, realizations: usize, seed: u64) -> SweepConfig {
    SweepConfig {
        noise,
        realizations,
        seed,
        ..SweepConfig::default()
    }
}

/// Disorder sweep on a log-spaced amplitude grid spanning 0.1 Gamma to 10 Gamma.
pub fn disorder_sweep(gamma: f64, realizations: usize, seed: u64) -> SweepConfig {
    SweepConfig {
        noise: white_noise(),
        amplitudes_per_mm: log_grid(0.1 * gamma, 10.0 * gamma, 31),
        disorder_gamma_per_mm: gamma,
        realizations,
        seed,
        ..SweepConfig::default()
    }
}

fn unknown(id: &str) -> Error {
    Error::invalid(
        "figure",
        format!(
            "unknown figure id `{id}`; valid ids: {}",
            FIGURE_IDS.join(", ")
        ),
    )
}

/// Runs the study behind `req.figure`, writing into `out`. Returns the
/// written files, manifest last.
pub fn reproduce(req: &FigureRequest, out: &Path) -> Result<Vec<PathBuf>> {
    let id = req.figure.as_str();
    if !FIGURE_IDS.contains(&id) {
        return Err(unknown(id));
    }
    let seed = req.seed;
    let r = |default: usize| req.realizations.unwrap_or(default);
    let mut files = Vec::new();
    match id {
        "fig3b" => {
            let cfg = ReorganizationConfig {
                realizations: r(100),
                seed,
                ..ReorganizationConfig::default()
            };
            let res = reorganization_curve(&cfg)?;
            files.push(write_table(
                &out.join("fig3b_reorganization.csv"),
                &["amplitude_per_mm", "variance", "reorganization_energy"],
                res.points
                    .iter()
                    .map(|p| vec![p.amplitude, p.variance, p.reorganization_energy]),
            )?);
            files.push(write_json(&out.join("fig3b_fit.json"), &res.fit)?);
        }
        "fig3c" | "figS5" => {
            let amps = if id == "fig3c" {
                vec![0.5]
            } else {
                linear_grid(0.0, 1.0, 6)
            };
            let cfg = SweepConfig {
                amplitudes_per_mm: amps,
                realizations: r(100),
                seed,
                ..SweepConfig::default()
            };
            let res = vibrational_comparison(&cfg, VibrationalCoupling::Auto, 5.0)?;
            for c in &res.cases {
                files.push(write_table(
                    &out.join(format!("{id}_amplitude_{:.1}.csv", c.amplitude)),
                    &["z_mm", "efficiency_with_mode", "efficiency_without_mode"],
                    res.z
                        .iter()
                        .zip(c.with_mode.iter().zip(&c.without_mode))
                        .map(|(z, (a, b))| vec![*z, *a, *b]),
                )?);
            }
            files.push(write_table(
                &out.join(format!("{id}_window.csv")),
                &[
                    "amplitude_per_mm",
                    "window_mean_with_mode",
                    "window_mean_without_mode",
                ],
                res.cases
                    .iter()
                    .map(|c| vec![c.amplitude, c.window_with, c.window_without]),
            )?);
        }
        "fig4e" => {
            for (name, noise) in [
                ("white", white_noise()),
                ("colored", SweepConfig::default().noise),
            ] {
                let res = sweep_dephasing(&enaqt_sweep(noise, r(100), seed))?;
                files.extend(write_sweep(out, &format!("fig4e_{name}"), &res)?);
            }
        }
        "figS3" => {
            for (name, dc) in [
                ("without_delta_c", None),
                ("with_delta_c", Some(DeltaCCorrection::default())),
            ] {
                let cfg = SweepConfig {
                    delta_c: dc,
                    ..enaqt_sweep(SweepConfig::default().noise, r(30), seed)
                };
                files.extend(write_sweep(
                    out,
                    &format!("figS3_{name}"),
                    &sweep_dephasing(&cfg)?,
                )?);
            }
        }
        "figS6" | "figS7" => {
            let cases: Vec<(f64, f64)> = if id == "figS6" {
                [0.0, 3.0, 6.0, 10.0].iter().map(|&g| (g, 0.0)).collect()
            } else {
                [0.1, 0.3, 0.5, 0.7, 1.0, 80.0]
                    .iter()
                    .map(|&a| (0.0, a))
                    .collect()
            };
            let cfg = SweepConfig {
                noise: white_noise(),
                realizations: r(20),
                seed,
                ..SweepConfig::default()
            };
            let res = excitation_trace_study(&cfg, &cases)?;
            for c in &res.cases {
                let name = format!("{id}_gamma_{}_amplitude_{}.csv", c.gamma, c.amplitude);
                files.push(write_table(
                    &out.join(name),
                    &[
                        "z_mm",
                        "p1",
                        "p2",
                        "p3",
                        "p4",
                        "p5",
                        "p6",
                        "p7",
                        "most_probable_site",
                    ],
                    res.z
                        .iter()
                        .zip(&c.probabilities)
                        .zip(&c.most_probable_site)
                        .map(|((z, p), s)| {
                            let mut row = vec![*z];
                            row.extend(p);
                            row.push(*s as f64);
                            row
                        }),
                )?);
            }
            files.push(write_table(
                &out.join(format!("{id}_dwell.csv")),
                &[
                    "gamma",
                    "amplitude",
                    "d1",
                    "d2",
                    "d3",
                    "d4",
                    "d5",
                    "d6",
                    "d7",
                ],
                res.cases.iter().map(|c| {
                    let mut row = vec![c.gamma, c.amplitude];
                    row.extend(&c.dwell_fraction);
                    row
                }),
            )?);
        }
        "figS8" => {
            let pts = localization_study(&FmoSpec::default(), &[0.0, 10.0, 100.0], r(1000), seed)?;
            files.push(write_table(
                &out.join("figS8a_ipr.csv"),
                &["gamma", "mean_ipr", "std_ipr", "median_localization"],
                pts.iter()
                    .map(|p| vec![p.gamma, p.mean_ipr, p.std_ipr, p.median_localization]),
            )?);
            let runs = [
                ("figS8b_gamma_0", enaqt_sweep(white_noise(), r(100), seed)),
                ("figS8c_gamma_10", disorder_sweep(10.0, r(100), seed)),
                ("figS8d_gamma_100", disorder_sweep(100.0, r(100), seed)),
            ];
            for (name, cfg) in runs {
                files.extend(write_sweep(out, name, &sweep_dephasing(&cfg)?)?);
            }
        }
        "figS9" => {
            for (gamma, d) in
                eigen_distribution_study(&FmoSpec::default(), &[0.0, 10.0, 100.0], seed)?
            {
                let n = d.eigenvalues.len();
                files.push(write_table(
                    &out.join(format!("figS9_gamma_{gamma}.csv")),
                    &["eigenvalue", "p1", "p2", "p3", "p4", "p5", "p6", "p7"],
                    (0..n).map(|a| {
                        let mut row = vec![d.eigenvalues[a]];
                        row.extend((0..n).map(|i| d.probabilities[(i, a)]));
                        row
                    }),
                )?);
            }
        }
        "figS15" => {
            let cfg = SweepConfig {
                amplitudes_per_mm: vec![0.5],
                realizations: r(100),
                seed,
                ..SweepConfig::default()
            };
            files.extend(write_sweep(
                out,
                "figS15_segments",
                &segment_count_study(&cfg, &DEFAULT_SEGMENT_COUNTS)?,
            )?);
        }
        "figS16" => {
            let cfg = SweepConfig {
                amplitudes_per_mm: linear_grid(0.0, 2.0, 21),
                realizations: r(100),
                seed,
                ..SweepConfig::default()
            };
            let curves = noise_distribution_comparison(&cfg, &NoiseKind::ALL)?;
            for c in &curves {
                files.extend(write_sweep(
                    out,
                    &format!("figS16_{}", c.kind.name()),
                    &c.sweep,
                )?);
            }
            files.push(write_table(
                &out.join("figS16_argmax.csv"),
                &["kind_index", "argmax_per_mm", "profile_mean"],
                curves
                    .iter()
                    .enumerate()
                    .map(|(k, c)| vec![k as f64, c.sweep.argmax(), c.profile_mean]),
            )?);
        }
        _ => return Err(unknown(id)),
    }
    files.push(write_manifest(out, id, req, seed, &files)?);
    Ok(files)
}

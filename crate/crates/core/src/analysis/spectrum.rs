use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_NFFT: usize = 128;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsdScaling {
    /// J_k = |X_k|^2 / (n f_s): the Fourier transform of the correlation
    /// function, so that (1/pi) * integral_0^pi*f_s J dw equals the variance.
    #[default]
    Density,
    /// J_k = |X_k|^2.
    Raw,
}

/// One-sided periodogram on angular frequencies w_k = 2 pi k f_s / nfft,
/// k = 0..=nfft/2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEstimate {
    pub frequencies: Vec<f64>,
    pub density: Vec<f64>,
    pub sampling_frequency: f64,
    pub nfft: usize,
    pub scaling: PsdScaling,
    pub site: Option<usize>,
}

impl SpectrumEstimate {
    pub fn delta_omega(&self) -> f64 {
        2.0 * PI * self.sampling_frequency / self.nfft as f64
    }

    /// (1/pi) sum_k w_k J_k dw with half weights on the DC and Nyquist bins.
    /// Equals the sample variance under density scaling.
    pub fn total_power(&self) -> f64 {
        let last = self.density.len() - 1;
        let s: f64 = self
            .density
            .iter()
            .enumerate()
            .map(|(k, j)| if k == 0 || k == last { 0.5 * j } else { *j })
            .sum();
        s * self.delta_omega() / PI
    }

    /// Index of the largest bin.
    pub fn peak_bin(&self) -> usize {
        self.density
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, &j)| {
                if j > best.1 {
                    (k, j)
                } else {
                    best
                }
            })
            .0
    }

    /// Densities divided by their maximum.
    pub fn normalized_by_max(&self) -> Vec<f64> {
        let max = self.density.iter().copied().fold(0.0, f64::max);
        if max == 0.0 {
            return vec![0.0; self.density.len()];
        }
        self.density.iter().map(|j| j / max).collect()
    }
}

/// Rectangular-window periodogram of the mean-removed `seq`, zero-padded to
/// `nfft` (a power of two no shorter than the sequence).
pub fn psd_periodogram(
    seq: &[f64],
    fs: f64,
    nfft: usize,
    scaling: PsdScaling,
) -> Result<SpectrumEstimate> {
    let n = seq.len();
    if n == 0 {
        return Err(Error::Empty("sequence"));
    }
    if !nfft.is_power_of_two() || nfft < 2 {
        return Err(Error::invalid(
            "nfft",
            format!("{nfft} is not a power of two"),
        ));
    }
    if n > nfft {
        return Err(Error::invalid(
            "nfft",
            format!("{nfft} is shorter than the sequence ({n})"),
        ));
    }
    if !(fs > 0.0) || !fs.is_finite() {
        return Err(Error::invalid("sampling_frequency", "must be positive"));
    }
    let mean = seq.iter().sum::<f64>() / n as f64;
    let mut buf: Vec<Complex64> = seq.iter().map(|x| Complex64::new(x - mean, 0.0)).collect();
    buf.resize(nfft, Complex64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(nfft).process(&mut buf);
    let scale = match scaling {
        PsdScaling::Density => 1.0 / (n as f64 * fs),
        PsdScaling::Raw => 1.0,
    };
    let bins = nfft / 2 + 1;
    let dw = 2.0 * PI * fs / nfft as f64;
    Ok(SpectrumEstimate {
        frequencies: (0..bins).map(|k| k as f64 * dw).collect(),
        density: buf[..bins].iter().map(|x| x.norm_sqr() * scale).collect(),
        sampling_frequency: fs,
        nfft,
        scaling,
        site: None,
    })
}

/// E^R = (1/pi) sum_{w_k > 0} J(w_k) / w_k * dw.
pub fn reorganization_energy(spec: &SpectrumEstimate) -> Result<f64> {
    if spec.density.is_empty() {
        return Err(Error::Empty("spectrum"));
    }
    let dw = if spec.frequencies.len() > 1 {
        spec.frequencies[1] - spec.frequencies[0]
    } else {
        spec.delta_omega()
    };
    let s: f64 = spec
        .frequencies
        .iter()
        .zip(&spec.density)
        .filter(|(w, _)| **w > 0.0)
        .map(|(w, j)| j / w)
        .sum();
    Ok(s * dw / PI)
}

/// Ordinary least squares y = slope * x + intercept.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFitResult> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::invalid(
            "points",
            "at least three points are required",
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::invalid(
            "points",
            "degenerate fit: an axis is constant",
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    let r_squared = (1.0 - ss_res / syy).clamp(0.0, 1.0);
    Ok(LinearFitResult {
        slope,
        intercept,
        r_squared,
    })
}

/// Fits sigma^2 = slope * E^R + intercept to `(sigma^2, E^R)` points. The
/// slope plays the role of 2 k_B T.
pub fn fit_reorganization_law(points: &[(f64, f64)]) -> Result<LinearFitResult> {
    let er: Vec<f64> = points.iter().map(|p| p.1).collect();
    let var: Vec<f64> = points.iter().map(|p| p.0).collect();
    linear_fit(&er, &var)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::variance;

    #[test]
    fn parseval_density() {
        let x: Vec<f64> = (0..50).map(|t| ((t * 7919) % 101) as f64 / 101.0).collect();
        let s = psd_periodogram(&x, 0.5, 128, PsdScaling::Density).unwrap();
        assert!((s.total_power() - variance(&x).unwrap()).abs() < 1e-12);
        assert_eq!(s.frequencies.len(), 65);
        assert!((s.frequencies[64] - PI * 0.5).abs() < 1e-15);
    }

    #[test]
    fn cosine_single_bin() {
        let n = 128;
        let x: Vec<f64> = (0..n)
            .map(|t| (2.0 * PI * 5.0 * t as f64 / n as f64).cos())
            .collect();
        let s = psd_periodogram(&x, 1.0, 128, PsdScaling::Raw).unwrap();
        assert_eq!(s.peak_bin(), 5);
        for (k, j) in s.density.iter().enumerate() {
            if k != 5 {
                assert!(*j < 1e-10 * s.density[5]);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(psd_periodogram(&[], 1.0, 128, PsdScaling::Density).is_err());
        assert!(psd_periodogram(&[1.0; 10], 1.0, 100, PsdScaling::Density).is_err());
        assert!(psd_periodogram(&[1.0; 200], 1.0, 128, PsdScaling::Density).is_err());
    }

    #[test]
    fn reorganization_single_bin() {
        let spec = SpectrumEstimate {
            frequencies: vec![0.0, 1.0],
            density: vec![5.0, PI],
            sampling_frequency: 1.0,
            nfft: 2,
            scaling: PsdScaling::Density,
            site: None,
        };
        assert!((reorganization_energy(&spec).unwrap() - 1.0).abs() < 1e-15);
        let zero = SpectrumEstimate {
            density: vec![0.0, 0.0],
            ..spec
        };
        assert_eq!(reorganization_energy(&zero).unwrap(), 0.0);
    }

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 2.5).abs() < 1e-12);
        assert!((f.intercept + 1.0).abs() < 1e-12);
        assert_eq!(f.r_squared, 1.0);
        assert!(linear_fit(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(linear_fit(&[1.0, 2.0], &[1.0, 2.0]).is_err());
    }
}

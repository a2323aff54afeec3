//! Single-excitation evolution under a piecewise-constant Hamiltonian.

pub mod chebyshev;

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt_f64;
use crate::linalg::{self, HermitianEigen, HERMITIAN_TOL};
use crate::model::{effective_coupling, Hamiltonian, SiteRole};
use crate::noise::NoiseRealization;
use chebyshev::SparseHermitian;

pub const DEFAULT_SEGMENT_LENGTH_MM: f64 = 1.0;
/// Fine sampling step: twenty samples per 1 mm segment.
pub const DEFAULT_FINE_STEP_MM: f64 = 0.05;

/// How a segment's exp(-i H dz) is applied.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Propagator {
    /// Dense Hermitian eigendecomposition.
    #[default]
    Eigen,
    /// Chebyshev series on the sparse matrix.
    Chebyshev,
}

/// Which detuning feeds the coupling correction of a pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaCMode {
    /// Mean of the two sites' detunings.
    #[default]
    MeanDetuning,
    /// Difference of the two sites' detunings (coupler mismatch).
    Mismatch,
}

/// Replaces each strong FMO-FMO coupling C by C_eff = sqrt((db/2)^2 + C^2)
/// during every segment, keeping its phase.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeltaCCorrection {
    pub mode: DeltaCMode,
    /// Pairs weaker than this (mm^-1) are left untouched.
    pub min_coupling_per_mm: f64,
}

impl Default for DeltaCCorrection {
    fn default() -> Self {
        DeltaCCorrection {
            mode: DeltaCMode::MeanDetuning,
            min_coupling_per_mm: 0.21,
        }
    }
}

/// H_eff during segment s = base + diag(detunings(s)) on the FMO sites.
#[derive(Clone, Debug)]
pub struct PiecewiseHamiltonian {
    base: Hamiltonian,
    detunings: NoiseRealization,
    segment_length_mm: f64,
    delta_c: Option<DeltaCCorrection>,
    fmo: Vec<usize>,
}

impl PiecewiseHamiltonian {
    pub fn new(
        base: Hamiltonian,
        detunings: NoiseRealization,
        segment_length_mm: f64,
    ) -> Result<Self> {
        let fmo = base.fmo_indices();
        if detunings.n_sites() != fmo.len() {
            return Err(Error::Dimension {
                expected: fmo.len(),
                actual: detunings.n_sites(),
            });
        }
        if detunings.segments() == 0 {
            return Err(Error::Empty("detuning segments"));
        }
        if !(segment_length_mm > 0.0) || !segment_length_mm.is_finite() {
            return Err(Error::invalid("segment_length_mm", "must be positive"));
        }
        Ok(PiecewiseHamiltonian {
            base,
            detunings,
            segment_length_mm,
            delta_c: None,
            fmo,
        })
    }

    /// Static Hamiltonian over `total_length_mm` in a single segment.
    pub fn constant(base: Hamiltonian, total_length_mm: f64) -> Result<Self> {
        let n = base.fmo_indices().len();
        Self::new(base, NoiseRealization::zeros(n, 1), total_length_mm)
    }

    pub fn with_delta_c(mut self, correction: Option<DeltaCCorrection>) -> Self {
        self.delta_c = correction;
        self
    }

    pub fn base(&self) -> &Hamiltonian {
        &self.base
    }

    pub fn detunings(&self) -> &NoiseRealization {
        &self.detunings
    }

    pub fn segments(&self) -> usize {
        self.detunings.segments()
    }

    pub fn segment_length(&self) -> f64 {
        self.segment_length_mm
    }

    pub fn total_length(&self) -> f64 {
        self.segments() as f64 * self.segment_length_mm
    }

    pub fn segment_matrix(&self, s: usize) -> DMatrix<Complex64> {
        let mut m = self.base.matrix().clone();
        let shifts = self.detunings.segment(s);
        for (&i, &d) in self.fmo.iter().zip(&shifts) {
            m[(i, i)].re += d;
        }
        if let Some(corr) = self.delta_c {
            for (a, &i) in self.fmo.iter().enumerate() {
                for (b, &j) in self.fmo.iter().enumerate().skip(a + 1) {
                    let c = self.base.coupling(i, j);
                    let c0 = c.norm();
                    if c0 == 0.0 || c0 < corr.min_coupling_per_mm {
                        continue;
                    }
                    let db = match corr.mode {
                        DeltaCMode::MeanDetuning => 0.5 * (shifts[a] + shifts[b]),
                        DeltaCMode::Mismatch => shifts[a] - shifts[b],
                    };
                    let ceff = effective_coupling(c0, db).expect("c0 > 0 checked above");
                    let v = c * (ceff / c0);
                    m[(i, j)] = v;
                    m[(j, i)] = v.conj();
                }
            }
        }
        m
    }

    pub fn segment_hamiltonian(&self, s: usize) -> Result<Hamiltonian> {
        Hamiltonian::new(
            self.segment_matrix(s),
            self.base.roles().to_vec(),
            self.base.source(),
            self.base.drain(),
        )
    }

    fn initial_state(&self) -> DVector<Complex64> {
        let mut psi = DVector::from_element(self.base.dim(), Complex64::new(0.0, 0.0));
        psi[self.base.source()] = Complex64::new(1.0, 0.0);
        psi
    }

    fn fine_steps_per_segment(&self, fine_step: f64) -> Result<usize> {
        if !(fine_step > 0.0) || fine_step > self.segment_length_mm * (1.0 + 1e-12) {
            return Err(Error::invalid(
                "fine_step",
                format!("{fine_step} mm must lie in (0, {}]", self.segment_length_mm),
            ));
        }
        let m = (self.segment_length_mm / fine_step).round();
        if (m * fine_step - self.segment_length_mm).abs() > 1e-9 * self.segment_length_mm {
            return Err(Error::invalid(
                "fine_step",
                format!(
                    "{fine_step} mm does not divide the {} mm segment",
                    self.segment_length_mm
                ),
            ));
        }
        Ok(m as usize)
    }
}

/// exp(-i H dz) from the spectral decomposition of `h`.
pub fn segment_propagator(h: &DMatrix<Complex64>, dz: f64) -> Result<DMatrix<Complex64>> {
    if h.nrows() != h.ncols() {
        return Err(Error::Shape {
            expected: h.nrows(),
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    if !(dz >= 0.0) {
        return Err(Error::invalid("dz", "must be non-negative"));
    }
    let deviation = linalg::max_hermitian_deviation(h);
    if deviation >= HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(HermitianEigen::new(h).unitary(dz))
}

/// Amplitudes sampled every fine step from z = 0 to the full length.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionTrace {
    z: Vec<f64>,
    amplitudes: Vec<DVector<Complex64>>,
    roles: Vec<SiteRole>,
    source: usize,
    fine_step: f64,
}

impl EvolutionTrace {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn fine_step(&self) -> f64 {
        self.fine_step
    }

    pub fn roles(&self) -> &[SiteRole] {
        &self.roles
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn amplitude(&self, j: usize) -> &DVector<Complex64> {
        &self.amplitudes[j]
    }

    pub fn amplitudes(&self) -> &[DVector<Complex64>] {
        &self.amplitudes
    }

    pub fn probabilities(&self, j: usize) -> Vec<f64> {
        self.amplitudes[j].iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn indices_where(&self, pred: impl Fn(SiteRole) -> bool) -> Vec<usize> {
        self.roles
            .iter()
            .enumerate()
            .filter(|(_, r)| pred(**r))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn fmo_indices(&self) -> Vec<usize> {
        self.indices_where(SiteRole::is_fmo)
    }

    pub fn sink_indices(&self) -> Vec<usize> {
        self.indices_where(SiteRole::is_sink)
    }

    /// Sample index for distance `z`, which must lie on the grid.
    pub fn index_of(&self, z: f64) -> Result<usize> {
        let j = (z / self.fine_step).round();
        if j < 0.0 || j as usize >= self.len() || (j * self.fine_step - z).abs() > 1e-9 {
            return Err(Error::invalid(
                "z",
                format!("{z} mm is not on the sampling grid"),
            ));
        }
        Ok(j as usize)
    }

    /// Builds a trace from raw samples; `amplitudes[j]` is taken at `j * fine_step`.
    pub fn from_samples(
        amplitudes: Vec<DVector<Complex64>>,
        roles: Vec<SiteRole>,
        source: usize,
        fine_step: f64,
    ) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Empty("trace"));
        }
        if let Some(bad) = amplitudes.iter().find(|a| a.len() != roles.len()) {
            return Err(Error::Dimension {
                expected: roles.len(),
                actual: bad.len(),
            });
        }
        let z = (0..amplitudes.len())
            .map(|j| j as f64 * fine_step)
            .collect();
        Ok(EvolutionTrace {
            z,
            amplitudes,
            roles,
            source,
            fine_step,
        })
    }

    /// Columns `z, site_index, re, im, probability`, every `stride`-th sample
    /// (the final sample is always included). Site indices are 1-based.
    pub fn write_csv<W: Write>(&self, writer: W, stride: usize) -> Result<()> {
        let stride = stride.max(1);
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["z", "site_index", "re", "im", "probability"])?;
        let last = self.len() - 1;
        for j in (0..self.len()).filter(|j| j % stride == 0 || *j == last) {
            for (i, a) in self.amplitudes[j].iter().enumerate() {
                w.write_record([
                    fmt_f64(self.z[j]),
                    (i + 1).to_string(),
                    fmt_f64(a.re),
                    fmt_f64(a.im),
                    fmt_f64(a.norm_sqr()),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Evolves the unit excitation at the source site, recording every fine step.
pub fn evolve(ph: &PiecewiseHamiltonian, fine_step: f64) -> Result<EvolutionTrace> {
    evolve_with(ph, fine_step, Propagator::Eigen)
}

pub fn evolve_with(
    ph: &PiecewiseHamiltonian,
    fine_step: f64,
    method: Propagator,
) -> Result<EvolutionTrace> {
    let m = ph.fine_steps_per_segment(fine_step)?;
    let dz = ph.segment_length() / m as f64;
    let mut psi = ph.initial_state();
    let mut amplitudes = Vec::with_capacity(ph.segments() * m + 1);
    amplitudes.push(psi.clone());
    for s in 0..ph.segments() {
        let h = ph.segment_matrix(s);
        match method {
            Propagator::Eigen => {
                let eig = HermitianEigen::new(&h);
                let c = eig.to_eigenbasis(&psi);
                for k in 1..=m {
                    amplitudes.push(eig.evolve_coefficients(&c, k as f64 * dz));
                }
            }
            Propagator::Chebyshev => {
                let sparse = SparseHermitian::from_dense(&h);
                let mut cur = psi.clone();
                for _ in 0..m {
                    cur = sparse.propagate(&cur, dz);
                    amplitudes.push(cur.clone());
                }
            }
        }
        psi = amplitudes.last().expect("non-empty").clone();
    }
    let base = ph.base();
    EvolutionTrace::from_samples(amplitudes, base.roles().to_vec(), base.source(), dz)
}

/// State at the end of the last segment without recording intermediate samples.
pub fn evolve_final(ph: &PiecewiseHamiltonian, method: Propagator) -> DVector<Complex64> {
    let mut psi = ph.initial_state();
    let dz = ph.segment_length();
    for s in 0..ph.segments() {
        let h = ph.segment_matrix(s);
        psi = match method {
            Propagator::Eigen => HermitianEigen::new(&h).propagate(&psi, dz),
            Propagator::Chebyshev => SparseHermitian::from_dense(&h).propagate(&psi, dz),
        };
    }
    psi
}

/// p_i(z_j) = |psi_i(z_j)|^2 for `subset`, optionally renormalized so each
/// row sums to one. Rows follow the trace samples, columns follow `subset`.
pub fn site_probabilities(
    tr: &EvolutionTrace,
    subset: &[usize],
    renormalize: bool,
) -> Result<Vec<Vec<f64>>> {
    if subset.is_empty() {
        return Err(Error::Empty("site subset"));
    }
    let dim = tr.roles().len();
    if let Some(&bad) = subset.iter().find(|&&i| i >= dim) {
        return Err(Error::invalid(
            "site subset",
            format!("index {bad} out of range for dimension {dim}"),
        ));
    }
    tr.amplitudes()
        .iter()
        .zip(tr.z())
        .map(|(psi, &z)| {
            let row: Vec<f64> = subset.iter().map(|&i| psi[i].norm_sqr()).collect();
            if !renormalize {
                return Ok(row);
            }
            let total: f64 = row.iter().sum();
            if total <= 0.0 {
                return Err(Error::ZeroSubsetProbability { z_mm: z });
            }
            Ok(row.into_iter().map(|p| p / total).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{attach_sink, build_fmo_hamiltonian, FmoSpec};
    use crate::noise::{NoiseConfig, NoiseKind};

    fn two_mode(c: f64) -> Hamiltonian {
        Hamiltonian::from_real(DMatrix::from_row_slice(2, 2, &[0.0, c, c, 0.0]), 0, 1).unwrap()
    }

    fn noisy_system(amp: f64, seed: u64) -> PiecewiseHamiltonian {
        let h = attach_sink(
            &build_fmo_hamiltonian(&FmoSpec::default()).unwrap(),
            20,
            0.6,
            0.7,
        )
        .unwrap();
        let noise = NoiseConfig {
            kind: NoiseKind::UniformWhite,
            amplitude_per_mm: amp,
            seed,
            ..NoiseConfig::default()
        }
        .generate(7)
        .unwrap();
        PiecewiseHamiltonian::new(h, noise, 1.0).unwrap()
    }

    #[test]
    fn zero_length_propagator_is_identity() {
        let u = segment_propagator(two_mode(0.8).matrix(), 0.0).unwrap();
        assert!((u - DMatrix::identity(2, 2)).norm() < 1e-15);
    }

    #[test]
    fn rabi_transfer() {
        let c = 0.8;
        for dz in [0.1, 0.7, 2.3] {
            let u = segment_propagator(two_mode(c).matrix(), dz).unwrap();
            assert!((u[(1, 0)].norm_sqr() - (c * dz).sin().powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn propagator_rejects_non_hermitian() {
        let m =
            DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]).map(|x| Complex64::new(x, 0.0));
        assert!(matches!(
            segment_propagator(&m, 1.0),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn zero_hamiltonian_is_static() {
        let h = Hamiltonian::from_real(DMatrix::zeros(3, 3), 1, 0).unwrap();
        let ph = PiecewiseHamiltonian::new(h, NoiseRealization::zeros(3, 4), 1.0).unwrap();
        let tr = evolve(&ph, 0.25).unwrap();
        assert_eq!(tr.len(), 17);
        for a in tr.amplitudes() {
            assert_eq!(a[1], Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn fine_step_must_divide_segment() {
        let ph = noisy_system(0.5, 1);
        assert!(evolve(&ph, 1.5).is_err());
        assert!(evolve(&ph, 0.3).is_err());
        assert!(evolve(&ph, 0.0).is_err());
    }

    #[test]
    fn norm_and_grid() {
        let ph = noisy_system(1.0, 3);
        let tr = evolve(&ph, DEFAULT_FINE_STEP_MM).unwrap();
        assert_eq!(tr.len(), 401);
        assert!((tr.z()[400] - 20.0).abs() < 1e-12);
        for a in tr.amplitudes() {
            assert!((a.norm() - 1.0).abs() < 1e-9);
        }
        assert_eq!(tr.probabilities(0)[5], 1.0);
    }

    #[test]
    fn chebyshev_matches_eigen() {
        let ph = noisy_system(1.0, 4);
        let a = evolve_with(&ph, 0.25, Propagator::Eigen).unwrap();
        let b = evolve_with(&ph, 0.25, Propagator::Chebyshev).unwrap();
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < 1e-10);
        }
        let f = evolve_final(&ph, Propagator::Chebyshev);
        assert!((&f - a.amplitudes().last().unwrap()).norm() < 1e-10);
    }

    #[test]
    fn delta_c_raises_strong_couplings() {
        let ph = noisy_system(1.0, 5).with_delta_c(Some(DeltaCCorrection::default()));
        let m = ph.segment_matrix(0);
        let base = ph.base().matrix();
        assert!(m[(0, 1)].norm() > base[(0, 1)].norm());
        assert_eq!(m[(0, 1)].re.signum(), base[(0, 1)].re.signum());
        // Weak pair (1,3) untouched; sink chain untouched.
        assert_eq!(m[(0, 2)], base[(0, 2)]);
        assert_eq!(m[(2, 7)], base[(2, 7)]);
        assert!(ph.segment_hamiltonian(0).is_ok());
    }

    #[test]
    fn renormalized_probabilities() {
        let ph = noisy_system(0.5, 6);
        let tr = evolve(&ph, 0.5).unwrap();
        let fmo: Vec<usize> = (0..7).collect();
        let p = site_probabilities(&tr, &fmo, true).unwrap();
        for row in &p {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let all: Vec<usize> = (0..tr.roles().len()).collect();
        for row in site_probabilities(&tr, &all, false).unwrap() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        assert!(site_probabilities(&tr, &[], false).is_err());
    }

    #[test]
    fn renormalization_rejects_empty_subset_mass() {
        let h = Hamiltonian::from_real(DMatrix::zeros(2, 2), 0, 1).unwrap();
        let ph = PiecewiseHamiltonian::constant(h, 1.0).unwrap();
        let tr = evolve(&ph, 0.5).unwrap();
        assert!(matches!(
            site_probabilities(&tr, &[1], true),
            Err(Error::ZeroSubsetProbability { .. })
        ));
    }

    #[test]
    fn trace_csv_stride() {
        let ph = noisy_system(0.2, 7);
        let tr = evolve(&ph, 0.5).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf, 10).unwrap();
        let text = String::from_utf8(buf).unwrap();
        // Samples 0, 10, 20, 30, 40 with 27 sites each plus header.
        assert_eq!(text.lines().count(), 1 + 5 * 27);
    }
}

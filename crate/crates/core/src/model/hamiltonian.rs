use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, HermitianEigen, HERMITIAN_TOL};

/// What a basis index of a [`Hamiltonian`] represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "role", content = "index")]
pub enum SiteRole {
    /// FMO chromophore, numbered 1..=7 as in the usual BChl labelling.
    FmoSite(u8),
    /// Sink waveguide, numbered from 1 starting next to the drain site.
    Sink(usize),
    Vibration,
}

impl SiteRole {
    pub fn is_fmo(self) -> bool {
        matches!(self, SiteRole::FmoSite(_))
    }

    pub fn is_sink(self) -> bool {
        matches!(self, SiteRole::Sink(_))
    }
}

/// A dense Hermitian single-excitation Hamiltonian in mm^-1 with labelled
/// basis indices.
///
/// `source` and `drain` are zero-based indices into the matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    matrix: DMatrix<Complex64>,
    roles: Vec<SiteRole>,
    source: usize,
    drain: usize,
}

impl Hamiltonian {
    pub fn new(
        matrix: DMatrix<Complex64>,
        roles: Vec<SiteRole>,
        source: usize,
        drain: usize,
    ) -> Result<Self> {
        let n = roles.len();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Shape {
                expected: n,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        if n == 0 {
            return Err(Error::Empty("Hamiltonian"));
        }
        if source >= n || drain >= n {
            return Err(Error::invalid(
                "source/drain",
                format!("indices ({source}, {drain}) out of range for dimension {n}"),
            ));
        }
        let deviation = linalg::max_hermitian_deviation(&matrix);
        if deviation >= HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let mut matrix = matrix;
        for i in 0..n {
            matrix[(i, i)].im = 0.0;
        }
        let h = Hamiltonian {
            matrix,
            roles,
            source,
            drain,
        };
        if let Some(first_sink) = h.sink_indices().first().copied() {
            if h.matrix[(drain, first_sink)] == Complex64::new(0.0, 0.0) {
                return Err(Error::invalid(
                    "drain",
                    "drain site is not coupled to the first sink waveguide",
                ));
            }
        }
        Ok(h)
    }

    /// Real symmetric matrix with plain FMO site roles 1..=n.
    pub fn from_real(matrix: DMatrix<f64>, source: usize, drain: usize) -> Result<Self> {
        let n = matrix.nrows();
        let roles = (1..=n).map(|k| SiteRole::FmoSite(k as u8)).collect();
        Self::new(matrix.map(|x| Complex64::new(x, 0.0)), roles, source, drain)
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn roles(&self) -> &[SiteRole] {
        &self.roles
    }

    pub fn dim(&self) -> usize {
        self.roles.len()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn drain(&self) -> usize {
        self.drain
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        self.matrix[(i, i)].re
    }

    pub fn coupling(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn fmo_indices(&self) -> Vec<usize> {
        self.indices_where(SiteRole::is_fmo)
    }

    pub fn sink_indices(&self) -> Vec<usize> {
        self.indices_where(SiteRole::is_sink)
    }

    pub fn vibration_index(&self) -> Option<usize> {
        self.roles.iter().position(|r| *r == SiteRole::Vibration)
    }

    /// Index of FMO site `site` (1-based label), if present.
    pub fn fmo_index(&self, site: u8) -> Option<usize> {
        self.roles
            .iter()
            .position(|r| *r == SiteRole::FmoSite(site))
    }

    fn indices_where(&self, pred: impl Fn(SiteRole) -> bool) -> Vec<usize> {
        self.roles
            .iter()
            .enumerate()
            .filter(|(_, r)| pred(**r))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_real(&self) -> bool {
        linalg::is_real(&self.matrix)
    }

    pub fn eigen(&self) -> HermitianEigen {
        HermitianEigen::new(&self.matrix)
    }

    /// Returns a copy with `shift[k]` added to diagonal entry `indices[k]`.
    pub fn with_diagonal_shifts(&self, indices: &[usize], shifts: &[f64]) -> Self {
        let mut out = self.clone();
        for (&i, &s) in indices.iter().zip(shifts) {
            out.matrix[(i, i)].re += s;
        }
        out
    }

    /// Adds `c` to every diagonal entry.
    pub fn shifted(&self, c: f64) -> Self {
        let mut out = self.clone();
        for i in 0..out.dim() {
            out.matrix[(i, i)].re += c;
        }
        out
    }

    /// Principal submatrix on `indices`, keeping roles. Source and drain are
    /// remapped when they fall inside the block and otherwise default to the
    /// first index.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Empty("site subset"));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.dim()) {
            return Err(Error::invalid(
                "site subset",
                format!("index {bad} out of range for dimension {}", self.dim()),
            ));
        }
        let m = DMatrix::from_fn(indices.len(), indices.len(), |a, b| {
            self.matrix[(indices[a], indices[b])]
        });
        let roles = indices.iter().map(|&i| self.roles[i]).collect();
        let remap = |x: usize| indices.iter().position(|&i| i == x).unwrap_or(0);
        // Dropping the sink rows also drops the drain coupling requirement.
        let mut h = Hamiltonian {
            matrix: m,
            roles,
            source: remap(self.source),
            drain: remap(self.drain),
        };
        if !h.sink_indices().is_empty() {
            h = Hamiltonian::new(h.matrix, h.roles, h.source, h.drain)?;
        }
        Ok(h)
    }

    /// The FMO-site block (no sink, no vibration).
    pub fn fmo_block(&self) -> Result<Self> {
        self.restrict(&self.fmo_indices())
    }

    pub fn max_hermitian_deviation(&self) -> f64 {
        linalg::max_hermitian_deviation(&self.matrix)
    }
}

/// Difference between the two smallest eigenvalues, in mm^-1. Zero for
/// one-dimensional input.
pub fn lowest_eigengap(h: &Hamiltonian) -> f64 {
    let eig = h.eigen();
    let v = eig.values();
    if v.len() < 2 {
        0.0
    } else {
        (v[1] - v[0]).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gap_of_diagonal_matrix() {
        let h = Hamiltonian::from_real(DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.54]), 0, 1)
            .unwrap();
        assert!((lowest_eigengap(&h) - 1.54).abs() < 1e-14);
    }

    #[test]
    fn gap_of_two_mode_coupler() {
        for c in [0.3, -1.2, 2.5] {
            let h = Hamiltonian::from_real(DMatrix::from_row_slice(2, 2, &[0.0, c, c, 0.0]), 0, 1)
                .unwrap();
            assert!((lowest_eigengap(&h) - 2.0 * f64::abs(c)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(
            Hamiltonian::from_real(m, 0, 1),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn restrict_keeps_roles() {
        let m = DMatrix::from_fn(3, 3, |i, j| if i == j { i as f64 } else { 0.1 });
        let h = Hamiltonian::from_real(m, 2, 0).unwrap();
        let sub = h.restrict(&[0, 2]).unwrap();
        assert_eq!(sub.roles(), &[SiteRole::FmoSite(1), SiteRole::FmoSite(3)]);
        assert_eq!(sub.source(), 1);
        assert_eq!(sub.diagonal(1), 2.0);
    }
}

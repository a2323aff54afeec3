//! Dense Hermitian eigendecomposition and the propagators built from it.
//!
//! Every Hamiltonian in this crate is Hermitian, and nearly all of them are
//! real symmetric. The real case is routed through the (much cheaper) real
//! symmetric solver; the complex case falls back to nalgebra's Hermitian one.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Tolerance used for Hermiticity checks throughout the crate.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub fn max_hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

pub fn is_real(m: &DMatrix<Complex64>) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

#[derive(Clone, Debug)]
enum Basis {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex64>),
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// (one per column).
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    values: DVector<f64>,
    basis: Basis,
}

impl HermitianEigen {
    /// Caller guarantees `m` is Hermitian.
    pub fn new(m: &DMatrix<Complex64>) -> Self {
        if is_real(m) {
            Self::from_real(&m.map(|z| z.re))
        } else {
            let eig = m.clone().symmetric_eigen();
            let order = ascending_order(eig.eigenvalues.as_slice());
            let n = m.nrows();
            let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
            let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
            HermitianEigen {
                values,
                basis: Basis::Complex(vectors),
            }
        }
    }

    pub fn from_real(m: &DMatrix<f64>) -> Self {
        let eig = m.clone().symmetric_eigen();
        let order = ascending_order(eig.eigenvalues.as_slice());
        let n = m.nrows();
        let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
        let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
        HermitianEigen {
            values,
            basis: Basis::Real(vectors),
        }
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Squared overlap |<i|E_alpha>|^2 of basis site `i` with eigenvector `alpha`.
    pub fn overlap_sq(&self, i: usize, alpha: usize) -> f64 {
        match &self.basis {
            Basis::Real(v) => v[(i, alpha)] * v[(i, alpha)],
            Basis::Complex(v) => v[(i, alpha)].norm_sqr(),
        }
    }

    /// Coefficients V^dagger psi in the eigenbasis.
    pub fn to_eigenbasis(&self, psi: &DVector<Complex64>) -> DVector<Complex64> {
        match &self.basis {
            Basis::Real(v) => {
                let re = v.tr_mul(&psi.map(|z| z.re));
                let im = v.tr_mul(&psi.map(|z| z.im));
                DVector::from_fn(re.len(), |k, _| Complex64::new(re[k], im[k]))
            }
            Basis::Complex(v) => v.ad_mul(psi),
        }
    }

    /// Site-basis amplitudes V (e^{-i E dz} c) for eigenbasis coefficients `c`.
    pub fn evolve_coefficients(&self, coeffs: &DVector<Complex64>, dz: f64) -> DVector<Complex64> {
        let phased = DVector::from_fn(coeffs.len(), |k, _| {
            coeffs[k] * Complex64::from_polar(1.0, -self.values[k] * dz)
        });
        match &self.basis {
            Basis::Real(v) => {
                let re = v * phased.map(|z| z.re);
                let im = v * phased.map(|z| z.im);
                DVector::from_fn(re.len(), |k, _| Complex64::new(re[k], im[k]))
            }
            Basis::Complex(v) => v * phased,
        }
    }

    /// exp(-i H dz) psi.
    pub fn propagate(&self, psi: &DVector<Complex64>, dz: f64) -> DVector<Complex64> {
        self.evolve_coefficients(&self.to_eigenbasis(psi), dz)
    }

    /// The full unitary exp(-i H dz) = V diag(e^{-i E dz}) V^dagger.
    pub fn unitary(&self, dz: f64) -> DMatrix<Complex64> {
        let n = self.dim();
        let phases: Vec<Complex64> = self
            .values
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -e * dz))
            .collect();
        let v = match &self.basis {
            Basis::Real(v) => v.map(|x| Complex64::new(x, 0.0)),
            Basis::Complex(v) => v.clone(),
        };
        let mut scaled = v.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        let u = &scaled * v.adjoint();
        debug_assert_eq!(u.nrows(), n);
        u
    }
}

fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_and_complex_paths_agree() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 0.3, 0.0, 0.3, -0.5, 0.2, 0.0, 0.2, 2.0]);
        let mc = m.map(|x| Complex64::new(x, 0.0));
        let real = HermitianEigen::from_real(&m);
        let eig = mc.symmetric_eigen();
        let mut cvals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        cvals.sort_by(f64::total_cmp);
        for (a, b) in real.values().iter().zip(cvals.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvalues_ascending() {
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, -1.0]);
        let e = HermitianEigen::from_real(&m);
        assert_eq!(e.values().as_slice(), &[-1.0, 3.0]);
        assert_eq!(e.overlap_sq(1, 0), 1.0);
    }

    #[test]
    fn complex_hermitian_unitary() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[one, i * 0.5, -i * 0.5, -one]);
        let e = HermitianEigen::new(&m);
        let u = e.unitary(0.7);
        let id = &u * u.adjoint();
        for r in 0..2 {
            for c in 0..2 {
                let expect = if r == c { 1.0 } else { 0.0 };
                assert!((id[(r, c)] - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }
}

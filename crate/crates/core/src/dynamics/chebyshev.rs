//! Chebyshev expansion of exp(-i H dz) applied to a vector, for sparse
//! Hamiltonians (FMO block plus a sink chain). Used by the sweep drivers,
//! where only a handful of states per segment are needed and a full
//! eigendecomposition would dominate the cost.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Hermitian matrix split into a real diagonal and sparse off-diagonal rows.
#[derive(Clone, Debug)]
pub struct SparseHermitian {
    diag: Vec<f64>,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseHermitian {
    pub fn from_dense(m: &DMatrix<Complex64>) -> Self {
        let n = m.nrows();
        let diag = (0..n).map(|i| m[(i, i)].re).collect();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && m[(i, j)] != Complex64::new(0.0, 0.0))
                    .map(|j| (j, m[(i, j)]))
                    .collect()
            })
            .collect();
        SparseHermitian { diag, rows }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin interval containing the spectrum.
    pub fn spectral_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (d, row) in self.diag.iter().zip(&self.rows) {
            let r: f64 = row.iter().map(|(_, v)| v.norm()).sum();
            lo = lo.min(d - r);
            hi = hi.max(d + r);
        }
        (lo, hi)
    }

    /// out = (H - shift) / scale * x
    fn apply_scaled(&self, x: &[Complex64], out: &mut [Complex64], shift: f64, scale: f64) {
        let inv = 1.0 / scale;
        for (i, (d, row)) in self.diag.iter().zip(&self.rows).enumerate() {
            let mut acc = x[i] * (d - shift);
            for &(j, v) in row {
                acc += v * x[j];
            }
            out[i] = acc * inv;
        }
    }

    /// exp(-i H dz) psi to roughly machine precision.
    pub fn propagate(&self, psi: &DVector<Complex64>, dz: f64) -> DVector<Complex64> {
        let n = self.dim();
        let (lo, hi) = self.spectral_bounds();
        let center = 0.5 * (hi + lo);
        // Margin keeps the scaled spectrum strictly inside [-1, 1].
        let half_width = 0.5 * (hi - lo) * (1.0 + 1e-12) + 1e-300;
        let global = Complex64::from_polar(1.0, -center * dz);
        let x = half_width * dz;
        if x < 1e-15 {
            return psi * global;
        }
        let coeffs = bessel_series(x);
        let mut t_prev: Vec<Complex64> = psi.iter().copied().collect();
        let mut t_cur = vec![Complex64::new(0.0, 0.0); n];
        self.apply_scaled(&t_prev, &mut t_cur, center, half_width);
        let mut acc: Vec<Complex64> = t_prev.iter().map(|v| v * coeffs[0]).collect();
        let mut phase = Complex64::new(0.0, -1.0);
        for (a, v) in acc.iter_mut().zip(&t_cur) {
            *a += v * (phase * 2.0 * coeffs[1]);
        }
        let mut t_next = vec![Complex64::new(0.0, 0.0); n];
        for &c in &coeffs[2..] {
            self.apply_scaled(&t_cur, &mut t_next, center, half_width);
            phase *= Complex64::new(0.0, -1.0);
            let w = phase * 2.0 * c;
            for i in 0..n {
                let next = 2.0 * t_next[i] - t_prev[i];
                acc[i] += next * w;
                t_prev[i] = t_cur[i];
                t_cur[i] = next;
            }
        }
        DVector::from_iterator(n, acc.into_iter().map(|v| v * global))
    }
}

/// J_0(x), J_1(x), ... truncated once terms past k > x drop below 1e-18.
/// Always returns at least two terms.
pub fn bessel_series(x: f64) -> Vec<f64> {
    let kmax = (x + 40.0 + 12.0 * x.cbrt()).ceil() as usize;
    let j = bessel_j_all(kmax, x);
    let mut len = j.len();
    while len > 2 && (len - 1) as f64 > x && j[len - 1].abs() < 1e-18 {
        len -= 1;
    }
    j[..len].to_vec()
}

/// J_k(x) for k = 0..=kmax by Miller's backward recurrence, normalized with
/// J_0 + 2 sum J_2k = 1.
pub fn bessel_j_all(kmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; kmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = {
        let m = kmax.max(x as usize) + 30 + (40.0 * (kmax.max(1) as f64)).sqrt() as usize;
        m + (m % 2)
    };
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        let prev = (2.0 * k as f64 / x) * cur - next;
        next = cur;
        cur = prev;
        // `cur` now holds J_{k-1}.
        if k - 1 <= kmax {
            out[k - 1] = cur;
        }
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            let s = 1e-250;
            cur *= s;
            next *= s;
            norm *= s;
            out.iter_mut().for_each(|v| *v *= s);
        }
    }
    norm += cur;
    out.iter_mut().for_each(|v| *v /= norm);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::HermitianEigen;

    #[test]
    fn bessel_reference_values() {
        let j = bessel_j_all(5, 1.0);
        assert!((j[0] - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((j[1] - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((j[5] - 2.497_577_302_112_344e-4).abs() < 1e-17);
        let j = bessel_j_all(3, 10.0);
        assert!((j[0] + 0.245_935_764_451_348_3).abs() < 1e-14);
        assert!((j[3] - 0.058_379_379_305_186_81).abs() < 1e-14);
    }

    #[test]
    fn matches_eigen_propagator() {
        let n = 12;
        let m = DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (i.min(j), i.max(j));
            if a == b {
                Complex64::new((a as f64 * 0.37).sin() * 3.0, 0.0)
            } else if b == a + 1 || (a == 0 && b == 5) {
                Complex64::new(0.5 + 0.1 * a as f64, if i < j { 0.2 } else { -0.2 })
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let sparse = SparseHermitian::from_dense(&m);
        let eig = HermitianEigen::new(&m);
        let mut psi = DVector::from_element(n, Complex64::new(0.0, 0.0));
        psi[3] = Complex64::new(1.0, 0.0);
        for dz in [0.0, 0.05, 1.0, 7.5] {
            let a = sparse.propagate(&psi, dz);
            let b = eig.propagate(&psi, dz);
            let err = (&a - &b).norm();
            assert!(err < 1e-12, "dz={dz}: {err}");
        }
    }
}

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::model::Hamiltonian;

/// 1 / sum_{i, alpha} |<i|E_alpha>|^4 for the eigenstates of the principal
/// block on `subset`. Ranges from 1/N (fully localized) to 1 (fully spread).
pub fn ipr(h: &Hamiltonian, subset: &[usize]) -> Result<f64> {
    let block = h.restrict(subset)?;
    let eig = block.eigen();
    let n = eig.dim();
    let mut s = 0.0;
    for alpha in 0..n {
        for i in 0..n {
            s += eig.overlap_sq(i, alpha).powi(2);
        }
    }
    Ok(1.0 / s)
}

/// |<i|E_alpha>|^2 with site `i` on rows and eigenstate `alpha` on columns.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSiteDistribution {
    pub eigenvalues: DVector<f64>,
    pub probabilities: DMatrix<f64>,
}

impl EigenSiteDistribution {
    /// Largest eigenstate weight of each site.
    pub fn site_maxima(&self) -> Vec<f64> {
        self.probabilities.row_iter().map(|r| r.max()).collect()
    }

    /// Mean over sites of [`site_maxima`](Self::site_maxima); near 1 when
    /// every eigenstate sits on a single site.
    pub fn localization_score(&self) -> f64 {
        let m = self.site_maxima();
        m.iter().sum::<f64>() / m.len() as f64
    }

    /// Smallest gap between consecutive eigenvalues.
    pub fn min_level_spacing(&self) -> f64 {
        self.eigenvalues
            .as_slice()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn eigen_site_distribution(h: &Hamiltonian) -> EigenSiteDistribution {
    let eig = h.eigen();
    let n = eig.dim();
    EigenSiteDistribution {
        eigenvalues: eig.values().clone(),
        probabilities: DMatrix::from_fn(n, n, |i, a| eig.overlap_sq(i, a)),
    }
}

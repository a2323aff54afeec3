use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::hamiltonian::{lowest_eigengap, Hamiltonian, SiteRole};
use crate::error::{Error, Result};

pub const FMO_SITES: usize = 7;

/// mm^-1 per cm^-1 on chip.
pub const CM_TO_MM: f64 = 0.1;

/// Couplings weaker than this (raw, cm^-1) are not fabricated as designed pairs.
pub const WEAK_COUPLING_CM: f64 = 15.0;

/// Zero-based index of the injection site (BChl 6).
pub const DEFAULT_SOURCE: usize = 5;
/// Zero-based index of the site attached to the sink (BChl 3).
pub const DEFAULT_DRAIN: usize = 2;

/// Seven-site FMO Hamiltonian of *C. tepidum*, cm^-1.
pub const FMO_HAMILTONIAN_CM: [[f64; FMO_SITES]; FMO_SITES] = [
    [12410.0, -96.0, 5.0, -4.4, 4.7, -12.6, -6.2],
    [-96.0, 12530.0, 33.1, 6.8, 4.5, 7.4, -0.3],
    [5.0, 33.1, 12210.0, -51.1, 0.8, -8.4, 7.6],
    [-4.4, 6.8, -51.1, 12320.0, -76.6, -14.2, -67.0],
    [4.7, 4.5, 0.8, -76.6, 12480.0, 78.3, -0.1],
    [-12.6, 7.4, -8.4, -14.2, 78.3, 12630.0, 38.3],
    [-6.2, -0.3, 7.6, -67.0, -0.1, 38.3, 12440.0],
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalOffset {
    /// Subtract the smallest site energy so the lowest site sits at zero.
    #[default]
    SubtractMinimum,
    /// Keep raw site energies (only a global phase in the dynamics).
    None,
}

/// Parameters mapping the molecular FMO Hamiltonian onto the chip.
///
/// Site energies are mapped as `(eps - offset) * site_energy_scale * 0.1`
/// and couplings as `C * coupling_scale * 0.1`, both in mm^-1. The default
/// `site_energy_scale` of 0.014 is the convention whose ground/first-excited
/// gap reproduces the 0.4776 mm^-1 used for the vibrational mode (0.4937,
/// within 3.4%), which requires keeping the weak couplings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FmoSpec {
    pub raw_hamiltonian_cm: [[f64; FMO_SITES]; FMO_SITES],
    pub coupling_scale: f64,
    pub site_energy_scale: f64,
    pub include_weak_couplings: bool,
    pub diagonal_offset: DiagonalOffset,
}

impl Default for FmoSpec {
    fn default() -> Self {
        FmoSpec {
            raw_hamiltonian_cm: FMO_HAMILTONIAN_CM,
            coupling_scale: 0.14,
            site_energy_scale: 0.014,
            include_weak_couplings: true,
            diagonal_offset: DiagonalOffset::SubtractMinimum,
        }
    }
}

impl FmoSpec {
    #[allow(clippy::needless_range_loop)]
    pub fn validate(&self) -> Result<()> {
        let raw = &self.raw_hamiltonian_cm;
        for i in 0..FMO_SITES {
            for j in (i + 1)..FMO_SITES {
                if raw[i][j] != raw[j][i] {
                    return Err(Error::Asymmetric { row: i, col: j });
                }
            }
            if !(raw[i][i] > 0.0) {
                return Err(Error::invalid(
                    "raw_hamiltonian_cm",
                    format!(
                        "site energy {} of site {} is not positive",
                        raw[i][i],
                        i + 1
                    ),
                ));
            }
        }
        if !(self.coupling_scale > 0.0 && self.coupling_scale <= 1.0) {
            return Err(Error::invalid("coupling_scale", "must lie in (0, 1]"));
        }
        if !(self.site_energy_scale >= 0.0) || !self.site_energy_scale.is_finite() {
            return Err(Error::invalid(
                "site_energy_scale",
                "must be finite and non-negative",
            ));
        }
        Ok(())
    }
}

/// Builds the 7x7 on-chip Hamiltonian in mm^-1, source at site 6 and drain at
/// site 3.
pub fn build_fmo_hamiltonian(spec: &FmoSpec) -> Result<Hamiltonian> {
    spec.validate()?;
    let raw = &spec.raw_hamiltonian_cm;
    let offset = match spec.diagonal_offset {
        DiagonalOffset::SubtractMinimum => (0..FMO_SITES)
            .map(|i| raw[i][i])
            .fold(f64::INFINITY, f64::min),
        DiagonalOffset::None => 0.0,
    };
    let m = DMatrix::from_fn(FMO_SITES, FMO_SITES, |i, j| {
        if i == j {
            (raw[i][i] - offset) * spec.site_energy_scale * CM_TO_MM
        } else if spec.include_weak_couplings || raw[i][j].abs() >= WEAK_COUPLING_CM {
            raw[i][j] * spec.coupling_scale * CM_TO_MM
        } else {
            0.0
        }
    });
    Hamiltonian::from_real(m, DEFAULT_SOURCE, DEFAULT_DRAIN)
}

/// Appends a nearest-neighbour chain of `sink_length` waveguides whose first
/// element couples to the drain site. Sink site energies equal the drain's.
pub fn attach_sink(
    h: &Hamiltonian,
    sink_length: usize,
    drain_coupling: f64,
    internal_coupling: f64,
) -> Result<Hamiltonian> {
    if !h.sink_indices().is_empty() {
        return Err(Error::SinkAlreadyAttached);
    }
    if sink_length == 0 {
        return Err(Error::invalid("sink_length", "must be at least 1"));
    }
    if !(drain_coupling > 0.0) {
        return Err(Error::invalid("drain_coupling", "must be positive"));
    }
    if !(internal_coupling > 0.0) {
        return Err(Error::invalid("internal_coupling", "must be positive"));
    }
    let n = h.dim();
    let total = n + sink_length;
    let drain = h.drain();
    let drain_energy = h.diagonal(drain);
    let mut m = DMatrix::<Complex64>::zeros(total, total);
    m.view_mut((0, 0), (n, n)).copy_from(h.matrix());
    for k in 0..sink_length {
        m[(n + k, n + k)] = Complex64::new(drain_energy, 0.0);
        if k + 1 < sink_length {
            m[(n + k, n + k + 1)] = Complex64::new(internal_coupling, 0.0);
            m[(n + k + 1, n + k)] = Complex64::new(internal_coupling, 0.0);
        }
    }
    m[(drain, n)] = Complex64::new(drain_coupling, 0.0);
    m[(n, drain)] = Complex64::new(drain_coupling, 0.0);
    let mut roles = h.roles().to_vec();
    roles.extend((1..=sink_length).map(SiteRole::Sink));
    Hamiltonian::new(m, roles, h.source(), drain)
}

/// Coupling strength for the auxiliary vibrational waveguide.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VibrationalCoupling {
    /// Use the ground/first-excited eigengap of the seven-site block.
    Auto,
    Fixed(f64),
}

/// Adds an eighth waveguide coupled equally to all seven sites. Its own
/// diagonal entry is zero.
pub fn attach_vibrational_mode(
    h7: &Hamiltonian,
    coupling: VibrationalCoupling,
) -> Result<Hamiltonian> {
    if h7.dim() != FMO_SITES || h7.fmo_indices().len() != FMO_SITES {
        return Err(Error::Dimension {
            expected: FMO_SITES,
            actual: h7.dim(),
        });
    }
    let g = match coupling {
        VibrationalCoupling::Auto => lowest_eigengap(h7),
        VibrationalCoupling::Fixed(g) => g,
    };
    let n = FMO_SITES + 1;
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    m.view_mut((0, 0), (FMO_SITES, FMO_SITES))
        .copy_from(h7.matrix());
    for i in 0..FMO_SITES {
        m[(i, FMO_SITES)] = Complex64::new(g, 0.0);
        m[(FMO_SITES, i)] = Complex64::new(g, 0.0);
    }
    let mut roles = h7.roles().to_vec();
    roles.push(SiteRole::Vibration);
    Hamiltonian::new(m, roles, h7.source(), h7.drain())
}

/// Adds static disorder gamma_i ~ U(0, gamma) to every FMO-site diagonal.
pub fn apply_static_disorder(h: &Hamiltonian, gamma: f64, seed: u64) -> Result<Hamiltonian> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    apply_static_disorder_with(h, gamma, &mut rng)
}

pub fn apply_static_disorder_with<R: Rng + ?Sized>(
    h: &Hamiltonian,
    gamma: f64,
    rng: &mut R,
) -> Result<Hamiltonian> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::invalid("gamma", "must be finite and non-negative"));
    }
    if gamma == 0.0 {
        return Ok(h.clone());
    }
    let idx = h.fmo_indices();
    let shifts: Vec<f64> = idx.iter().map(|_| rng.random::<f64>() * gamma).collect();
    Ok(h.with_diagonal_shifts(&idx, &shifts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strong_only() -> FmoSpec {
        FmoSpec {
            include_weak_couplings: false,
            ..FmoSpec::default()
        }
    }

    #[test]
    fn strong_coupling_entry() {
        let h = build_fmo_hamiltonian(&FmoSpec::default()).unwrap();
        assert!((h.coupling(0, 1).re - (-96.0 * 0.14 * 0.1)).abs() < 1e-15);
        assert!((h.coupling(0, 1).re + 1.344).abs() < 1e-12);
    }

    #[test]
    fn site_three_is_zero() {
        let h = build_fmo_hamiltonian(&FmoSpec::default()).unwrap();
        assert_eq!(h.diagonal(2), 0.0);
        assert_eq!(h.source(), 5);
        assert_eq!(h.drain(), 2);
    }

    #[test]
    fn weak_couplings_dropped_on_request() {
        let h = build_fmo_hamiltonian(&strong_only()).unwrap();
        assert_eq!(h.coupling(0, 2).re, 0.0);
        assert_eq!(h.coupling(5, 0).re, 0.0);
        let nonzero = (0..7)
            .flat_map(|i| ((i + 1)..7).map(move |j| (i, j)))
            .filter(|&(i, j)| h.coupling(i, j).re != 0.0)
            .count();
        assert_eq!(nonzero, 7);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let mut spec = FmoSpec::default();
        spec.raw_hamiltonian_cm[3][5] = 1.0;
        match build_fmo_hamiltonian(&spec) {
            Err(Error::Asymmetric { row, col }) => assert_eq!((row, col), (3, 5)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn coupling_scale_is_linear() {
        let base = build_fmo_hamiltonian(&FmoSpec::default()).unwrap();
        let spec = FmoSpec {
            coupling_scale: 0.35,
            ..FmoSpec::default()
        };
        let h = build_fmo_hamiltonian(&spec).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                if i != j {
                    let expect = base.coupling(i, j).re * 0.35 / 0.14;
                    assert!((h.coupling(i, j).re - expect).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn sink_structure() {
        let h7 = build_fmo_hamiltonian(&FmoSpec::default()).unwrap();
        for (len, dim) in [(100, 107), (80, 87)] {
            let h = attach_sink(&h7, len, 1.0, 0.8).unwrap();
            assert_eq!(h.dim(), dim);
            assert!(h.max_hermitian_deviation() < 1e-12);
            let sinks = h.sink_indices();
            assert_eq!(sinks.len(), len);
            for &s in &sinks {
                assert_eq!(h.diagonal(s), h.diagonal(2));
            }
            assert_eq!(h.coupling(2, 7).re, 1.0);
            assert_eq!(h.coupling(7, 8).re, 0.8);
        }
        let h = attach_sink(&h7, 3, 1.0, 1.0).unwrap();
        assert!(matches!(
            attach_sink(&h, 3, 1.0, 1.0),
            Err(Error::SinkAlreadyAttached)
        ));
    }

    #[test]
    fn vibrational_mode() {
        let h7 = build_fmo_hamiltonian(&FmoSpec::default()).unwrap();
        let gap = lowest_eigengap(&h7);
        let h8 = attach_vibrational_mode(&h7, VibrationalCoupling::Auto).unwrap();
        assert_eq!(h8.dim(), 8);
        assert_eq!(h8.vibration_index(), Some(7));
        assert_eq!(h8.diagonal(7), 0.0);
        for i in 0..7 {
            assert_eq!(h8.coupling(i, 7).re, gap);
        }
        let sink = attach_sink(&h7, 2, 1.0, 1.0).unwrap();
        assert!(matches!(
            attach_vibrational_mode(&sink, VibrationalCoupling::Auto),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn zero_disorder_is_identity() {
        let h7 = build_fmo_hamiltonian(&FmoSpec::default()).unwrap();
        assert_eq!(apply_static_disorder(&h7, 0.0, 9).unwrap(), h7);
    }

    #[test]
    fn disorder_touches_only_fmo_diagonals() {
        let h7 = build_fmo_hamiltonian(&FmoSpec::default()).unwrap();
        let h = attach_sink(&h7, 5, 1.0, 1.0).unwrap();
        let d = apply_static_disorder(&h, 10.0, 3).unwrap();
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                let delta = d.coupling(i, j).re - h.coupling(i, j).re;
                if i == j && i < 7 {
                    assert!((0.0..=10.0).contains(&delta));
                } else {
                    assert_eq!(delta, 0.0);
                }
            }
        }
    }
}

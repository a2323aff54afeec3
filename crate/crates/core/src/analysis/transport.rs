use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::EvolutionTrace;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum EfficiencyMode {
    /// I_sink / I_total.
    #[default]
    Intensity,
    /// (eps_drain / eps_source) * I_sink / I_total with absolute site
    /// energies supplied by the caller.
    EnergyWeighted {
        drain_energy: f64,
        source_energy: f64,
    },
}

/// Sink share of the total intensity of `psi`.
pub fn sink_fraction(psi: &DVector<Complex64>, sink: &[usize]) -> f64 {
    let total: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    sink.iter().map(|&i| psi[i].norm_sqr()).sum::<f64>() / total
}

impl EfficiencyMode {
    /// Factor applied to the sink intensity share.
    pub fn weight(self) -> Result<f64> {
        match self {
            EfficiencyMode::Intensity => Ok(1.0),
            EfficiencyMode::EnergyWeighted {
                drain_energy,
                source_energy,
            } => {
                if !(source_energy != 0.0 && source_energy.is_finite() && drain_energy.is_finite())
                {
                    return Err(Error::invalid(
                        "source_energy",
                        "must be finite and nonzero",
                    ));
                }
                Ok(drain_energy / source_energy)
            }
        }
    }
}

pub fn transport_efficiency(tr: &EvolutionTrace, mode: EfficiencyMode, z: f64) -> Result<f64> {
    let sink = tr.sink_indices();
    if sink.is_empty() {
        return Err(Error::NoSink);
    }
    let j = tr.index_of(z)?;
    Ok(mode.weight()? * sink_fraction(tr.amplitude(j), &sink))
}

/// Efficiency at every sample of the trace.
pub fn efficiency_series(tr: &EvolutionTrace, mode: EfficiencyMode) -> Result<Vec<f64>> {
    let sink = tr.sink_indices();
    if sink.is_empty() {
        return Err(Error::NoSink);
    }
    let w = mode.weight()?;
    Ok(tr
        .amplitudes()
        .iter()
        .map(|a| w * sink_fraction(a, &sink))
        .collect())
}

/// Efficiency-weighted mean arrival distance in the sink:
/// tau = -(dt / eta_N) sum_{j=1}^{N-1} P_sink(j dt) + (T - dt/2).
pub fn transfer_time(tr: &EvolutionTrace, total_length: f64) -> Result<f64> {
    let sink = tr.sink_indices();
    if sink.is_empty() {
        return Err(Error::NoSink);
    }
    let n = tr.index_of(total_length)?;
    let eta = sink_fraction(tr.amplitude(n), &sink);
    if eta <= 0.0 {
        return Err(Error::ZeroEfficiency);
    }
    let dt = tr.fine_step();
    let s: f64 = (1..n)
        .map(|j| {
            sink.iter()
                .map(|&i| tr.amplitude(j)[i].norm_sqr())
                .sum::<f64>()
        })
        .sum();
    Ok(-(dt / eta) * s + (total_length - 0.5 * dt))
}

/// Matrix index of the most populated FMO site at every sample; ties go to
/// the lowest index.
pub fn most_probable_site(tr: &EvolutionTrace) -> Vec<usize> {
    let fmo = tr.fmo_indices();
    tr.amplitudes()
        .iter()
        .map(|psi| {
            let mut best = fmo[0];
            for &i in &fmo[1..] {
                if psi[i].norm_sqr() > psi[best].norm_sqr() {
                    best = i;
                }
            }
            best
        })
        .collect()
}

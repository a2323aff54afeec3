//! Seeded Monte Carlo studies built from the model, noise, dynamics and
//! analysis layers. Realizations run in parallel on the current rayon pool;
//! results never depend on the number of worker threads.

mod config;
pub mod figures;
pub mod output;
mod studies;
mod sweep;

pub use config::{
    config_hash, default_colored_noise, linear_grid, log_grid, DisorderMode, Observable, SinkSpec,
    SweepConfig, SystemSpec,
};
pub use studies::{
    eigen_distribution_study, excitation_trace_study, localization_study, reorganization_curve,
    vibrational_comparison, ExcitationCase, ExcitationResult, LocalizationPoint,
    ReorganizationConfig, ReorganizationPoint, ReorganizationResult, VibrationalCase,
    VibrationalResult,
};
pub use sweep::{
    noise_distribution_comparison, observe, profile_mean, rank_correlation,
    realization_hamiltonian, realization_seed, segment_count_study, sweep_dephasing,
    DistributionCurve, PointSummary, SweepResult, DEFAULT_SEGMENT_COUNTS,
};

use crate::error::{Error, Result};

/// Runs `f` on a dedicated pool of `threads` workers (0 = one per core).
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid("threads", e.to_string()))?;
    Ok(pool.install(f))
}

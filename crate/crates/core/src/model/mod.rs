//! On-chip FMO Hamiltonians and the fabrication parameters behind them.

mod calibration;
mod chip_plan;
mod fmo;
mod hamiltonian;

pub use calibration::{delta_c, effective_coupling, CouplingCalibration};
pub use chip_plan::{export_chip_plan, ChipPlan, ChipRecord, RecordType, DEFAULT_MIN_COUPLING_CM};
pub use fmo::{
    apply_static_disorder, apply_static_disorder_with, attach_sink, attach_vibrational_mode,
    build_fmo_hamiltonian, DiagonalOffset, FmoSpec, VibrationalCoupling, CM_TO_MM, DEFAULT_DRAIN,
    DEFAULT_SOURCE, FMO_HAMILTONIAN_CM, FMO_SITES, WEAK_COUPLING_CM,
};
pub use hamiltonian::{lowest_eigengap, Hamiltonian, SiteRole};

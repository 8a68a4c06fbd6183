//! Experiment driver: trajectories, reference comparison, convergence orders,
//! spin scans and energy diagnostics.

mod compare;
mod config;
mod drift;
mod error;
mod order;
mod record;
mod run;
mod scan;

pub use compare::{
    compare_to_reference, compare_with_bound, ErrorSummary, DEFAULT_STABILITY_BOUND,
};
pub use config::{
    levitron_initial_state, with_spin, ModelSpec, RunConfig, DEFAULT_A, DEFAULT_C, DEFAULT_SPIN,
    DEFAULT_TILT, EQUILIBRIUM_HEIGHT,
};
pub use drift::{energy_drift, half_maxima};
pub use error::HarnessError;
pub use order::{convergence_order, OrderEstimate};
pub use record::{Sample, TrajectoryRecord, TRAJECTORY_HEADER};
pub use run::{run_simulation, simulate, Failure, RunOutcome};
pub use scan::{spin_scan, ScanReport, ScanRow};

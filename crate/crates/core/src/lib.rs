//! Geometric integrators for non-separable Hamiltonian systems.
//!
//! The centerpiece is the reduced Hamiltonian of a magnetically levitated
//! spinning top ([`model::LevitronModel`]). It is integrated with Verlet
//! splittings whose non-separable coupling is resolved by fixed-point
//! iteration ([`integrators::verlet_step`]), an implicit midpoint rule solved
//! by Newton's method, classic explicit reference steppers, and multi-product
//! extrapolation of the Verlet kernel up to order 16
//! ([`extrapolation::mpe_step`]).
//!
//! [`harness`] drives whole trajectories, compares them with reference runs,
//! estimates convergence orders and scans spin rates for stability.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extrapolation;
pub mod harness;
pub mod integrators;
pub mod model;
pub mod state;

pub use error::{Error, Result};
pub use integrators::{IterationConfig, StepReport, Stepper, StepperOptions, StepperRegistry};
pub use model::HamiltonianModel;
pub use state::{PhaseState, Vec6};

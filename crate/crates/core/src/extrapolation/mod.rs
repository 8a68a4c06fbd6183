//! Multi-product expansion of a symmetric second-order kernel.

mod combine;
mod table;

pub use combine::{iterative_mpe_step, mpe_step, richardson3_step};
pub use table::{mpe_coefficients, MpeTable, MAX_PRODUCTS};

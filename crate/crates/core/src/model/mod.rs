//! Parametric Hawkes model: excitation kernels, intensity, compensator and
//! the continuous-observation likelihood.

mod data;
mod kernel;
mod likelihood;
mod params;

pub use data::{validate_grid, CountData, EventHistory};
pub use kernel::{ExcitationKernel, KernelFamily};
pub use params::{HawkesParams, TransformedParams};

//! Estimation of Hawkes processes from counts of events in disjoint
//! intervals.
//!
//! The likelihood of interval counts is intractable, so it is estimated
//! without bias by a bootstrap particle filter ([`smc`]) and plugged into a
//! pseudo-marginal Metropolis–Hastings sampler ([`pmmh`]). The
//! [`simulator`] draws sample paths and provides a brute-force Monte Carlo
//! oracle for checking the filter. [`io`] and [`cli`] cover the file
//! formats and the `hawkes-smc` command line.

// `!(a > b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod io;
pub mod model;
pub mod pmmh;
pub mod rng;
pub mod simulator;
pub mod smc;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use model::{CountData, EventHistory, ExcitationKernel, HawkesParams, KernelFamily, TransformedParams};
pub use pmmh::{pmmh_run, summarize_chain, ChainOutput, PmmhConfig, Summary};
pub use simulator::{brute_force_prob, discretize_counts, simulate_hawkes, OracleEstimate, SimConfig};
pub use smc::{collapse_zero_runs, smc_loglik, SmcConfig};

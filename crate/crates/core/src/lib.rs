//! Simulation and analysis of induced-coherence fringes.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod biphoton;
pub mod config;
pub mod error;
pub mod fs;
pub mod imaging;
pub mod optics;
pub mod pipeline;
pub mod report;

pub use error::{Error, Result};

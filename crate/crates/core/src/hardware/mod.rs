//! Coupling-aware synthesis.

pub mod coupling;
pub mod template;

pub use coupling::{CouplingError, CouplingGraph, Mapping};
pub use template::linear_template;

//! Hydrodynamic limit of multiple Schramm–Loewner evolution.
//!
//! Closed-form Loewner maps and hull boundaries for one and two sources, a
//! complex-Burgers solver for any finitely atomic initial measure, and a
//! finite-N Dyson/Loewner simulator for convergence experiments.

pub mod burgers;
pub mod dyson;
pub mod error;
pub mod ode;
pub mod poly;
pub mod single_source;
pub mod special;
pub mod two_source;

pub use burgers::{AtomicMeasure, DensityProfile, GreenFunctionField};
pub use error::{Error, Result};
pub use single_source::HullBoundary;
pub use special::{BranchSpec, ComplexValue};
pub use two_source::{TwoSourceConfig, TwoSourceHull};

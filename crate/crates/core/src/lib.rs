//! Fast/slow energy-balance model with a carbon-cycle feedback: simulation,
//! singular-limit geometry and mixed-mode oscillation analysis.
//!
//! * [`model`]: physical and dimensionless parameter sets and vector fields.
//! * [`gsp`]: critical manifold, folded singularities, conditions, canards
//!   and singular orbits.
//! * [`simulate`]: adaptive integration with event location.
//! * [`signature`]: MMO signatures from time series.
//! * [`sweep`]: condition maps over (a, p, m).

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(v > 0.0)` also rejects NaN

pub mod error;
pub mod gsp;
pub mod io;
pub mod model;
pub mod poly;
pub mod signature;
pub mod simulate;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{DimensionlessParams, PhysicalParams, Scales, State3};

//! Coverage probability, ergodic capacity and energy efficiency of a
//! delayed-access scheme in Poisson small-cell networks.
//!
//! * [`model`]: validated configuration types and derived scalars.
//! * [`numerics`]: quadrature, special functions, root finding.
//! * [`analytic`]: access-event laws, coverage and capacity.
//! * [`optimize`]: coverage- and rate-optimal threshold distances, energy efficiency.
//! * [`simulate`]: seeded Monte-Carlo validation engine.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod model;
pub mod numerics;
pub mod optimize;
pub mod simulate;

pub use analytic::{AccessEvent, AccessProbabilities, CoverageMethod, CoverageResult};
pub use error::{AnalyticError, ModelError, NumericsError, OptimizeError, SimError};
pub use model::{AccessScenario, NetworkConfig, PowerModel};

//! Charged-particle motion in a uniform magnetic field on the spaces of
//! constant curvature H³ and S³.
//!
//! The integrator in [`dynamics`] advances the second-order equations of
//! motion; [`invariants`] gives the five conserved quantities used to watch
//! it, and [`analytic`] supplies closed forms and quadratures on H³.

pub mod analytic;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod geometry;
pub mod invariants;
pub mod quadrature;

pub use error::{Error, Result};
pub use field::FieldParams;
pub use geometry::{Curvature, SpaceChart, State};
pub use invariants::{MotionConstants, ParticleParams};

//! Closed-form solutions, orbit geometry, and quadrature reconstructions
//! on the Lobachevsky chart. These are the oracles the integrator is
//! checked against; none of them are available on S³.

mod axial;
mod flat;
mod onaxis;
mod orbit;
mod radial;

pub use axial::{
    axial_branch, axial_travel, forbidden_region, z_closed_form, z_marginal, AxialBranch, ZRegime,
};
pub use flat::{euclidean_reference, flat_position};
pub use onaxis::{
    onaxis_constants, onaxis_initial_state, onaxis_total_sweep, phi_closed_form_onaxis,
};
pub use orbit::{
    circle_params, classify_orbit, orbit_center_azimuth, orbit_residual,
    orbit_residual_normalized, radial_turning_points, state_from_constants, OrbitClass,
    RadialRange,
};
pub use radial::{
    azimuth_between_radii_direct, quadrature_phi_of_r, quadrature_r_of_z, RadialBranch,
    RadialMotion,
};

use crate::error::{Error, Result};
use crate::geometry::SpaceChart;
use crate::invariants::MotionConstants;

/// Relative tolerance for the regime and class boundaries.
pub const BOUNDARY_TOL: f64 = 1e-12;

pub(crate) fn require_hyperbolic(chart: &SpaceChart) -> Result<()> {
    if chart.is_hyperbolic() {
        Ok(())
    } else {
        Err(Error::NotHyperbolic)
    }
}

/// C with rounding-level values snapped to zero.
///
/// The algebraic form of C is a sum of terms of size `A`, `|2ωI|` and
/// `I²/ρ²`; a result below 1e−14 of that scale carries no information.
pub(crate) fn clean_offset(constants: &MotionConstants, chart: &SpaceChart) -> f64 {
    let i = constants.angular_momentum;
    let scale = constants.transverse.abs()
        + (2.0 * constants.omega * i).abs()
        + i * i / (chart.rho() * chart.rho());
    if constants.offset.abs() <= 1e-14 * scale {
        0.0
    } else {
        constants.offset
    }
}

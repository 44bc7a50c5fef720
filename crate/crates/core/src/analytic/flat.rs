//! Flat-space reference: a helix about the field direction.

use crate::error::Result;
use crate::field::FieldParams;
use crate::geometry::{SpaceChart, State};
use crate::invariants::{cyclotron_omega, ParticleParams};

/// Cartesian position `(x, y, z)` of a state read as flat cylindrical coordinates.
pub fn flat_position(state: &State) -> [f64; 3] {
    [state.r * state.phi.cos(), state.r * state.phi.sin(), state.z]
}

/// Exact flat-space motion of `initial` after time `t − initial.t`.
///
/// The cyclotron frequency takes the flat speed and the chart's `c`. The
/// returned azimuth is the branch nearest `initial.phi`.
pub fn euclidean_reference(
    chart: &SpaceChart,
    particle: &ParticleParams,
    field: &FieldParams,
    initial: &State,
    t: f64,
) -> Result<State> {
    let [x0, y0, z0] = flat_position(initial);
    let (sp, cp) = initial.phi.sin_cos();
    let vx = initial.vr * cp - initial.r * initial.vphi * sp;
    let vy = initial.vr * sp + initial.r * initial.vphi * cp;
    let speed_sq = vx * vx + vy * vy + initial.vz * initial.vz;
    let omega = cyclotron_omega(particle, field, chart, speed_sq)?;
    let tau = t - initial.t;

    // V(τ) = V0·exp(−iωτ), P(τ) = P0 + V0·(1 − exp(−iωτ))/(iω)
    let (sw, cw) = (omega * tau).sin_cos();
    let one_minus_cos = 2.0 * (0.5 * omega * tau).sin().powi(2);
    let (x, y) = if omega == 0.0 {
        (x0 + vx * tau, y0 + vy * tau)
    } else {
        (
            x0 + (vx * sw + vy * one_minus_cos) / omega,
            y0 + (vy * sw - vx * one_minus_cos) / omega,
        )
    };
    let (ux, uy) = (vx * cw + vy * sw, vy * cw - vx * sw);
    let z = z0 + initial.vz * tau;

    let r = x.hypot(y);
    let raw = y.atan2(x);
    let turns = ((initial.phi - raw) / std::f64::consts::TAU).round();
    let phi = raw + turns * std::f64::consts::TAU;
    let (vr, vphi) = if r > 0.0 { ((x * ux + y * uy) / r, (x * uy - y * ux) / (r * r)) } else { (ux.hypot(uy), 0.0) };
    Ok(State::new(t, r, phi, z, vr, vphi, initial.vz))
}

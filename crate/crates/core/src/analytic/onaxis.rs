//! Orbits with `C = 0`: circles of fixed radius `r0` centred on the axis.

use super::{forbidden_region, require_hyperbolic, ZRegime};
use crate::error::{Error, Result};
use crate::field::FieldParams;
use crate::geometry::{SpaceChart, State};
use crate::invariants::{MotionConstants, ParticleParams};

/// `(A, I)` of the axis-centred circle of radius `r0`:
/// `A = ω²ρ² tanh²(r0/ρ)`, `I = ωρ²(1/cosh(r0/ρ) − 1)`.
pub fn onaxis_constants(chart: &SpaceChart, omega: f64, r0: f64) -> Result<(f64, f64)> {
    require_hyperbolic(chart)?;
    let rho = chart.rho();
    let x = r0 / rho;
    let a = (omega * rho * x.tanh()).powi(2);
    let i = -omega * rho * rho * chart.trig_cm1(r0) / x.cosh();
    Ok((a, i))
}

/// State on the axis-centred circle of radius `r0` at height `z` with axial
/// speed `vz`. The speed magnitude, and with it ω, follows from the field.
pub fn onaxis_initial_state(
    chart: &SpaceChart,
    particle: &ParticleParams,
    field: &FieldParams,
    r0: f64,
    t: f64,
    phi: f64,
    z: f64,
    vz: f64,
) -> Result<(State, f64)> {
    require_hyperbolic(chart)?;
    if !(r0 > chart.axis_guard()) {
        return Err(Error::OutOfDomain(format!("circle radius {r0} must be positive")));
    }
    let rho = chart.rho();
    let c2 = chart.c() * chart.c();
    let gyro = particle.charge * field.b / (particle.mass * chart.c());
    let (_, cz) = chart.trig(z);
    // ε = vz² + ω²ρ²tanh²/cosh²(z) with ω² = gyro²(1 − ε/c²), solved for ε
    let lever = (gyro * rho * (r0 / rho).tanh() / cz).powi(2);
    let eps = (vz * vz + lever) / (1.0 + lever / c2);
    if eps >= c2 {
        return Err(Error::Superluminal { speed_sq: eps, c_sq: c2 });
    }
    let omega = gyro * (1.0 - eps / c2).sqrt();
    let vphi = -omega / ((r0 / rho).cosh() * cz * cz);
    let state = State::new(t, r0, phi, z, 0.0, vphi, vz);
    chart.check(&state)?;
    Ok((state, omega))
}

/// Closed-form `(φ(t), dφ/dt)` on the circle of radius `r0`, with `t0` the
/// axial time origin and `phi0` the azimuth there.
pub fn phi_closed_form_onaxis(
    constants: &MotionConstants,
    chart: &SpaceChart,
    r0: f64,
    t: f64,
    t0: f64,
    phi0: f64,
) -> Result<(f64, f64)> {
    let regime = forbidden_region(constants, chart)?;
    let (eps, a, omega, rho) = (constants.speed_sq, constants.transverse, constants.omega, chart.rho());
    if !(a > 0.0) {
        return Err(Error::Degenerate("azimuthal closed form needs A > 0"));
    }
    let c0 = (r0 / rho).cosh();
    let phase = eps.sqrt() * (t - t0) / rho;
    let sh2 = phase.sinh().powi(2);
    let scale = omega * rho / (c0 * a.sqrt());
    match regime {
        ZRegime::Crossing => {
            let phi = phi0 - scale * ((a / eps).sqrt() * phase.tanh()).atanh();
            let vphi = -omega * eps / (c0 * ((eps - a) * sh2 + eps));
            Ok((phi, vphi))
        }
        ZRegime::Reflected { .. } => {
            let phi = phi0 - scale * ((eps / a).sqrt() * phase.tanh()).atanh();
            let vphi = -omega * eps / (c0 * ((a - eps) * sh2 + a));
            Ok((phi, vphi))
        }
        ZRegime::Marginal => Err(Error::MarginalRegime),
    }
}

/// Azimuth swept from `t0` to `t → ∞` on the circle of radius `r0`.
pub fn onaxis_total_sweep(constants: &MotionConstants, chart: &SpaceChart, r0: f64) -> Result<f64> {
    let regime = forbidden_region(constants, chart)?;
    let (eps, a, omega, rho) = (constants.speed_sq, constants.transverse, constants.omega, chart.rho());
    if !(a > 0.0) {
        return Err(Error::Degenerate("azimuthal closed form needs A > 0"));
    }
    let scale = omega * rho / ((r0 / rho).cosh() * a.sqrt());
    match regime {
        ZRegime::Crossing => Ok(-scale * (a / eps).sqrt().atanh()),
        ZRegime::Reflected { .. } => Ok(-scale * (eps / a).sqrt().atanh()),
        ZRegime::Marginal => Err(Error::MarginalRegime),
    }
}

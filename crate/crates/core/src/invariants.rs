//! Squared speed, cyclotron frequency, and the integrals of motion.
//!
//! Notation used in the docs: ε (squared speed), ω (cyclotron frequency),
//! I (generalized angular momentum), A (transverse invariant),
//! C (circle-offset invariant). On S³ the same expressions hold with the
//! curvature-signed trigonometric pair and the potential `ρ²B(cos(r/ρ) − 1)`.

use crate::error::{Error, Result};
use crate::field::FieldParams;
use crate::geometry::{SpaceChart, State};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleParams {
    pub mass: f64,
    pub charge: f64,
}

impl ParticleParams {
    pub fn new(mass: f64, charge: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidConstants(format!("mass must be > 0, got {mass}")));
        }
        if !charge.is_finite() {
            return Err(Error::InvalidConstants("charge must be finite".into()));
        }
        Ok(Self { mass, charge })
    }
}

impl Default for ParticleParams {
    fn default() -> Self {
        Self { mass: 1.0, charge: 1.0 }
    }
}

/// The conserved quantities of one trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionConstants {
    /// ε, the squared speed in the spatial metric.
    pub speed_sq: f64,
    /// ω, the cyclotron frequency at this ε.
    pub omega: f64,
    /// I, generalized angular momentum about the field axis.
    pub angular_momentum: f64,
    /// A, the curved-space analog of the squared transverse speed.
    pub transverse: f64,
    /// C, vanishes exactly when the orbit circle is centered on the axis.
    pub offset: f64,
}

impl MotionConstants {
    /// Evaluate every integral at `state`, with `omega` the trajectory's
    /// cyclotron frequency. C uses the direct state form.
    pub fn from_state(chart: &SpaceChart, state: &State, omega: f64) -> Self {
        Self {
            speed_sq: squared_speed(chart, state),
            omega,
            angular_momentum: angular_momentum(chart, state, omega),
            transverse: transverse_invariant(chart, state),
            offset: offset_invariant_direct(chart, state, omega),
        }
    }

    /// Assemble constants from ε, ω, I and A; C follows algebraically.
    pub fn from_integrals(
        chart: &SpaceChart,
        speed_sq: f64,
        omega: f64,
        angular_momentum: f64,
        transverse: f64,
    ) -> Self {
        let mut out = Self { speed_sq, omega, angular_momentum, transverse, offset: 0.0 };
        out.offset = offset_invariant(&out, chart);
        out
    }
}

/// ε = vz² + C²(z)vr² + C²(z)ρ²S²(r)vφ².
pub fn squared_speed(chart: &SpaceChart, state: &State) -> f64 {
    let (sr, _) = chart.trig(state.r);
    let (_, cz) = chart.trig(state.z);
    let rho = chart.rho();
    let cz2 = cz * cz;
    state.vz * state.vz
        + cz2 * state.vr * state.vr
        + cz2 * rho * rho * sr * sr * state.vphi * state.vphi
}

/// ω = (eB/mc)·√(1 − ε/c²).
pub fn cyclotron_omega(
    particle: &ParticleParams,
    field: &FieldParams,
    chart: &SpaceChart,
    speed_sq: f64,
) -> Result<f64> {
    let c = chart.c();
    if !(speed_sq >= 0.0) {
        return Err(Error::InvalidConstants(format!("squared speed {speed_sq} is negative")));
    }
    if speed_sq >= c * c {
        return Err(Error::Superluminal { speed_sq, c_sq: c * c });
    }
    Ok(particle.charge * field.b / (particle.mass * c) * (1.0 - speed_sq / (c * c)).sqrt())
}

/// The magnetic part of I: `ωρ²(cosh(r/ρ) − 1)` on H³, `ωρ²(1 − cos(r/ρ))` on S³.
pub fn magnetic_term(chart: &SpaceChart, omega: f64, r: f64) -> f64 {
    let (s_half, _) = chart.trig(0.5 * r);
    2.0 * omega * chart.rho() * chart.rho() * s_half * s_half
}

/// I = ωρ²(cosh(r/ρ) − 1) + ρ² sinh²(r/ρ) cosh²(z/ρ) vφ.
pub fn angular_momentum(chart: &SpaceChart, state: &State, omega: f64) -> f64 {
    let (sr, _) = chart.trig(state.r);
    let (_, cz) = chart.trig(state.z);
    let rho = chart.rho();
    magnetic_term(chart, omega, state.r) + rho * rho * sr * sr * cz * cz * state.vphi
}

/// A = cosh⁴(z/ρ)[vr² + ρ² sinh²(r/ρ) vφ²].
pub fn transverse_invariant(chart: &SpaceChart, state: &State) -> f64 {
    let (sr, _) = chart.trig(state.r);
    let (_, cz) = chart.trig(state.z);
    let rho = chart.rho();
    let cz2 = cz * cz;
    cz2 * cz2 * (state.vr * state.vr + rho * rho * sr * sr * state.vphi * state.vphi)
}

/// C from A, I and ω.
///
/// On H³ this is `A − ρ²ω² + (I + ωρ²)²/ρ²`; it is evaluated in the expanded
/// form `A + 2ωI − κI²/ρ²`, which has no large cancelling terms.
pub fn offset_invariant(constants: &MotionConstants, chart: &SpaceChart) -> f64 {
    let rho2 = chart.rho() * chart.rho();
    let i = constants.angular_momentum;
    constants.transverse + 2.0 * constants.omega * i - chart.kappa() * i * i / rho2
}

/// C from the state: `cosh⁴(z/ρ)vr² + ρ² sinh²(r/ρ)[cosh(r/ρ)cosh²(z/ρ)vφ + ω]²`.
pub fn offset_invariant_direct(chart: &SpaceChart, state: &State, omega: f64) -> f64 {
    let (sr, cr) = chart.trig(state.r);
    let (_, cz) = chart.trig(state.z);
    let rho = chart.rho();
    let cz2 = cz * cz;
    let bracket = cr * cz2 * state.vphi + omega;
    cz2 * cz2 * state.vr * state.vr + rho * rho * sr * sr * bracket * bracket
}

//! Equations of motion and a fixed-step RK4 integrator.
//!
//! The state vector is `(r, φ, z, vr, vφ, vz)` in coordinate velocities.
//! ω is fixed from the initial state for the whole run; the per-sample ω
//! recomputed from ε is kept only as a diagnostic.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::error::Error;
use crate::field::FieldParams;
use crate::geometry::{SpaceChart, State};
use crate::invariants::{
    cyclotron_omega, magnetic_term, squared_speed, MotionConstants, ParticleParams,
};

/// Second derivatives `(d²r/dt², d²φ/dt², d²z/dt²)`.
///
/// On H³:
///
/// ```text
/// r'' = −2 tanh(z/ρ) z' r' + ρ sinh(r/ρ)[cosh(r/ρ) φ' + ω/cosh²(z/ρ)] φ'
/// φ'' = −(2/ρ) coth(r/ρ) r' φ' − (2/ρ) tanh(z/ρ) z' φ' − ω r'/(ρ sinh(r/ρ) cosh²(z/ρ))
/// z'' = (1/ρ) cosh(z/ρ) sinh(z/ρ)[r'² + ρ² sinh²(r/ρ) φ'²]
/// ```
///
/// The φ equation is the expanded total derivative of I. On S³ the
/// hyperbolic functions become circular ones and the sign of the z-coupling
/// flips with κ.
pub fn accelerations(chart: &SpaceChart, state: &State, omega: f64) -> Result<(f64, f64, f64), Error> {
    let rho = chart.rho();
    let kappa = chart.kappa();
    let (sr, cr) = chart.trig(state.r);
    let (sz, cz) = chart.trig(state.z);
    let (vr, vphi, vz) = (state.vr, state.vphi, state.vz);
    let cz2 = cz * cz;
    let tz = sz / cz;

    let ar = 2.0 * kappa / rho * tz * vz * vr + rho * sr * (cr * vphi + omega / cz2) * vphi;
    let az = -kappa / rho * cz * sz * (vr * vr + rho * rho * sr * sr * vphi * vphi);

    let aphi = if (rho * sr).abs() < chart.axis_guard() {
        if vphi != 0.0 {
            return Err(Error::AxisSingularity { r: state.r });
        }
        0.0
    } else {
        2.0 * kappa / rho * tz * vz * vphi
            - 2.0 / rho * (cr / sr) * vr * vphi
            - omega * vr / (rho * sr * cz2)
    };
    Ok((ar, aphi, az))
}

/// Squared axial and radial speeds and the azimuthal rate implied by a set
/// of constants at `(r, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderRates {
    /// `ε − A/cosh²(z/ρ)`; negative inside the forbidden region.
    pub vz_sq: f64,
    /// `A/cosh⁴ − [I − ωρ²(cosh − 1)]²/(cosh⁴ ρ² sinh²)`; negative outside the radial range.
    pub vr_sq: f64,
    /// `[I − ωρ²(cosh − 1)]/(ρ² sinh² cosh²)`.
    pub vphi: f64,
}

pub fn first_order_rates(
    constants: &MotionConstants,
    chart: &SpaceChart,
    r: f64,
    z: f64,
) -> Result<FirstOrderRates, Error> {
    let rho = chart.rho();
    let (sr, _) = chart.trig(r);
    let (_, cz) = chart.trig(z);
    let cz2 = cz * cz;
    let vz_sq = constants.speed_sq - constants.transverse / cz2;
    if sr == 0.0 {
        return Err(Error::Degenerate("radial and azimuthal rates are singular at r = 0"));
    }
    let lever = constants.angular_momentum - magnetic_term(chart, constants.omega, r);
    let g_pp = rho * rho * sr * sr;
    let vr_sq = constants.transverse / (cz2 * cz2) - lever * lever / (cz2 * cz2 * g_pp);
    let vphi = lever / (g_pp * cz2);
    Ok(FirstOrderRates { vz_sq, vr_sq, vphi })
}

/// One sample of an integrated trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub state: State,
    /// Integrals at this sample; `omega` is recomputed from the sample's ε,
    /// the others use the trajectory's ω.
    pub constants: MotionConstants,
}

/// Largest relative deviation of each invariant from its initial value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DriftReport {
    pub speed_sq: f64,
    pub angular_momentum: f64,
    pub transverse: f64,
    pub offset: f64,
    pub omega: f64,
}

impl DriftReport {
    pub fn max_invariant(&self) -> f64 {
        self.speed_sq.max(self.angular_momentum).max(self.transverse).max(self.offset)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMeta {
    pub step: f64,
    pub method: &'static str,
    /// ω used in the force law.
    pub omega: f64,
    pub wall_clock: Duration,
    pub drift: DriftReport,
}

/// Time-ordered samples, immutable once returned.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<Sample>,
    meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory is never empty")
    }

    pub fn states(&self) -> impl Iterator<Item = &State> + '_ {
        self.samples.iter().map(|s| &s.state)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HaltReason {
    DomainExit(String),
    AxisSingularity { r: f64 },
    NonFinite,
}

impl std::fmt::Display for HaltReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HaltReason::DomainExit(msg) => write!(f, "domain exit: {msg}"),
            HaltReason::AxisSingularity { r } => write!(f, "axis singularity at r = {r:e}"),
            HaltReason::NonFinite => write!(f, "non-finite state"),
        }
    }
}

#[derive(Debug, Error)]
pub enum IntegrateError {
    #[error("invalid integration request: {0}")]
    Invalid(#[from] Error),
    #[error("integration halted at t = {at}: {reason}")]
    Halted { reason: HaltReason, at: f64, partial: Box<Trajectory> },
}

impl IntegrateError {
    pub fn partial(&self) -> Option<&Trajectory> {
        match self {
            IntegrateError::Halted { partial, .. } => Some(partial),
            IntegrateError::Invalid(_) => None,
        }
    }
}

fn derivative(chart: &SpaceChart, omega: f64, y: &[f64; 6]) -> Result<[f64; 6], Error> {
    let s = State::from_vector(0.0, *y);
    let (ar, aphi, az) = accelerations(chart, &s, omega)?;
    Ok([y[3], y[4], y[5], ar, aphi, az])
}

fn axpy(y: &[f64; 6], h: f64, k: &[f64; 6]) -> [f64; 6] {
    std::array::from_fn(|i| y[i] + h * k[i])
}

fn rk4_increment(chart: &SpaceChart, omega: f64, y: &[f64; 6], h: f64) -> Result<[f64; 6], Error> {
    let k1 = derivative(chart, omega, y)?;
    let k2 = derivative(chart, omega, &axpy(y, 0.5 * h, &k1))?;
    let k3 = derivative(chart, omega, &axpy(y, 0.5 * h, &k2))?;
    let k4 = derivative(chart, omega, &axpy(y, h, &k3))?;
    Ok(std::array::from_fn(|i| h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])))
}

/// One classical RK4 step of size `h` (negative `h` integrates backward).
pub fn rk4_step(chart: &SpaceChart, omega: f64, state: &State, h: f64) -> Result<State, Error> {
    let y = state.to_vector();
    let dy = rk4_increment(chart, omega, &y, h)?;
    Ok(State::from_vector(state.t + h, std::array::from_fn(|i| y[i] + dy[i])))
}

/// Integrate with ω taken from the initial state's ε through the particle
/// and field parameters.
pub fn integrate(
    chart: &SpaceChart,
    particle: &ParticleParams,
    field: &FieldParams,
    initial: &State,
    h: f64,
    duration: f64,
) -> Result<Trajectory, IntegrateError> {
    chart.check(initial)?;
    let eps = squared_speed(chart, initial);
    let omega = cyclotron_omega(particle, field, chart, eps)?;
    run(chart, omega, Some((particle, field)), initial, h, duration)
}

/// Integrate with an explicitly chosen ω. The per-sample ω diagnostic is
/// then a copy of `omega`.
pub fn integrate_with_omega(
    chart: &SpaceChart,
    omega: f64,
    initial: &State,
    h: f64,
    duration: f64,
) -> Result<Trajectory, IntegrateError> {
    chart.check(initial)?;
    run(chart, omega, None, initial, h, duration)
}

fn run(
    chart: &SpaceChart,
    omega: f64,
    source: Option<(&ParticleParams, &FieldParams)>,
    initial: &State,
    h: f64,
    duration: f64,
) -> Result<Trajectory, IntegrateError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Contract(format!("step must be finite and > 0, got {h}")).into());
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::Contract(format!("duration must be finite and > 0, got {duration}")).into());
    }
    if !omega.is_finite() {
        return Err(Error::Contract("omega must be finite".into()).into());
    }
    let started = Instant::now();
    let steps = ((duration / h) - 1e-9).ceil().max(1.0) as usize;
    let t0 = initial.t;

    let snapshot = |s: &State| {
        let mut k = MotionConstants::from_state(chart, s, omega);
        if let Some((particle, field)) = source {
            // past c² the diagnostic is undefined; NaN shows up as drift
            k.omega = cyclotron_omega(particle, field, chart, k.speed_sq).unwrap_or(f64::NAN);
        }
        k
    };

    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(Sample { state: *initial, constants: snapshot(initial) });
    let mut current = *initial;
    let mut halt: Option<(HaltReason, f64)> = None;
    // Compensated summation of the increments: at large |z| the bits lost
    // in y + Δy would otherwise accumulate into a visible invariant drift.
    let mut carry = [0.0; 6];

    for k in 1..=steps {
        let t_next = if k == steps { t0 + duration } else { t0 + k as f64 * h };
        let dt = t_next - current.t;
        let y = current.to_vector();
        let next = match rk4_increment(chart, omega, &y, dt) {
            Ok(dy) => {
                let mut next = y;
                for i in 0..6 {
                    let add = dy[i] - carry[i];
                    let sum = y[i] + add;
                    carry[i] = (sum - y[i]) - add;
                    next[i] = sum;
                }
                State::from_vector(t_next, next)
            }
            Err(Error::AxisSingularity { r }) => {
                halt = Some((HaltReason::AxisSingularity { r }, current.t));
                break;
            }
            Err(e) => {
                halt = Some((HaltReason::DomainExit(e.to_string()), current.t));
                break;
            }
        };
        let y = next.to_vector();
        if y.iter().any(|v| !v.is_finite()) {
            halt = Some((HaltReason::NonFinite, t_next));
            break;
        }
        if let Err(e) = chart.check(&next) {
            halt = Some((HaltReason::DomainExit(e.to_string()), t_next));
            break;
        }
        let (sr, _) = chart.trig(next.r);
        if (chart.rho() * sr).abs() < chart.axis_guard() && next.vphi != 0.0 {
            halt = Some((HaltReason::AxisSingularity { r: next.r }, t_next));
            break;
        }
        samples.push(Sample { state: next, constants: snapshot(&next) });
        current = next;
    }

    let drift = drift_of(&samples);
    let traj = Trajectory {
        samples,
        meta: TrajectoryMeta { step: h, method: "rk4", omega, wall_clock: started.elapsed(), drift },
    };
    match halt {
        None => Ok(traj),
        Some((reason, at)) => Err(IntegrateError::Halted { reason, at, partial: Box::new(traj) }),
    }
}

const DRIFT_FLOOR: f64 = 1e-30;

fn rel(value: f64, reference: f64) -> f64 {
    let d = (value - reference).abs() / reference.abs().max(DRIFT_FLOOR);
    if d.is_nan() {
        f64::INFINITY
    } else {
        d
    }
}

fn drift_of(samples: &[Sample]) -> DriftReport {
    let Some(first) = samples.first() else {
        return DriftReport::default();
    };
    let k0 = first.constants;
    samples.iter().fold(DriftReport::default(), |acc, s| {
        let k = s.constants;
        DriftReport {
            speed_sq: acc.speed_sq.max(rel(k.speed_sq, k0.speed_sq)),
            angular_momentum: acc.angular_momentum.max(rel(k.angular_momentum, k0.angular_momentum)),
            transverse: acc.transverse.max(rel(k.transverse, k0.transverse)),
            offset: acc.offset.max(rel(k.offset, k0.offset)),
            omega: acc.omega.max(rel(k.omega, k0.omega)),
        }
    })
}

/// Per-invariant maximum relative drift: `max |v − v₀| / max(|v₀|, 1e−30)`.
pub fn drift_report(traj: &Trajectory) -> DriftReport {
    drift_of(&traj.samples)
}

/// Drift over an arbitrary sample list (e.g. re-read from disk).
pub fn drift_of_samples(samples: &[Sample]) -> DriftReport {
    drift_of(samples)
}

/// Final states at steps `h` and `h/2`, for error estimation by step halving.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepHalving {
    pub coarse: State,
    pub fine: State,
}

impl StepHalving {
    /// Richardson estimate of the fine-step error in the 6-vector max norm.
    pub fn error_estimate(&self) -> f64 {
        let (a, b) = (self.coarse.to_vector(), self.fine.to_vector());
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / 15.0
    }
}

pub fn step_halving(
    chart: &SpaceChart,
    omega: f64,
    initial: &State,
    h: f64,
    duration: f64,
) -> Result<StepHalving, IntegrateError> {
    let coarse = integrate_with_omega(chart, omega, initial, h, duration)?;
    let fine = integrate_with_omega(chart, omega, initial, 0.5 * h, duration)?;
    Ok(StepHalving { coarse: coarse.last().state, fine: fine.last().state })
}

//! Shape of the transverse orbit: class, turning radii and circle geometry.

use super::{clean_offset, require_hyperbolic, BOUNDARY_TOL};
use crate::dynamics::first_order_rates;
use crate::error::{Error, Result};
use crate::geometry::{OrbitGeometry, SpaceChart, State};
use crate::invariants::MotionConstants;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitClass {
    /// A < ω²ρ²: the projection is a closed geodesic circle.
    BoundedCircle,
    /// A = ω²ρ² within tolerance: a horocycle.
    MarginalHorocyclic,
    /// A > ω²ρ²: an equidistant curve reaching infinity.
    Unbounded,
}

impl OrbitClass {
    pub fn name(&self) -> &'static str {
        match self {
            OrbitClass::BoundedCircle => "BoundedCircle",
            OrbitClass::MarginalHorocyclic => "MarginalHorocyclic",
            OrbitClass::Unbounded => "Unbounded",
        }
    }
}

/// Allowed band of radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialRange {
    Bounded { r_min: f64, r_max: f64 },
    Unbounded { r_min: f64 },
}

impl RadialRange {
    pub fn r_min(&self) -> f64 {
        match *self {
            RadialRange::Bounded { r_min, .. } | RadialRange::Unbounded { r_min } => r_min,
        }
    }
}

pub fn classify_orbit(constants: &MotionConstants, chart: &SpaceChart) -> Result<OrbitClass> {
    require_hyperbolic(chart)?;
    let rho = chart.rho();
    let cyclo = constants.omega * constants.omega * rho * rho;
    let a = constants.transverse;
    let gap = cyclo - a;
    if gap.abs() <= BOUNDARY_TOL * cyclo.max(a.abs()) {
        Ok(OrbitClass::MarginalHorocyclic)
    } else if gap > 0.0 {
        Ok(OrbitClass::BoundedCircle)
    } else {
        Ok(OrbitClass::Unbounded)
    }
}

/// Centre and radius of the bounded orbit, given its phase origin `phi0`.
pub fn circle_params(constants: &MotionConstants, chart: &SpaceChart, phi0: f64) -> Result<OrbitGeometry> {
    if classify_orbit(constants, chart)? != OrbitClass::BoundedCircle {
        return Err(Error::UnboundedOrbit);
    }
    let rho = chart.rho();
    let omega = constants.omega;
    let gap = omega * omega * rho * rho - constants.transverse;
    let offset = clean_offset(constants, chart);
    let radius = rho * (constants.transverse.max(0.0) / gap).sqrt().asinh();
    let center_distance = rho * (offset / gap).sqrt().asinh();
    // the orbit equation divided by sign(I + ωρ²)ρ√D has the circle form;
    // a negative sign puts the centre on the opposite side
    let lead = constants.angular_momentum + omega * rho * rho;
    let center_azimuth = if lead < 0.0 { phi0 + std::f64::consts::PI } else { phi0 };
    Ok(OrbitGeometry { radius, center_distance, center_azimuth })
}

/// Half-angle form of `cosh x − 1` on the ratio `y`, inverted: `ρ·arcosh(1 + y)`.
pub(crate) fn radius_from_excess(rho: f64, y: f64) -> f64 {
    let y = y.max(0.0);
    rho * (y + (y * (y + 2.0)).sqrt()).ln_1p()
}

/// Smaller positive root of the radial polynomial in `y = cosh(r/ρ) − 1`,
/// together with `p + q` where `p = A + ωI` and `q = √(AC)`.
pub(crate) fn excess_roots(constants: &MotionConstants, chart: &SpaceChart) -> Result<(f64, f64)> {
    let a = constants.transverse;
    if !(a > 0.0) {
        return Err(Error::Degenerate("radial motion needs A > 0"));
    }
    let rho = chart.rho();
    let i = constants.angular_momentum;
    let p = a + constants.omega * i;
    let q = (a * clean_offset(constants, chart).max(0.0)).sqrt();
    let sum = p + q;
    if i == 0.0 {
        return Ok((0.0, sum));
    }
    if !(sum > 0.0) {
        return Err(Error::InvalidConstants("no radius admits real radial motion".into()));
    }
    Ok((i * i / (rho * rho * sum), sum))
}

pub fn radial_turning_points(constants: &MotionConstants, chart: &SpaceChart) -> Result<RadialRange> {
    let class = classify_orbit(constants, chart)?;
    let rho = chart.rho();
    if clean_offset(constants, chart) < 0.0 {
        return Err(Error::InvalidConstants("C is negative".into()));
    }
    let (y_min, sum) = excess_roots(constants, chart)?;
    let r_min = radius_from_excess(rho, y_min);
    match class {
        OrbitClass::BoundedCircle => {
            let gap = constants.omega * constants.omega * rho * rho - constants.transverse;
            let y_max = sum / gap;
            Ok(RadialRange::Bounded { r_min, r_max: radius_from_excess(rho, y_max).max(r_min) })
        }
        _ => Ok(RadialRange::Unbounded { r_min }),
    }
}

/// Phase origin of the orbit through `state`: the azimuth at which the
/// orbit equation's cosine term peaks.
pub fn orbit_center_azimuth(chart: &SpaceChart, state: &State, omega: f64) -> Result<f64> {
    require_hyperbolic(chart)?;
    if state.r <= chart.axis_guard() {
        return Err(Error::Degenerate("phase origin is undefined on the axis"));
    }
    let (sr, cr) = chart.trig(state.r);
    let (_, cz) = chart.trig(state.z);
    let cz2 = cz * cz;
    let along = chart.rho() * sr * (omega + cr * cz2 * state.vphi);
    let across = cz2 * state.vr;
    if along == 0.0 && across == 0.0 {
        return Err(Error::Degenerate("phase origin is undefined when C = 0"));
    }
    Ok(state.phi - across.atan2(along))
}

/// `(I + ωρ²)cosh(r/ρ) − ωρ² − √C ρ sinh(r/ρ) cos(φ − φ0)`.
pub fn orbit_residual(constants: &MotionConstants, chart: &SpaceChart, r: f64, phi: f64, phi0: f64) -> f64 {
    orbit_terms(constants, chart, r, phi, phi0).0
}

/// [`orbit_residual`] divided by the sum of the magnitudes of its terms.
pub fn orbit_residual_normalized(
    constants: &MotionConstants,
    chart: &SpaceChart,
    r: f64,
    phi: f64,
    phi0: f64,
) -> f64 {
    let (res, scale) = orbit_terms(constants, chart, r, phi, phi0);
    if scale == 0.0 {
        res
    } else {
        res / scale
    }
}

fn orbit_terms(constants: &MotionConstants, chart: &SpaceChart, r: f64, phi: f64, phi0: f64) -> (f64, f64) {
    let rho = chart.rho();
    let (sr, cr) = chart.trig(r);
    let excess = chart.trig_cm1(r);
    let i = constants.angular_momentum;
    let mag = constants.omega * rho * rho * excess;
    let circ = clean_offset(constants, chart).sqrt() * rho * sr * (phi - phi0).cos();
    let res = i * cr + mag - circ;
    (res, (i * cr).abs() + mag.abs() + circ.abs())
}

/// Rebuild a state from constants at a point, picking velocity signs.
///
/// Squared speeds that are negative beyond rounding mean the point is not
/// reachable with these constants.
pub fn state_from_constants(
    constants: &MotionConstants,
    chart: &SpaceChart,
    t: f64,
    r: f64,
    phi: f64,
    z: f64,
    vr_sign: f64,
    vz_sign: f64,
) -> Result<State> {
    let rates = first_order_rates(constants, chart, r, z)?;
    let (_, cz) = chart.trig(z);
    let tol = 1e-12 * (constants.speed_sq.abs() + constants.transverse.abs());
    let tol_r = tol / cz.powi(4);
    if rates.vz_sq < -tol || rates.vr_sq < -tol_r {
        return Err(Error::InvalidConstants(format!(
            "point r = {r}, z = {z} is not reachable (vr² = {}, vz² = {})",
            rates.vr_sq, rates.vz_sq
        )));
    }
    let vr = rates.vr_sq.max(0.0).sqrt() * if vr_sign < 0.0 { -1.0 } else { 1.0 };
    let vz = rates.vz_sq.max(0.0).sqrt() * if vz_sign < 0.0 { -1.0 } else { 1.0 };
    let state = State::new(t, r, phi, z, vr, rates.vphi, vz);
    chart.check(&state)?;
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{offset_invariant_direct, transverse_invariant};
    use std::f64::consts::FRAC_PI_2 as PI_2;

    fn h() -> SpaceChart {
        SpaceChart::hyperbolic(1.0, 1.0).unwrap()
    }

    #[test]
    fn class_examples() {
        let k = |a: f64| MotionConstants::from_integrals(&h(), 1.0, 1.0, 0.0, a);
        assert_eq!(classify_orbit(&k(0.5), &h()).unwrap(), OrbitClass::BoundedCircle);
        assert_eq!(classify_orbit(&k(1.0), &h()).unwrap(), OrbitClass::MarginalHorocyclic);
        assert_eq!(classify_orbit(&k(2.0), &h()).unwrap(), OrbitClass::Unbounded);
        assert_eq!(classify_orbit(&k(1.0 + 1e-13), &h()).unwrap(), OrbitClass::MarginalHorocyclic);
        let sph = SpaceChart::spherical(1.0, 1.0).unwrap();
        assert_eq!(classify_orbit(&k(0.5), &sph), Err(Error::NotHyperbolic));
    }

    #[test]
    fn circle_through_origin() {
        let k = MotionConstants::from_integrals(&h(), 1.0, 1.0, 0.0, 0.5);
        assert!((k.offset - 0.5).abs() < 1e-15);
        let g = circle_params(&k, &h(), 0.3).unwrap();
        assert!((g.radius - 1f64.asinh()).abs() < 1e-15);
        assert!((g.center_distance - g.radius).abs() < 1e-15);
        assert_eq!(g.center_azimuth, 0.3);
        match radial_turning_points(&k, &h()).unwrap() {
            RadialRange::Bounded { r_min, r_max } => {
                assert_eq!(r_min, 0.0);
                assert!((r_max - 2.0 * 1f64.asinh()).abs() < 1e-14);
                assert!((r_max - 3f64.acosh()).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
        let unbounded = MotionConstants::from_integrals(&h(), 1.0, 1.0, 0.0, 2.0);
        assert_eq!(circle_params(&unbounded, &h(), 0.0), Err(Error::UnboundedOrbit));
    }

    #[test]
    fn turning_points_have_zero_radial_speed() {
        let s = State::new(0.0, 0.7, 0.2, 0.3, 0.25, -0.4, 0.1);
        let k = MotionConstants::from_state(&h(), &s, 1.3);
        let range = radial_turning_points(&k, &h()).unwrap();
        let (lo, hi) = match range {
            RadialRange::Bounded { r_min, r_max } => (r_min, r_max),
            other => panic!("{other:?}"),
        };
        assert!(lo < s.r && s.r < hi);
        for r in [lo, hi] {
            let vr2 = first_order_rates(&k, &h(), r, s.z).unwrap().vr_sq;
            assert!(vr2.abs() < 1e-13, "{vr2}");
        }
        // band edges of the circle
        let g = circle_params(&k, &h(), 0.0).unwrap();
        assert!((hi - (g.radius + g.center_distance)).abs() < 1e-13);
        assert!((lo - (g.radius - g.center_distance).abs()).abs() < 1e-13);
    }

    #[test]
    fn unbounded_and_double_root() {
        let s = State::new(0.0, 0.5, 0.0, 0.0, 1.5, 0.2, 0.0);
        let k = MotionConstants::from_state(&h(), &s, 0.5);
        match radial_turning_points(&k, &h()).unwrap() {
            RadialRange::Unbounded { r_min } => {
                assert!(r_min < 0.5);
                let vr2 = first_order_rates(&k, &h(), r_min, 0.0).unwrap().vr_sq;
                assert!(vr2.abs() < 1e-13);
            }
            other => panic!("{other:?}"),
        }
        // circular orbit around the axis: C = 0
        let r0: f64 = 0.8;
        let omega = 1.0;
        let vphi = -omega / r0.cosh();
        let s = State::new(0.0, r0, 0.0, 0.0, 0.0, vphi, 0.0);
        let k = MotionConstants::from_state(&h(), &s, omega);
        match radial_turning_points(&k, &h()).unwrap() {
            RadialRange::Bounded { r_min, r_max } => {
                assert!((r_min - r0).abs() < 1e-7 && (r_max - r0).abs() < 1e-7);
            }
            other => panic!("{other:?}"),
        }
        let zero_a = MotionConstants::from_integrals(&h(), 1.0, 1.0, 0.0, 0.0);
        assert!(matches!(radial_turning_points(&zero_a, &h()), Err(Error::Degenerate(_))));
    }

    #[test]
    fn phase_origin_zeroes_orbit_residual() {
        for (s, omega) in [
            (State::new(0.0, 0.7, 0.2, 0.3, 0.25, -0.4, 0.1), 1.3),
            (State::new(0.0, 1.2, -2.0, -0.5, -0.3, 0.6, 0.4), -0.7),
            (State::new(0.0, 0.4, 1.0, 0.0, 0.0, 0.9, 0.0), 0.5),
        ] {
            let k = MotionConstants::from_state(&h(), &s, omega);
            let phi0 = orbit_center_azimuth(&h(), &s, omega).unwrap();
            let res = orbit_residual_normalized(&k, &h(), s.r, s.phi, phi0);
            assert!(res.abs() < 1e-14, "{res}");
        }
    }

    #[test]
    fn state_round_trip() {
        let s = State::new(0.5, 0.7, 0.2, 0.3, -0.25, -0.4, 0.1);
        let k = MotionConstants::from_state(&h(), &s, 1.3);
        let back = state_from_constants(&k, &h(), 0.5, 0.7, 0.2, 0.3, -1.0, 1.0).unwrap();
        assert!((back.vr - s.vr).abs() < 1e-14);
        assert!((back.vz - s.vz).abs() < 1e-14);
        assert!((back.vphi - s.vphi).abs() < 1e-14);
        assert!((transverse_invariant(&h(), &back) - k.transverse).abs() < 1e-14);
        assert!((offset_invariant_direct(&h(), &back, 1.3) - k.offset).abs() < 1e-13);
        assert!(state_from_constants(&k, &h(), 0.0, 3.0, 0.0, 0.3, 1.0, 1.0).is_err());
    }

    #[test]
    fn circle_param_examples() {
        let zero = MotionConstants::from_integrals(&h(), 1.0, 1.0, 0.0, 0.0);
        let g = circle_params(&zero, &h(), 0.0).unwrap();
        assert_eq!((g.radius, g.center_distance), (0.0, 0.0));
        for (omega, r0) in [(1.0, 0.8813736), (2.5, 0.3), (-0.7, 1.4)] {
            let (a, i) = crate::analytic::onaxis_constants(&h(), omega, r0).unwrap();
            let k = MotionConstants::from_integrals(&h(), 1.0, omega, i, a);
            let g = circle_params(&k, &h(), 0.0).unwrap();
            assert!((g.radius - r0).abs() < 1e-12, "{g:?}");
            assert!(g.center_distance < 1e-6, "{g:?}");
            for phi in [0.0, 1.0, 4.0] {
                assert!(orbit_residual_normalized(&k, &h(), r0, phi, 0.3).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn orbit_residual_examples() {
        let k = MotionConstants::from_integrals(&h(), 1.0, 1.0, 0.0, 0.5);
        let r = 3f64.acosh();
        assert!(orbit_residual(&k, &h(), r, 0.4, 0.4).abs() < 1e-14);
        // near the origin the orbit heads off at right angles to φ0
        let small = 1e-6;
        assert!(orbit_residual(&k, &h(), small, 0.4 + PI_2, 0.4).abs() < 1e-11);
        assert!(orbit_residual(&k, &h(), small, 0.4, 0.4).abs() > 1e-7);
    }

    #[test]
    fn larmor_radius_in_flat_limit() {
        let chart = SpaceChart::hyperbolic(1e3, 1.0).unwrap();
        let (a, omega) = (0.3f64, 1.2f64);
        let k = MotionConstants::from_integrals(&chart, 0.5, omega, 0.1, a);
        let g = circle_params(&k, &chart, 0.0).unwrap();
        let flat = a.sqrt() / omega;
        assert!(((g.radius - flat) / flat).abs() < 1e-5);
    }
}

//! Motion along the field axis: `(dz/dt)² = ε − A/cosh²(z/ρ)`.

use super::{require_hyperbolic, BOUNDARY_TOL};
use crate::error::{Error, Result};
use crate::geometry::{SpaceChart, State};
use crate::invariants::MotionConstants;
use crate::quadrature;

/// Character of the axial motion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZRegime {
    /// ε > A: the particle crosses `z = 0`.
    Crossing,
    /// ε < A: the band `z₋ < z < z₊` is forbidden; `sinh(z±/ρ) = ±√(A/ε − 1)`.
    Reflected { z_plus: f64, z_minus: f64 },
    /// ε = A within tolerance.
    Marginal,
}

impl ZRegime {
    pub fn name(&self) -> &'static str {
        match self {
            ZRegime::Crossing => "Crossing",
            ZRegime::Reflected { .. } => "Reflected",
            ZRegime::Marginal => "Marginal",
        }
    }
}

pub fn forbidden_region(constants: &MotionConstants, chart: &SpaceChart) -> Result<ZRegime> {
    require_hyperbolic(chart)?;
    let (eps, a) = (constants.speed_sq, constants.transverse);
    if !(eps > 0.0) {
        return Err(Error::Degenerate("axial regime needs epsilon > 0"));
    }
    if eps > a * (1.0 + BOUNDARY_TOL) {
        Ok(ZRegime::Crossing)
    } else if eps < a * (1.0 - BOUNDARY_TOL) {
        let z_plus = chart.rho() * (a / eps - 1.0).sqrt().asinh();
        Ok(ZRegime::Reflected { z_plus, z_minus: -z_plus })
    } else {
        Ok(ZRegime::Marginal)
    }
}

/// Time origin and sign selecting one branch of the closed-form solution.
///
/// Crossing: `sinh(z/ρ) = sign·√(1 − A/ε)·sinh(√ε(t − t0)/ρ)`, `t0` is the
/// crossing of `z = 0`. Reflected: `sinh(z/ρ) = sign·√(A/ε − 1)·cosh(√ε(t − t0)/ρ)`,
/// `t0` is the turning point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxialBranch {
    pub t0: f64,
    pub sign: f64,
}

/// Closed-form `(z(t), dz/dt(t))` for a given branch.
pub fn z_closed_form(
    constants: &MotionConstants,
    chart: &SpaceChart,
    t: f64,
    t0: f64,
    sign: f64,
) -> Result<(f64, f64)> {
    let regime = forbidden_region(constants, chart)?;
    let (eps, a, rho) = (constants.speed_sq, constants.transverse, chart.rho());
    let root_eps = eps.sqrt();
    let phase = root_eps * (t - t0) / rho;
    let sign = if sign < 0.0 { -1.0 } else { 1.0 };
    // The velocity uses d/dt sinh(z/ρ) = cosh(z/ρ) z'/ρ; algebraically the
    // same as the printed square-root forms without their cancellation near t0.
    match regime {
        ZRegime::Crossing => {
            let k = (1.0 - a / eps).sqrt();
            let sz = sign * k * phase.sinh();
            let z = rho * sz.asinh();
            let vz = sign * k * root_eps * phase.cosh() / (1.0 + sz * sz).sqrt();
            Ok((z, vz))
        }
        ZRegime::Reflected { .. } => {
            let k = (a / eps - 1.0).sqrt();
            let sz = sign * k * phase.cosh();
            let z = rho * sz.asinh();
            let vz = sign * k * root_eps * phase.sinh() / (1.0 + sz * sz).sqrt();
            Ok((z, vz))
        }
        ZRegime::Marginal => Err(Error::MarginalRegime),
    }
}

/// Axial motion at `ε = A`, solved from `dz/dt = ±√ε·tanh(z/ρ)`:
/// `sinh(z/ρ)` grows or decays exponentially at rate `√ε/ρ` from its value at `state`.
pub fn z_marginal(constants: &MotionConstants, chart: &SpaceChart, state: &State, t: f64) -> Result<(f64, f64)> {
    if forbidden_region(constants, chart)? != ZRegime::Marginal {
        return Err(Error::Contract("the marginal solution needs epsilon = A".into()));
    }
    let rho = chart.rho();
    let root_eps = constants.speed_sq.sqrt();
    let heading = if state.vz * state.z < 0.0 { -1.0 } else { 1.0 };
    let sz = (state.z / rho).sinh() * (heading * root_eps * (t - state.t) / rho).exp();
    let z = rho * sz.asinh();
    let vz = state.z.signum() * heading * root_eps * (z / rho).tanh().abs();
    Ok((z, vz))
}

/// Fit the branch passing through `state` at `state.t`.
pub fn axial_branch(constants: &MotionConstants, chart: &SpaceChart, state: &State) -> Result<AxialBranch> {
    let regime = forbidden_region(constants, chart)?;
    let (eps, a, rho) = (constants.speed_sq, constants.transverse, chart.rho());
    let root_eps = eps.sqrt();
    let (sz, cz) = chart.trig(state.z);
    match regime {
        ZRegime::Crossing => {
            let sign = if state.vz < 0.0 { -1.0 } else { 1.0 };
            let k = (1.0 - a / eps).sqrt();
            let phase = (sz / (sign * k)).asinh();
            Ok(AxialBranch { t0: state.t - rho * phase / root_eps, sign })
        }
        ZRegime::Reflected { .. } => {
            let sign = if state.z < 0.0 { -1.0 } else { 1.0 };
            let k = (a / eps - 1.0).sqrt();
            // sinh of the phase from the velocity: well conditioned near t0
            let phase = (state.vz * cz / (sign * k * root_eps)).asinh();
            Ok(AxialBranch { t0: state.t - rho * phase / root_eps, sign })
        }
        ZRegime::Marginal => Err(Error::MarginalRegime),
    }
}

/// `|∫ dz / (cosh(z/ρ) √(ε cosh²(z/ρ) − A))|` along a monotone axial path.
///
/// This is the axial side of the orbit relation between `r` and `z`. With
/// `u = tanh(z/ρ)` the integrand becomes `ρ/√(ε − A + A u²)`; in the
/// reflected regime the turning-point singularity is removed by
/// `|u| = u_t + s²`.
pub fn axial_travel(constants: &MotionConstants, chart: &SpaceChart, z_from: f64, z_to: f64) -> Result<f64> {
    let regime = forbidden_region(constants, chart)?;
    if z_from == z_to {
        return Ok(0.0);
    }
    let (eps, a, rho) = (constants.speed_sq, constants.transverse, chart.rho());
    let (u0, u1) = ((z_from / rho).tanh(), (z_to / rho).tanh());
    const TOL: f64 = 1e-14;
    let value = match regime {
        ZRegime::Crossing => quadrature::integrate(
            |u| rho / (eps - a + a * u * u).sqrt(),
            u0,
            u1,
            TOL,
            TOL,
        )?,
        ZRegime::Reflected { .. } => {
            let ut = ((a - eps) / a).sqrt();
            if u0.signum() != u1.signum() || u0.abs() < ut * (1.0 - 1e-12) || u1.abs() < ut * (1.0 - 1e-12) {
                return Err(Error::ForbiddenRegion);
            }
            let s0 = (u0.abs() - ut).max(0.0).sqrt();
            let s1 = (u1.abs() - ut).max(0.0).sqrt();
            quadrature::integrate(|s| 2.0 * rho / (a * (2.0 * ut + s * s)).sqrt(), s0, s1, TOL, TOL)?
        }
        ZRegime::Marginal => {
            if u0.signum() != u1.signum() || u0 == 0.0 || u1 == 0.0 {
                return Err(Error::ForbiddenRegion);
            }
            quadrature::integrate(|u| rho / (a.sqrt() * u.abs()), u0, u1, TOL, TOL)?
        }
    };
    Ok(value.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h() -> SpaceChart {
        SpaceChart::hyperbolic(1.0, 1.0).unwrap()
    }

    fn consts(eps: f64, a: f64) -> MotionConstants {
        MotionConstants::from_integrals(&h(), eps, 1.0, 0.0, a)
    }

    /// Printed velocity forms, with the branch sign made explicit.
    fn vz_printed(eps: f64, a: f64, phase: f64) -> f64 {
        let sh2 = phase.sinh().powi(2);
        if eps > a {
            (eps - a * eps / ((eps - a) * sh2 + eps)).sqrt()
        } else {
            phase.signum() * (eps - a * eps / ((a - eps) * sh2 + a)).sqrt()
        }
    }

    #[test]
    fn regime_examples() {
        assert_eq!(forbidden_region(&consts(1.0, 0.5), &h()).unwrap(), ZRegime::Crossing);
        match forbidden_region(&consts(0.25, 1.0), &h()).unwrap() {
            ZRegime::Reflected { z_plus, z_minus } => {
                assert!((z_plus - 1.3169579).abs() < 1e-7);
                assert!((z_plus - (3f64.sqrt() + 2.0).ln()).abs() < 1e-15);
                assert_eq!(z_minus, -z_plus);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(forbidden_region(&consts(0.6, 0.6), &h()).unwrap(), ZRegime::Marginal);
        assert!(forbidden_region(&consts(0.0, 0.6), &h()).is_err());
        let sph = SpaceChart::spherical(1.0, 1.0).unwrap();
        assert_eq!(forbidden_region(&consts(1.0, 0.5), &sph), Err(Error::NotHyperbolic));
    }

    #[test]
    fn closed_form_examples() {
        let (z, vz) = z_closed_form(&consts(0.25, 0.0), &h(), 2.0, 0.0, 1.0).unwrap();
        assert!((z - 1.0).abs() < 1e-15 && (vz - 0.5).abs() < 1e-15);

        let k = consts(0.8, 0.3);
        let (z, vz) = z_closed_form(&k, &h(), 3.0, 3.0, -1.0).unwrap();
        assert_eq!(z, 0.0);
        assert!((vz + 0.5f64.sqrt()).abs() < 1e-15);

        let k = consts(0.25, 1.0);
        let (z, vz) = z_closed_form(&k, &h(), 1.5, 1.5, -1.0).unwrap();
        assert!(((z).sinh() + 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(vz, 0.0);

        assert_eq!(z_closed_form(&consts(0.5, 0.5), &h(), 1.0, 0.0, 1.0), Err(Error::MarginalRegime));
    }

    #[test]
    fn velocity_matches_printed_forms_and_derivative() {
        for (eps, a) in [(0.8, 0.3), (0.3, 0.8)] {
            let k = consts(eps, a);
            for t in [-2.0, -0.4, 0.7, 3.1] {
                let (_, vz) = z_closed_form(&k, &h(), t, 0.0, 1.0).unwrap();
                let phase = eps.sqrt() * t;
                assert!((vz - vz_printed(eps, a, phase)).abs() < 1e-12, "{eps} {a} {t}");
                let d = 1e-5;
                let zp = z_closed_form(&k, &h(), t + d, 0.0, 1.0).unwrap().0;
                let zm = z_closed_form(&k, &h(), t - d, 0.0, 1.0).unwrap().0;
                assert!(((zp - zm) / (2.0 * d) - vz).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn branch_fit_round_trips() {
        for (eps, a, t0, sign) in [(0.8, 0.3, 1.3, -1.0), (0.3, 0.8, -0.6, 1.0), (0.3, 0.8, 2.0, -1.0)] {
            let k = consts(eps, a);
            let (z, vz) = z_closed_form(&k, &h(), 0.4, t0, sign).unwrap();
            let s = State::new(0.4, 1.0, 0.0, z, 0.0, 0.0, vz);
            let b = axial_branch(&k, &h(), &s).unwrap();
            assert!((b.t0 - t0).abs() < 1e-12, "{b:?}");
            assert_eq!(b.sign, sign);
        }
    }

    #[test]
    fn marginal_motion_decays_to_a_constant() {
        let k = consts(0.5, 0.5);
        let s = State::new(0.0, 1.0, 0.0, 0.8, 0.0, 0.0, -(0.5f64).sqrt() * 0.8f64.tanh());
        let (z, vz) = z_marginal(&k, &h(), &s, 0.0).unwrap();
        assert!((z - 0.8).abs() < 1e-15 && (vz - s.vz).abs() < 1e-15);
        let (z, _) = z_marginal(&k, &h(), &s, 100.0).unwrap();
        assert!(z.abs() < 1e-20 && z > 0.0);
        let d = 1e-5;
        let zp = z_marginal(&k, &h(), &s, 1.0 + d).unwrap().0;
        let zm = z_marginal(&k, &h(), &s, 1.0 - d).unwrap().0;
        let vz = z_marginal(&k, &h(), &s, 1.0).unwrap().1;
        assert!(((zp - zm) / (2.0 * d) - vz).abs() < 1e-9);
        assert!(z_marginal(&consts(0.8, 0.3), &h(), &s, 1.0).is_err());
    }

    #[test]
    fn axial_travel_is_proper_time_like() {
        // along the motion, d(travel)/dt = 1/cosh²(z/ρ)
        let k = consts(0.8, 0.3);
        let quad = axial_travel(&k, &h(), -0.5, 1.2).unwrap();
        // closed form: ρ/√A · [asinh(u√(A/(ε−A)))]
        let f = |z: f64| (z.tanh() * (0.3f64 / 0.5).sqrt()).asinh() / 0.3f64.sqrt();
        assert!((quad - (f(1.2) - f(-0.5))).abs() < 1e-13);

        let k = consts(0.3, 0.8);
        let zt = match forbidden_region(&k, &h()).unwrap() {
            ZRegime::Reflected { z_plus, .. } => z_plus,
            _ => unreachable!(),
        };
        assert!(axial_travel(&k, &h(), zt, zt + 1.0).unwrap() > 0.0);
        assert_eq!(axial_travel(&k, &h(), 0.0, zt + 1.0), Err(Error::ForbiddenRegion));
        assert_eq!(axial_travel(&k, &h(), -zt - 0.1, zt + 1.0), Err(Error::ForbiddenRegion));
    }
}

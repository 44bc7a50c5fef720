//! Radial motion parametrised by a phase that removes the turning-point
//! singularities of the orbit quadratures.
//!
//! With `y = cosh(r/ρ) − 1` the radial equation reads
//! `ρ² sinh²(r/ρ) cosh⁴(z/ρ) ṙ² ∝ w(y)`, a quadratic in `y`. Bounded orbits
//! use `y = y_lo + d(1 − cos θ)`, open ones `y = y_min + s²` with `s` signed
//! along the motion. In either variable the phase grows monotonically in time.

use std::f64::consts::PI;

use super::orbit::{excess_roots, radius_from_excess};
use super::{axial_travel, clean_offset, classify_orbit, OrbitClass};
use crate::error::{Error, Result};
use crate::geometry::SpaceChart;
use crate::invariants::MotionConstants;
use crate::quadrature;

const QUAD_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialBranch {
    /// `y_lo ≤ y ≤ y_hi`, phase `θ` with period 2π.
    Bounded { y_lo: f64, y_hi: f64 },
    /// `w = ρ²|D|(y − y_min)(y − y_neg)` with `y_neg < 0`.
    Open { y_min: f64, y_neg: f64 },
    /// `w = slope·(y − y_min)`.
    Horocyclic { y_min: f64, slope: f64 },
    /// `C = 0`: the radius never changes.
    Fixed { r: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct RadialMotion {
    rho: f64,
    omega: f64,
    angular_momentum: f64,
    /// `√|ω²ρ² − A|`
    root_gap: f64,
    branch: RadialBranch,
}

impl RadialMotion {
    pub fn new(constants: &MotionConstants, chart: &SpaceChart) -> Result<Self> {
        let class = classify_orbit(constants, chart)?;
        let rho = chart.rho();
        let offset = clean_offset(constants, chart);
        if offset < 0.0 {
            return Err(Error::InvalidConstants("C is negative".into()));
        }
        let (y_min, sum) = excess_roots(constants, chart)?;
        let gap = constants.omega * constants.omega * rho * rho - constants.transverse;
        let branch = match class {
            OrbitClass::BoundedCircle => {
                let y_hi = (sum / gap).max(y_min);
                if offset == 0.0 || y_hi == y_min {
                    RadialBranch::Fixed { r: radius_from_excess(rho, 0.5 * (y_min + y_hi)) }
                } else {
                    RadialBranch::Bounded { y_lo: y_min, y_hi }
                }
            }
            OrbitClass::Unbounded => RadialBranch::Open { y_min, y_neg: sum / gap },
            OrbitClass::MarginalHorocyclic => {
                let p = constants.transverse + constants.omega * constants.angular_momentum;
                RadialBranch::Horocyclic { y_min, slope: 2.0 * rho * rho * p }
            }
        };
        Ok(Self {
            rho,
            omega: constants.omega,
            angular_momentum: constants.angular_momentum,
            root_gap: gap.abs().sqrt(),
            branch,
        })
    }

    pub fn branch(&self) -> RadialBranch {
        self.branch
    }

    fn excess_at(&self, phase: f64) -> f64 {
        match self.branch {
            RadialBranch::Bounded { y_lo, y_hi } => {
                let half = (0.5 * phase).sin();
                y_lo + (y_hi - y_lo) * half * half
            }
            RadialBranch::Open { y_min, .. } | RadialBranch::Horocyclic { y_min, .. } => y_min + phase * phase,
            RadialBranch::Fixed { r } => 2.0 * (0.5 * r / self.rho).sinh().powi(2),
        }
    }

    pub fn radius_at(&self, phase: f64) -> f64 {
        match self.branch {
            RadialBranch::Fixed { r } => r,
            _ => radius_from_excess(self.rho, self.excess_at(phase)),
        }
    }

    /// Phase at radius `r` on the outgoing (`outward`) or incoming leg.
    /// Bounded phases lie in `[0, 2π)`.
    pub fn phase_of(&self, r: f64, outward: bool) -> Result<f64> {
        let y = 2.0 * (0.5 * r / self.rho).sinh().powi(2);
        let outside = || Error::InvalidConstants(format!("radius {r} lies outside the allowed band"));
        match self.branch {
            RadialBranch::Bounded { y_lo, y_hi } => {
                let slack = 1e-9 * y_hi;
                if y < y_lo - slack || y > y_hi + slack {
                    return Err(outside());
                }
                let theta = 2.0 * (y - y_lo).max(0.0).sqrt().atan2((y_hi - y).max(0.0).sqrt());
                Ok(if outward || theta == 0.0 { theta } else { 2.0 * PI - theta })
            }
            RadialBranch::Open { y_min, .. } | RadialBranch::Horocyclic { y_min, .. } => {
                if y < y_min - 1e-9 * y_min.max(1e-300) {
                    return Err(outside());
                }
                let s = (y - y_min).max(0.0).sqrt();
                Ok(if outward { s } else { -s })
            }
            RadialBranch::Fixed { r: r0 } => {
                if (r - r0).abs() > 1e-7 * r0.max(self.rho) {
                    return Err(outside());
                }
                Ok(0.0)
            }
        }
    }

    /// dφ per unit phase.
    pub fn azimuth_rate(&self, phase: f64) -> f64 {
        let y = self.excess_at(phase);
        let lever = self.angular_momentum - self.omega * self.rho * self.rho * y;
        lever / (y * (y + 2.0)) * self.measure(phase)
    }

    /// `dy/√w` per unit phase.
    fn measure(&self, phase: f64) -> f64 {
        match self.branch {
            RadialBranch::Bounded { .. } => 1.0 / (self.rho * self.root_gap),
            RadialBranch::Open { y_min, y_neg } => {
                2.0 / (self.rho * self.root_gap * (y_min - y_neg + phase * phase).sqrt())
            }
            RadialBranch::Horocyclic { slope, .. } => 2.0 / slope.sqrt(),
            RadialBranch::Fixed { .. } => 0.0,
        }
    }

    /// Change of azimuth between two phases.
    pub fn azimuth_advance(&self, from: f64, to: f64) -> Result<f64> {
        if let RadialBranch::Fixed { .. } = self.branch {
            return Err(Error::Degenerate("azimuth is not a function of the radius when C = 0"));
        }
        let rate = |p: f64| self.azimuth_rate(p);
        if let RadialBranch::Bounded { .. } = self.branch {
            let turns = ((to - from) / (2.0 * PI)).trunc();
            if turns != 0.0 {
                let period = 2.0 * quadrature::integrate(rate, 0.0, PI, QUAD_TOL, QUAD_TOL)?;
                let rest = quadrature::integrate(rate, from + turns * 2.0 * PI, to, QUAD_TOL, QUAD_TOL)?;
                return Ok(turns * period + rest);
            }
        }
        quadrature::integrate(rate, from, to, QUAD_TOL, QUAD_TOL)
    }

    /// Radial side of the r–z orbit relation, `∫ρ² dy/√w`, between two phases.
    pub fn travel(&self, from: f64, to: f64) -> f64 {
        let rho2 = self.rho * self.rho;
        match self.branch {
            RadialBranch::Bounded { .. } => self.rho * (to - from) / self.root_gap,
            RadialBranch::Open { y_min, y_neg } => {
                let k = (y_min - y_neg).sqrt();
                2.0 * self.rho / self.root_gap * ((to / k).asinh() - (from / k).asinh())
            }
            RadialBranch::Horocyclic { slope, .. } => 2.0 * rho2 * (to - from) / slope.sqrt(),
            RadialBranch::Fixed { .. } => f64::INFINITY,
        }
    }

    /// Phase reached after covering `distance` of [`travel`](Self::travel).
    pub fn phase_after(&self, from: f64, distance: f64) -> f64 {
        let rho2 = self.rho * self.rho;
        match self.branch {
            RadialBranch::Bounded { .. } => from + distance * self.root_gap / self.rho,
            RadialBranch::Open { y_min, y_neg } => {
                let k = (y_min - y_neg).sqrt();
                k * ((from / k).asinh() + distance * self.root_gap / (2.0 * self.rho)).sinh()
            }
            RadialBranch::Horocyclic { slope, .. } => from + distance * slope.sqrt() / (2.0 * rho2),
            RadialBranch::Fixed { .. } => from,
        }
    }
}

/// Azimuth at `r_to` given azimuth `phi_from` at `r_from`, on one monotone
/// radial leg. The increment does not depend on the direction of travel.
pub fn quadrature_phi_of_r(
    constants: &MotionConstants,
    chart: &SpaceChart,
    r_from: f64,
    r_to: f64,
    phi_from: f64,
) -> Result<f64> {
    let motion = RadialMotion::new(constants, chart)?;
    let lo = motion.phase_of(r_from.min(r_to), true)?;
    let hi = motion.phase_of(r_from.max(r_to), true)?;
    Ok(phi_from + motion.azimuth_advance(lo, hi)?)
}

/// Azimuth increment between two interior radii from the radial quadrature
/// taken directly in `r`. Both radii must be strictly inside the band.
pub fn azimuth_between_radii_direct(
    constants: &MotionConstants,
    chart: &SpaceChart,
    r_from: f64,
    r_to: f64,
) -> Result<f64> {
    classify_orbit(constants, chart)?;
    let rho = chart.rho();
    let (a, i, omega) = (constants.transverse, constants.angular_momentum, constants.omega);
    let w = |r: f64| {
        let y = chart.trig_cm1(r);
        let lever = i - omega * rho * rho * y;
        a * rho * rho * y * (y + 2.0) - lever * lever
    };
    let (lo, hi) = (r_from.min(r_to), r_from.max(r_to));
    if !(w(lo) > 0.0 && w(hi) > 0.0) || lo <= 0.0 {
        return Err(Error::Contract("radii must lie strictly inside the allowed band".into()));
    }
    let integrand = |r: f64| {
        let (sr, _) = chart.trig(r);
        let lever = i - omega * rho * rho * chart.trig_cm1(r);
        lever / (rho * sr * w(r).sqrt())
    };
    quadrature::integrate(integrand, lo, hi, QUAD_TOL, QUAD_TOL)
}

/// Radius reached when the particle moves from `z_from` to `z_to` starting
/// at `r_from`, heading outward or inward. Turning points along the way are
/// passed through.
pub fn quadrature_r_of_z(
    constants: &MotionConstants,
    chart: &SpaceChart,
    z_from: f64,
    z_to: f64,
    r_from: f64,
    outward: bool,
) -> Result<f64> {
    let motion = RadialMotion::new(constants, chart)?;
    let distance = axial_travel(constants, chart, z_from, z_to)?;
    if let RadialBranch::Fixed { r } = motion.branch() {
        motion.phase_of(r_from, outward)?;
        return Ok(r);
    }
    let start = motion.phase_of(r_from, outward)?;
    Ok(motion.radius_at(motion.phase_after(start, distance)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::State;

    fn h() -> SpaceChart {
        SpaceChart::hyperbolic(1.0, 1.0).unwrap()
    }

    #[test]
    fn circle_through_origin_sweeps_quarter_turn() {
        let k = MotionConstants::from_integrals(&h(), 1.0, 1.0, 0.0, 0.5);
        let r_max = 3f64.acosh();
        let dphi = quadrature_phi_of_r(&k, &h(), 0.0, r_max, 0.0).unwrap();
        assert!((dphi.abs() - PI / 2.0).abs() < 1e-12, "{dphi}");
        let back = quadrature_phi_of_r(&k, &h(), r_max, 0.0, 0.0).unwrap();
        assert_eq!(dphi, back);
    }

    #[test]
    fn phase_and_direct_routes_agree() {
        for (s, omega) in [
            (State::new(0.0, 0.7, 0.2, 0.3, 0.25, -0.4, 0.1), 1.3),
            (State::new(0.0, 0.5, 0.0, 0.0, 1.5, 0.2, 0.0), 0.5),
            (State::new(0.0, 1.1, 0.0, -0.2, 0.4, 0.3, 0.2), -0.8),
        ] {
            let k = MotionConstants::from_state(&h(), &s, omega);
            let motion = RadialMotion::new(&k, &h()).unwrap();
            let (a, b) = match motion.branch() {
                RadialBranch::Bounded { y_lo, y_hi } => (
                    radius_from_excess(1.0, y_lo + 0.1 * (y_hi - y_lo)),
                    radius_from_excess(1.0, y_lo + 0.8 * (y_hi - y_lo)),
                ),
                RadialBranch::Open { y_min, .. } => {
                    (radius_from_excess(1.0, y_min * 1.2 + 0.01), radius_from_excess(1.0, y_min + 3.0))
                }
                other => panic!("{other:?}"),
            };
            let phase = quadrature_phi_of_r(&k, &h(), a, b, 0.0).unwrap();
            let direct = azimuth_between_radii_direct(&k, &h(), a, b).unwrap();
            assert!((phase - direct).abs() < 1e-10 * phase.abs().max(1.0), "{phase} {direct}");
        }
    }

    #[test]
    fn phase_inverts_radius() {
        let s = State::new(0.0, 0.7, 0.2, 0.3, 0.25, -0.4, 0.1);
        let k = MotionConstants::from_state(&h(), &s, 1.3);
        let m = RadialMotion::new(&k, &h()).unwrap();
        for theta in [0.0, 0.3, 1.5, PI, 4.0, 6.0] {
            let r = m.radius_at(theta);
            let back = m.phase_of(r, theta <= PI).unwrap();
            assert!((back - theta).abs() < 1e-7, "{theta} {back}");
            assert!((m.radius_at(back) - r).abs() < 1e-14);
        }
        let open = MotionConstants::from_state(&h(), &State::new(0.0, 0.5, 0.0, 0.0, 1.5, 0.2, 0.0), 0.5);
        let m = RadialMotion::new(&open, &h()).unwrap();
        assert!((m.phase_after(0.3, m.travel(0.3, -1.2)) + 1.2).abs() < 1e-14);
        let p = m.phase_after(-0.7, 2.5);
        assert!((m.travel(-0.7, p) - 2.5).abs() < 1e-14);
    }

    #[test]
    fn fixed_radius_for_axis_circle() {
        let r0: f64 = 0.8;
        let s = State::new(0.0, r0, 0.0, 0.2, 0.0, -1.0 / (r0.cosh() * 0.2f64.cosh().powi(2)), 0.3);
        let k = MotionConstants::from_state(&h(), &s, 1.0);
        let m = RadialMotion::new(&k, &h()).unwrap();
        assert!(matches!(m.branch(), RadialBranch::Fixed { .. }));
        let r = quadrature_r_of_z(&k, &h(), 0.2, 1.7, r0, true).unwrap();
        assert!((r - r0).abs() < 1e-7);
        assert!(matches!(quadrature_phi_of_r(&k, &h(), r0, r0, 0.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn band_violations_are_rejected() {
        let k = MotionConstants::from_integrals(&h(), 1.0, 1.0, 0.0, 0.5);
        assert!(matches!(quadrature_phi_of_r(&k, &h(), 0.1, 2.5, 0.0), Err(Error::InvalidConstants(_))));
        assert!(azimuth_between_radii_direct(&k, &h(), 0.1, 3f64.acosh()).is_err());
    }
}

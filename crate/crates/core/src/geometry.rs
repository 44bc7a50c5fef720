//! Constant-curvature charts in special cylindrical coordinates.
//!
//! Both models share one set of formulas written in terms of a
//! curvature-signed pair `(S, C)`: `(sinh, cosh)` on the Lobachevsky space
//! H³ and `(sin, cos)` on the sphere S³, with `C² + κ S² = 1`.
//!
//! The spatial metric is
//!
//! ```text
//! dl² = C²(z/ρ) dr² + ρ² C²(z/ρ) S²(r/ρ) dφ² + dz²
//! ```

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};

/// Sign of the sectional curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Curvature {
    /// Lobachevsky space H³ (κ = −1).
    Hyperbolic,
    /// Spherical Riemann space S³ (κ = +1).
    Spherical,
}

impl Curvature {
    pub fn kappa(self) -> f64 {
        match self {
            Curvature::Hyperbolic => -1.0,
            Curvature::Spherical => 1.0,
        }
    }

    pub fn from_kappa(kappa: i64) -> Result<Self> {
        match kappa {
            -1 => Ok(Curvature::Hyperbolic),
            1 => Ok(Curvature::Spherical),
            k => Err(Error::InvalidChart(format!("kappa must be -1 or +1, got {k}"))),
        }
    }
}

/// Curvature sign, curvature radius `rho` and light speed `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceChart {
    curvature: Curvature,
    rho: f64,
    c: f64,
}

impl SpaceChart {
    pub fn new(curvature: Curvature, rho: f64, c: f64) -> Result<Self> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::InvalidChart(format!("rho must be finite and > 0, got {rho}")));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidChart(format!("c must be finite and > 0, got {c}")));
        }
        Ok(Self { curvature, rho, c })
    }

    pub fn hyperbolic(rho: f64, c: f64) -> Result<Self> {
        Self::new(Curvature::Hyperbolic, rho, c)
    }

    pub fn spherical(rho: f64, c: f64) -> Result<Self> {
        Self::new(Curvature::Spherical, rho, c)
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    pub fn kappa(&self) -> f64 {
        self.curvature.kappa()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.curvature == Curvature::Hyperbolic
    }

    /// `(S(x/ρ), C(x/ρ))`: `(sinh, cosh)` on H³, `(sin, cos)` on S³.
    pub fn trig(&self, x: f64) -> (f64, f64) {
        let u = x / self.rho;
        match self.curvature {
            Curvature::Hyperbolic => (u.sinh(), u.cosh()),
            Curvature::Spherical => u.sin_cos(),
        }
    }

    /// `C(x/ρ) − 1` without cancellation near `x = 0`.
    pub fn trig_cm1(&self, x: f64) -> f64 {
        let (s_half, _) = self.trig(0.5 * x);
        -2.0 * self.kappa() * s_half * s_half
    }

    /// Smallest radius the integrator accepts while `dφ/dt ≠ 0`.
    pub fn axis_guard(&self) -> f64 {
        1e-9 * self.rho
    }

    /// Domain check for a state.
    ///
    /// On S³ the boundary `|z| = πρ/2` degenerates the metric and is rejected.
    pub fn check(&self, state: &State) -> Result<()> {
        let finite = [state.t, state.r, state.phi, state.z, state.vr, state.vphi, state.vz]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::OutOfDomain("non-finite component".into()));
        }
        if state.r < 0.0 {
            return Err(Error::OutOfDomain(format!("r = {} < 0", state.r)));
        }
        if self.curvature == Curvature::Spherical {
            if state.r > PI * self.rho {
                return Err(Error::OutOfDomain(format!("r/rho = {} > pi", state.r / self.rho)));
            }
            if (state.z / self.rho).abs() >= FRAC_PI_2 {
                return Err(Error::OutOfDomain(format!(
                    "|z/rho| = {} reaches pi/2",
                    (state.z / self.rho).abs()
                )));
            }
        }
        Ok(())
    }

    pub fn contains(&self, state: &State) -> bool {
        self.check(state).is_ok()
    }

    /// Ambient coordinates of a point.
    ///
    /// On H³ the point lies on the sheet `u0² − u1² − u2² − u3² = ρ²`, `u0 > 0`;
    /// on S³ on the sphere `u0² + u1² + u2² + u3² = ρ²`.
    pub fn embed(&self, state: &State) -> Embedded {
        let (sr, cr) = self.trig(state.r);
        let (sz, cz) = self.trig(state.z);
        let (sp, cp) = state.phi.sin_cos();
        let rho = self.rho;
        Embedded {
            u0: rho * cz * cr,
            u1: rho * cz * sr * cp,
            u2: rho * cz * sr * sp,
            u3: rho * sz,
        }
    }

    /// Residual of the geodesic-circle equation
    /// `C(R)C(r) − C(r₀) + κ S(R)S(r)cos(φ − φ₀)`, zero on the circle.
    ///
    /// For H³ this reads `cosh R cosh r − cosh r₀ − sinh R sinh r cos(φ − φ₀)`.
    pub fn circle_residual(&self, r: f64, phi: f64, geom: &OrbitGeometry) -> f64 {
        let (s_big, c_big) = self.trig(geom.center_distance);
        let (sr, cr) = self.trig(r);
        let (_, c0) = self.trig(geom.radius);
        c_big * cr - c0 + self.kappa() * s_big * sr * (phi - geom.center_azimuth).cos()
    }
}

/// A point of phase space in special cylindrical coordinates.
///
/// `phi` is kept unwrapped so swept angles can be read off directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    pub t: f64,
    pub r: f64,
    pub phi: f64,
    pub z: f64,
    pub vr: f64,
    pub vphi: f64,
    pub vz: f64,
}

impl State {
    pub fn new(t: f64, r: f64, phi: f64, z: f64, vr: f64, vphi: f64, vz: f64) -> Self {
        Self { t, r, phi, z, vr, vphi, vz }
    }

    /// Azimuth reduced to `[0, 2π)`.
    pub fn phi_wrapped(&self) -> f64 {
        let w = self.phi.rem_euclid(TAU);
        if w >= TAU {
            0.0
        } else {
            w
        }
    }

    pub(crate) fn to_vector(self) -> [f64; 6] {
        [self.r, self.phi, self.z, self.vr, self.vphi, self.vz]
    }

    pub(crate) fn from_vector(t: f64, y: [f64; 6]) -> Self {
        Self { t, r: y[0], phi: y[1], z: y[2], vr: y[3], vphi: y[4], vz: y[5] }
    }
}

/// Ambient (quasi-Cartesian) coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Embedded {
    pub u0: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
}

impl Embedded {
    /// `u0² + κ(u1² + u2² + u3²)`; equals `ρ²` on the chart's quadric.
    pub fn quadric(&self, kappa: f64) -> f64 {
        self.u0 * self.u0 + kappa * (self.u1 * self.u1 + self.u2 * self.u2 + self.u3 * self.u3)
    }

    /// `|quadric − ρ²|` relative to the sum of the squared components, the
    /// scale at which the quadric itself is rounded.
    pub fn quadric_residual(&self, kappa: f64, rho: f64) -> f64 {
        let scale = self.u0 * self.u0 + self.u1 * self.u1 + self.u2 * self.u2 + self.u3 * self.u3;
        (self.quadric(kappa) - rho * rho).abs() / scale
    }
}

/// Circle traced by the `(r, φ)` projection of a bounded orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitGeometry {
    /// Geodesic radius `r₀` of the circle.
    pub radius: f64,
    /// Distance `R` from the axis to the circle center.
    pub center_distance: f64,
    /// Azimuth `φ₀` of the center.
    pub center_azimuth: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn h(rho: f64) -> SpaceChart {
        SpaceChart::hyperbolic(rho, 1.0).unwrap()
    }

    #[test]
    fn rejects_bad_charts() {
        assert!(SpaceChart::hyperbolic(0.0, 1.0).is_err());
        assert!(SpaceChart::hyperbolic(1.0, -1.0).is_err());
        assert!(SpaceChart::spherical(f64::NAN, 1.0).is_err());
        assert!(Curvature::from_kappa(0).is_err());
        assert_eq!(Curvature::from_kappa(-1).unwrap(), Curvature::Hyperbolic);
    }

    #[test]
    fn ktrig_examples() {
        assert_eq!(h(1.0).trig(0.0), (0.0, 1.0));
        let (s, c) = h(1.0).trig(1.0);
        assert!((s - 1.1752012).abs() < 1e-7);
        assert!((c - 1.5430806).abs() < 1e-7);
        let (s, c) = SpaceChart::spherical(2.0, 1.0).unwrap().trig(PI);
        assert!((s - 1.0).abs() < 1e-15);
        assert!(c.abs() < 1e-15);
    }

    #[test]
    fn trig_cm1_matches_direct_form() {
        let chart = h(1.3);
        for x in [1e-3, 0.4, 2.0, 7.5] {
            let (_, c) = chart.trig(x);
            assert!((chart.trig_cm1(x) - (c - 1.0)).abs() <= 1e-14 * c);
        }
        let sph = SpaceChart::spherical(1.3, 1.0).unwrap();
        for x in [1e-3, 0.4, 2.0] {
            let (_, c) = sph.trig(x);
            assert!((sph.trig_cm1(x) - (c - 1.0)).abs() <= 1e-15);
        }
        // Small argument: the naive form loses everything, the half-angle one does not.
        assert!((chart.trig_cm1(1e-9) - 0.5e-18 / (1.3 * 1.3)).abs() < 1e-30);
    }

    #[test]
    fn embed_examples() {
        let chart = h(1.0);
        let e = chart.embed(&State::new(0.0, 0.0, 1.234, 0.0, 0.0, 0.0, 0.0));
        assert_eq!((e.u0, e.u1, e.u2, e.u3), (1.0, 0.0, 0.0, 0.0));

        let e = chart.embed(&State::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        assert!((e.u0 - 1.5430806).abs() < 1e-7);
        assert!((e.u1 - 1.1752012).abs() < 1e-7);
        assert!(e.u2.abs() < 1e-15 && e.u3 == 0.0);
        assert!((e.u0 * e.u0 - e.u1 * e.u1 - 1.0).abs() < 1e-14);

        let e = chart.embed(&State::new(0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0));
        assert!((e.u0 - 1.5430806).abs() < 1e-7);
        assert!((e.u3 - 1.1752012).abs() < 1e-7);
        assert!(e.u1 == 0.0 && e.u2 == 0.0);
    }

    #[test]
    fn circle_residual_examples() {
        let chart = h(1.0);
        let point = OrbitGeometry { radius: 0.0, center_distance: 0.0, center_azimuth: 0.0 };
        assert_eq!(chart.circle_residual(0.0, 0.3, &point), 0.0);

        let centered = OrbitGeometry { radius: 0.8, center_distance: 0.0, center_azimuth: 0.0 };
        assert!(chart.circle_residual(0.8, 2.1, &centered).abs() < 1e-15);

        // Circle through the origin: R = r0 = arcosh(sqrt 2), farthest point at arcosh 3.
        let a = 2f64.sqrt().acosh();
        let through = OrbitGeometry { radius: a, center_distance: a, center_azimuth: 0.4 };
        assert!(chart.circle_residual(3f64.acosh(), 0.4, &through).abs() < 1e-14);
        assert!(chart.circle_residual(0.0, 0.4, &through).abs() < 1e-15);
    }

    #[test]
    fn spherical_circle_follows_law_of_cosines() {
        let chart = SpaceChart::spherical(1.0, 1.0).unwrap();
        let geom = OrbitGeometry { radius: 0.5, center_distance: 0.9, center_azimuth: 0.0 };
        // distance between (r, φ) and the center (R, 0) on the unit sphere
        let (r, phi) = (0.7f64, 0.6f64);
        let d = (0.9f64.cos() * r.cos() + 0.9f64.sin() * r.sin() * phi.cos()).acos();
        let on = OrbitGeometry { radius: d, ..geom };
        assert!(chart.circle_residual(r, phi, &on).abs() < 1e-15);
    }

    #[test]
    fn circle_residual_flat_limit() {
        // residual·ρ² → (r² + R² − r0² − 2 r R cos Δ)/2 with O(ρ⁻²) error.
        let (r, radius, dist, d_phi) = (0.9, 0.7, 0.5, 0.8f64);
        let flat = 0.5 * (r * r + dist * dist - radius * radius - 2.0 * r * dist * d_phi.cos());
        let geom = OrbitGeometry { radius, center_distance: dist, center_azimuth: 0.0 };
        let err = |rho: f64| (h(rho).circle_residual(r, d_phi, &geom) * rho * rho - flat).abs();
        // ρ = 10⁴ would be dominated by round-off in the residual
        let (e2, e3) = (err(1e2), err(1e3));
        let ratio = e3 / e2;
        assert!(e3 < 1e-5, "e3 = {e3}");
        assert!((ratio - 1e-2).abs() < 5e-3, "ratio = {ratio}");
    }

    #[test]
    fn spherical_domain_rejects_boundary() {
        let chart = SpaceChart::spherical(1.0, 1.0).unwrap();
        let mut s = State::new(0.0, 0.5, 0.0, FRAC_PI_2, 0.0, 0.0, 0.0);
        assert!(chart.check(&s).is_err());
        s.z = 1.5;
        assert!(chart.check(&s).is_ok());
        s.r = 3.2;
        assert!(chart.check(&s).is_err());
        assert!(h(1.0).check(&State::new(0.0, -0.1, 0.0, 0.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn phi_wrap_accessor() {
        let s = State::new(0.0, 1.0, -0.5, 0.0, 0.0, 0.0, 0.0);
        assert!((s.phi_wrapped() - (TAU - 0.5)).abs() < 1e-15);
        let s = State::new(0.0, 1.0, 4.0 * TAU + 1.0, 0.0, 0.0, 0.0, 0.0);
        assert!((s.phi_wrapped() - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn ktrig_identity_hyperbolic(x in -20.0f64..20.0, rho in 0.1f64..10.0) {
            let chart = h(rho);
            let (s, c) = chart.trig(x * rho);
            // relative to the size of the terms, which reach e^40 at the ends
            prop_assert!(((c * c + chart.kappa() * s * s) - 1.0).abs() <= 1e-14 * c * c);
        }

        #[test]
        fn ktrig_identity_spherical(x in 0.0f64..std::f64::consts::PI, rho in 0.1f64..10.0) {
            let chart = SpaceChart::spherical(rho, 1.0).unwrap();
            let (s, c) = chart.trig(x * rho);
            prop_assert!(((c * c + chart.kappa() * s * s) - 1.0).abs() <= 1e-14);
        }

        #[test]
        fn embedding_stays_on_quadric(
            r in 0.0f64..4.0, phi in -10.0f64..10.0, z in -4.0f64..4.0, rho in 0.5f64..5.0,
        ) {
            let chart = h(rho);
            let e = chart.embed(&State::new(0.0, r * rho, phi, z * rho, 0.0, 0.0, 0.0));
            let scale = e.u0 * e.u0;
            prop_assert!(e.u0 > 0.0);
            prop_assert!((e.quadric(-1.0) - rho * rho).abs() <= 1e-12 * scale);

            let sph = SpaceChart::spherical(rho, 1.0).unwrap();
            let zs = (z / 4.0) * 1.5 * rho;
            let rs = (r / 4.0) * std::f64::consts::PI * rho;
            let e = sph.embed(&State::new(0.0, rs, phi, zs, 0.0, 0.0, 0.0));
            prop_assert!((e.quadric(1.0) - rho * rho).abs() <= 1e-12 * rho * rho);
        }
    }
}

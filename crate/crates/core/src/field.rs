//! Axial magnetic field: gauge potential, field strength, and a
//! divergence check of the source-free Maxwell equation.

use crate::error::{Error, Result};
use crate::geometry::SpaceChart;

/// Strength `B` of the uniform-field analog. Its sign sets the handedness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldParams {
    pub b: f64,
}

impl FieldParams {
    pub fn new(b: f64) -> Self {
        Self { b }
    }
}

/// `A_φ(r)`: `−ρ²B(cosh(r/ρ) − 1)` on H³, `ρ²B(cos(r/ρ) − 1)` on S³.
///
/// Both are `−2ρ²B S²(r/2ρ)`; the half-angle form avoids cancellation at
/// small `r/ρ`.
pub fn vector_potential_phi(chart: &SpaceChart, field: &FieldParams, r: f64) -> f64 {
    let (s_half, _) = chart.trig(0.5 * r);
    -2.0 * chart.rho() * chart.rho() * field.b * s_half * s_half
}

/// `F_{φr} = ∂_φ A_r − ∂_r A_φ = ρB S(r/ρ)` (A_r vanishes).
pub fn field_strength_phir(chart: &SpaceChart, field: &FieldParams, r: f64) -> f64 {
    let (s, _) = chart.trig(r);
    chart.rho() * field.b * s
}

/// Largest `|(1/√g) ∂_r(√g F^{rφ})|` over the interior of `r_grid` for the
/// potential of [`vector_potential_phi`].
pub fn maxwell_residual(
    chart: &SpaceChart,
    field: &FieldParams,
    r_grid: &[f64],
    z: f64,
) -> Result<f64> {
    maxwell_residual_with(chart, r_grid, z, |r| -field_strength_phir(chart, field, r))
}

/// Same check for an arbitrary axial potential, given its covariant
/// component `F_{rφ}(r) = ∂_r A_φ(r)`.
///
/// `√g` and `F^{rφ} = g^{rr} g^{φφ} F_{rφ}` are taken from the spatial
/// metric; the outer derivative is a second-order central difference on the
/// (possibly non-uniform) grid.
pub fn maxwell_residual_with<F>(chart: &SpaceChart, r_grid: &[f64], z: f64, f_rphi: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if r_grid.len() < 3 {
        return Err(Error::Contract(format!(
            "maxwell grid needs at least 3 points, got {}",
            r_grid.len()
        )));
    }
    if r_grid.windows(2).any(|w| !(w[1] > w[0])) || r_grid[0] <= 0.0 {
        return Err(Error::Contract("maxwell grid must be strictly increasing with r > 0".into()));
    }
    let rho = chart.rho();
    let (_, cz) = chart.trig(z);
    let sqrt_g = |r: f64| {
        let (sr, _) = chart.trig(r);
        rho * cz * cz * sr
    };
    // √g F^{rφ} = √g · F_{rφ} / (g_rr g_φφ)
    let flux = |r: f64| {
        let (sr, _) = chart.trig(r);
        let g_rr = cz * cz;
        let g_pp = rho * rho * cz * cz * sr * sr;
        sqrt_g(r) * f_rphi(r) / (g_rr * g_pp)
    };
    let values: Vec<f64> = r_grid.iter().map(|&r| flux(r)).collect();
    let mut worst = 0.0f64;
    for i in 1..r_grid.len() - 1 {
        let (h0, h1) = (r_grid[i] - r_grid[i - 1], r_grid[i + 1] - r_grid[i]);
        // non-uniform three-point first derivative
        let d = (-h1 / (h0 * (h0 + h1))) * values[i - 1]
            + ((h1 - h0) / (h0 * h1)) * values[i]
            + (h0 / (h1 * (h0 + h1))) * values[i + 1];
        worst = worst.max((d / sqrt_g(r_grid[i])).abs());
    }
    Ok(worst)
}

/// Uniform grid helper: `n` points on `[lo, hi]`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo; n];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(rho: f64) -> SpaceChart {
        SpaceChart::hyperbolic(rho, 1.0).unwrap()
    }

    #[test]
    fn potential_examples() {
        let f = FieldParams::new(1.0);
        assert_eq!(vector_potential_phi(&h(1.0), &f, 0.0), 0.0);
        assert!((vector_potential_phi(&h(1.0), &f, 1.0) + 0.5430806).abs() < 1e-7);
        let far = vector_potential_phi(&h(1e3), &f, 1.0);
        assert!((far + 0.5).abs() < 1e-6, "{far}");
        // printed closed forms
        let direct = -f.b * (1f64.cosh() - 1.0);
        assert!((vector_potential_phi(&h(1.0), &f, 1.0) - direct).abs() < 1e-15);
        let sph = SpaceChart::spherical(1.0, 1.0).unwrap();
        let direct = f.b * (0.7f64.cos() - 1.0);
        assert!((vector_potential_phi(&sph, &f, 0.7) - direct).abs() < 1e-15);
    }

    #[test]
    fn field_strength_examples() {
        let f = FieldParams::new(1.0);
        assert_eq!(field_strength_phir(&h(1.0), &f, 0.0), 0.0);
        assert!((field_strength_phir(&h(1.0), &f, 1.0) - 1.1752012).abs() < 1e-7);
        // central difference of the potential: F_{φr} = −∂_r A_φ
        let d = 1e-5;
        let fd = -(vector_potential_phi(&h(1.0), &f, 1.0 + d)
            - vector_potential_phi(&h(1.0), &f, 1.0 - d))
            / (2.0 * d);
        assert!((fd - field_strength_phir(&h(1.0), &f, 1.0)).abs() <= 1e-9);
    }

    #[test]
    fn flat_limit_of_field_strength() {
        let f = FieldParams::new(1.7);
        let got = field_strength_phir(&h(1e3), &f, 1.0);
        assert!(((got - 1.7) / 1.7).abs() <= 1e-5);
    }

    #[test]
    fn maxwell_examples() {
        let grid = uniform_grid(0.5, 2.0, 200);
        let f = FieldParams::new(1.0);
        let res = maxwell_residual(&h(1.0), &f, &grid, 0.0).unwrap();
        assert!(res <= 1e-10, "{res}");
        let res = maxwell_residual(&h(1.0), &f, &grid, 0.8).unwrap();
        assert!(res <= 1e-10, "{res}");

        // A_φ + 0.01 r² adds 0.02 r to F_{rφ}
        let chart = h(1.0);
        let perturbed = maxwell_residual_with(&chart, &grid, 0.0, |r| {
            -field_strength_phir(&chart, &f, r) + 0.02 * r
        })
        .unwrap();
        assert!(perturbed > 1e-4, "{perturbed}");

        assert_eq!(maxwell_residual(&h(1.0), &FieldParams::new(0.0), &grid, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn maxwell_spherical_potential_is_source_free() {
        let chart = SpaceChart::spherical(1.0, 1.0).unwrap();
        let grid = uniform_grid(0.3, 2.8, 150);
        let res = maxwell_residual(&chart, &FieldParams::new(2.0), &grid, 0.4).unwrap();
        assert!(res <= 1e-10, "{res}");
    }

    #[test]
    fn gauge_constant_leaves_checks_unchanged() {
        let chart = h(1.0);
        let f = FieldParams::new(1.3);
        let shift = 4.25;
        let a = |r: f64| vector_potential_phi(&chart, &f, r);
        let a_shifted = |r: f64| vector_potential_phi(&chart, &f, r) + shift;
        assert!((a_shifted(0.9) - a(0.9) - shift).abs() < 1e-15);
        // field strength derived from either potential by the same difference stencil
        let d = 1e-4;
        let fd = |g: &dyn Fn(f64) -> f64, r: f64| (g(r + d) - g(r - d)) / (2.0 * d);
        for r in [0.4, 1.1, 2.0] {
            let lhs = fd(&a, r);
            let rhs = fd(&a_shifted, r);
            assert!((lhs - rhs).abs() < 1e-9);
        }
        let grid = uniform_grid(0.5, 2.0, 60);
        let r1 = maxwell_residual_with(&chart, &grid, 0.2, |r| fd(&a, r)).unwrap();
        let r2 = maxwell_residual_with(&chart, &grid, 0.2, |r| fd(&a_shifted, r)).unwrap();
        assert!((r1 - r2).abs() < 1e-6);
    }

    #[test]
    fn degenerate_grid_is_rejected() {
        let f = FieldParams::new(1.0);
        assert!(matches!(
            maxwell_residual(&h(1.0), &f, &[0.5, 1.0], 0.0),
            Err(Error::Contract(_))
        ));
        assert!(maxwell_residual(&h(1.0), &f, &[0.5, 0.4, 1.0], 0.0).is_err());
        assert!(maxwell_residual(&h(1.0), &f, &[0.0, 0.4, 1.0], 0.0).is_err());
    }
}

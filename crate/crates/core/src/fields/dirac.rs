//! Residuals of the interacting wave equation on time-major 1+1 grids.

use nalgebra::Vector2;
use num_complex::Complex64;

use crate::algebra::{gamma, sigma_dot, ComplexMatrix4, Spinor4, METRIC};
use crate::grid::{Grid, Grid1p1, GridField, SpacetimeField};

use super::{check_min_points, same_grid, FieldError, Linear};

/// Second-order central difference along time (`axis = 0`) or space
/// (`axis = 1`) at an interior site.
pub(crate) fn central<T: Linear>(v: &[T], g: &Grid1p1, it: usize, ix: usize, axis: usize) -> T {
    let (fwd, back, h) = match axis {
        0 => (g.index(it + 1, ix), g.index(it - 1, ix), g.t.step),
        _ => (g.index(it, ix + 1), g.index(it, ix - 1), g.x.step),
    };
    v[fwd].sub(v[back]).scale(0.5 / h)
}

/// Second difference along one axis at an interior site.
pub(crate) fn second<T: Linear>(v: &[T], g: &Grid1p1, it: usize, ix: usize, axis: usize) -> T {
    let (fwd, back, h) = match axis {
        0 => (g.index(it + 1, ix), g.index(it - 1, ix), g.t.step),
        _ => (g.index(it, ix + 1), g.index(it, ix - 1), g.x.step),
    };
    v[fwd].add(v[back]).sub(v[g.index(it, ix)].scale(2.0)).scale(1.0 / (h * h))
}

pub(crate) fn interior(g: &Grid1p1) -> impl Iterator<Item = (usize, usize)> + '_ {
    (1..g.t.len - 1).flat_map(move |it| (1..g.x.len - 1).map(move |ix| (it, ix)))
}

/// `psi-bar psi` at every site.
pub fn density<G: Grid>(psi: &GridField<G, Spinor4>) -> GridField<G, f64> {
    psi.map(|u| u[0].norm_sqr() + u[1].norm_sqr() - u[2].norm_sqr() - u[3].norm_sqr())
}

/// Pointwise `gamma^mu (i d_mu - e A_mu) psi - m psi`, with `A_mu` given by its
/// covariant components and `d_y = d_z = 0`. Boundary sites are left at zero.
pub fn equation_residual_field(
    psi: &SpacetimeField<Spinor4>,
    a_t: &SpacetimeField<[f64; 4]>,
    e: f64,
    m: f64,
) -> Result<SpacetimeField<Spinor4>, FieldError> {
    same_grid(psi, a_t)?;
    let g = *psi.grid();
    check_min_points(&g)?;
    let gam: Vec<ComplexMatrix4> = (0..4).map(|mu| gamma(mu).expect("mu in range")).collect();
    let i = Complex64::i();
    let v = psi.values();
    let mut out = vec![Spinor4::zeros(); g.len()];
    for (it, ix) in interior(&g) {
        let site = g.index(it, ix);
        let u = v[site];
        let a = a_t.values()[site];
        let mut r = -u * Complex64::from(m);
        for mu in 0..2 {
            let d = central(v, &g, it, ix, mu);
            r += gam[mu] * (d * i - u * Complex64::from(e * a[mu]));
        }
        for mu in 2..4 {
            r -= gam[mu] * u * Complex64::from(e * a[mu]);
        }
        out[site] = r;
    }
    Ok(GridField::new(g, out)?)
}

/// Max-norm of [`equation_residual_field`] over interior sites.
pub fn equation_residual(
    psi: &SpacetimeField<Spinor4>,
    a_t: &SpacetimeField<[f64; 4]>,
    e: f64,
    m: f64,
) -> Result<f64, FieldError> {
    let r = equation_residual_field(psi, a_t, e, m)?;
    Ok(r.values().iter().map(|u| u.norm()).fold(0.0, f64::max))
}

/// Max-norm of the discrete `d_t^2 - d_x^2` of `psi-bar psi` over interior
/// sites. Measured and returned; nothing is asserted about its size.
pub fn dalembert_density_residual(psi: &SpacetimeField<Spinor4>) -> Result<f64, FieldError> {
    let g = *psi.grid();
    check_min_points(&g)?;
    let s = density(psi);
    let v = s.values();
    Ok(interior(&g)
        .map(|(it, ix)| (METRIC[0] * second(v, &g, it, ix, 0) - second(v, &g, it, ix, 1)).abs())
        .fold(0.0, f64::max))
}

/// Free plane wave `u exp(-i(E t - p x))` moving along x, with `u` the unit
/// (`u^dagger u = 1`) positive-energy spinor of momentum `p` and mass `m`.
/// `E` may differ from `sqrt(p^2 + m^2)` to build off-shell test fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWave1p1 {
    pub energy: f64,
    pub momentum: f64,
    pub mass: f64,
    pub amplitude: Complex64,
    /// Spin along z: `true` for up.
    pub spin_up: bool,
}

impl PlaneWave1p1 {
    pub fn on_shell(momentum: f64, mass: f64) -> Self {
        Self {
            energy: (momentum * momentum + mass * mass).sqrt(),
            momentum,
            mass,
            amplitude: Complex64::new(1.0, 0.0),
            spin_up: true,
        }
    }

    pub fn spinor(&self) -> Spinor4 {
        let e0 = (self.momentum * self.momentum + self.mass * self.mass).sqrt();
        let chi = if self.spin_up {
            Vector2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))
        } else {
            Vector2::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
        };
        let lower = sigma_dot([self.momentum, 0.0, 0.0]) * chi / Complex64::from(e0 + self.mass);
        let u = Spinor4::new(chi[0], chi[1], lower[0], lower[1]);
        u / Complex64::from(u.norm()) * self.amplitude
    }

    pub fn at(&self, t: f64, x: f64) -> Spinor4 {
        let phase = Complex64::from_polar(1.0, -(self.energy * t - self.momentum * x));
        self.spinor() * phase
    }
}

/// Superposition of plane waves sampled on `grid`.
pub fn plane_wave(grid: Grid1p1, waves: &[PlaneWave1p1]) -> SpacetimeField<Spinor4> {
    GridField::from_fn(grid, |(t, x)| {
        waves.iter().fold(Spinor4::zeros(), |acc, w| acc + w.at(t, x))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Axis;

    fn grid(n: usize, h: f64) -> Grid1p1 {
        Grid1p1 {
            t: Axis::new(n, 0.0, h).unwrap(),
            x: Axis::new(n, 0.0, h).unwrap(),
        }
    }

    fn no_field(g: Grid1p1) -> SpacetimeField<[f64; 4]> {
        GridField::filled(g, [0.0; 4])
    }

    #[test]
    fn on_shell_wave_converges_at_second_order() {
        let w = PlaneWave1p1::on_shell(0.7, 1.0);
        let r1 = equation_residual(&plane_wave(grid(16, 0.1), &[w]), &no_field(grid(16, 0.1)), 1.0, 1.0).unwrap();
        let r2 = equation_residual(&plane_wave(grid(31, 0.05), &[w]), &no_field(grid(31, 0.05)), 1.0, 1.0).unwrap();
        assert!(r1 > 0.0 && r1 / r2 > 3.9 && r1 / r2 < 4.1, "{r1} {r2}");
    }

    #[test]
    fn off_shell_wave_plateaus() {
        let mut w = PlaneWave1p1::on_shell(0.7, 1.0);
        w.energy += 0.05;
        let g = grid(41, 0.01);
        let r = equation_residual(&plane_wave(g, &[w]), &no_field(g), 1.0, 1.0).unwrap();
        assert!((r - 0.05).abs() < 1e-3, "{r}");
    }

    #[test]
    fn zero_field_has_zero_residuals() {
        let g = grid(10, 0.1);
        let psi = GridField::filled(g, Spinor4::zeros());
        assert_eq!(equation_residual(&psi, &no_field(g), 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(dalembert_density_residual(&psi).unwrap(), 0.0);
    }

    #[test]
    fn single_wave_density_is_flat() {
        let g = grid(20, 0.1);
        let psi = plane_wave(g, &[PlaneWave1p1::on_shell(1.3, 1.0)]);
        assert!(dalembert_density_residual(&psi).unwrap() < 1e-10);
    }

    #[test]
    fn too_small_grid() {
        let g = grid(7, 0.1);
        let psi = GridField::filled(g, Spinor4::zeros());
        assert!(matches!(
            equation_residual(&psi, &no_field(g), 1.0, 1.0),
            Err(FieldError::GridTooSmall { .. })
        ));
    }
}

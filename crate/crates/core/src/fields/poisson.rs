//! Static potentials by direct Green's-function summation on 3D grids.

use std::f64::consts::PI;

use crate::algebra::{Spinor4, METRIC};
use crate::exec::{map_indexed, Execution};
use crate::grid::{Grid, Grid3, GridField, SpaceField};

use super::{check_min_points, same_grid, FieldError};

/// Per-axis cap on the direct `O(N^2)` kernel sum.
pub const MAX_POINTS: usize = 64;

fn check_poisson_grid(grid: &Grid3) -> Result<(), FieldError> {
    check_min_points(grid)?;
    for a in grid.axes {
        if a.len > MAX_POINTS {
            return Err(FieldError::GridTooLarge {
                max: MAX_POINTS,
                got: a.len,
            });
        }
    }
    Ok(())
}

/// Radius of the sphere with the volume of one cell.
fn equivalent_radius(volume: f64) -> f64 {
    (3.0 * volume / (4.0 * PI)).cbrt()
}

/// `cell_volume / (4 pi |d|)` tabulated by absolute index offset. The self
/// cell holds the kernel integrated over the equivalent sphere, `R^2 / 2`.
struct Kernel {
    shape: [usize; 3],
    table: Vec<f64>,
}

impl Kernel {
    fn new(grid: &Grid3) -> Self {
        let shape = grid.shape();
        let h = [grid.axes[0].step, grid.axes[1].step, grid.axes[2].step];
        let vol = h[0] * h[1] * h[2];
        let mut table = Vec::with_capacity(shape.iter().product());
        for i in 0..shape[0] {
            for j in 0..shape[1] {
                for k in 0..shape[2] {
                    let d = [i as f64 * h[0], j as f64 * h[1], k as f64 * h[2]];
                    let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                    table.push(if r == 0.0 {
                        0.5 * equivalent_radius(vol).powi(2)
                    } else {
                        vol / (4.0 * PI * r)
                    });
                }
            }
        }
        Self { shape, table }
    }

    #[inline]
    fn at(&self, a: [usize; 3], b: [usize; 3]) -> f64 {
        let (i, j, k) = (a[0].abs_diff(b[0]), a[1].abs_diff(b[1]), a[2].abs_diff(b[2]));
        self.table[(i * self.shape[1] + j) * self.shape[2] + k]
    }
}

/// `Phi(x) = sum source(x') / (4 pi |x - x'|) dV` over every site, so that
/// `laplacian(Phi) = -source`. Only nonzero source cells enter the sum.
pub fn greens_poisson(source: &SpaceField<f64>, exec: Execution) -> Result<SpaceField<f64>, FieldError> {
    let grid = *source.grid();
    check_poisson_grid(&grid)?;
    let kernel = Kernel::new(&grid);
    let support: Vec<([usize; 3], f64)> = source
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, &v)| (grid.unravel(i), v))
        .collect();
    let values = map_indexed(exec, grid.len(), |i| {
        let here = grid.unravel(i);
        support.iter().map(|&(at, w)| w * kernel.at(here, at)).sum()
    });
    Ok(GridField::new(grid, values)?)
}

/// Component-wise [`greens_poisson`] of a three-vector source.
pub fn greens_poisson_vector(
    source: &SpaceField<[f64; 3]>,
    exec: Execution,
) -> Result<SpaceField<[f64; 3]>, FieldError> {
    let parts: Vec<SpaceField<f64>> = (0..3)
        .map(|c| greens_poisson(&source.map(|v| v[c]), exec))
        .collect::<Result<_, _>>()?;
    let values = (0..source.len())
        .map(|i| [parts[0].values()[i], parts[1].values()[i], parts[2].values()[i]])
        .collect();
    Ok(GridField::new(*source.grid(), values)?)
}

/// Largest `|laplacian(phi) + source|` over interior sites, with the
/// 7-point stencil.
pub fn laplacian_defect(phi: &SpaceField<f64>, source: &SpaceField<f64>) -> Result<f64, FieldError> {
    same_grid(phi, source)?;
    let g = phi.grid();
    check_min_points(g)?;
    let [n0, n1, n2] = g.shape();
    let h2 = g.axes.map(|a| a.step * a.step);
    let v = phi.values();
    let mut worst = 0.0f64;
    for i in 1..n0 - 1 {
        for j in 1..n1 - 1 {
            for k in 1..n2 - 1 {
                let c = v[g.index(i, j, k)];
                let lap = (v[g.index(i + 1, j, k)] + v[g.index(i - 1, j, k)] - 2.0 * c) / h2[0]
                    + (v[g.index(i, j + 1, k)] + v[g.index(i, j - 1, k)] - 2.0 * c) / h2[1]
                    + (v[g.index(i, j, k + 1)] + v[g.index(i, j, k - 1)] - 2.0 * c) / h2[2];
                worst = worst.max((lap + source.values()[g.index(i, j, k)]).abs());
            }
        }
    }
    Ok(worst)
}

/// Interaction potentials felt by a bound electron: the static potentials of
/// the proton sources, weighted by the electron densities.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionPotentials {
    /// `(psi^dagger psi) Phi`.
    pub phi: SpaceField<f64>,
    /// `(psi-bar psi) A`.
    pub a: SpaceField<[f64; 3]>,
    /// `sum psi^dagger psi dV`; 1 for a box-normalised wavefunction.
    pub norm: f64,
}

/// Builds `Phi^I = (psi^dagger psi) Phi` and `A^I = (psi-bar psi) A`, where
/// `Phi` and `A` solve the static Poisson equations for the given proton
/// charge and current densities.
pub fn interaction_potentials(
    psi: &SpaceField<Spinor4>,
    charge: &SpaceField<f64>,
    current: &SpaceField<[f64; 3]>,
    exec: Execution,
) -> Result<InteractionPotentials, FieldError> {
    same_grid(psi, charge)?;
    same_grid(psi, current)?;
    let vol = psi.grid().cell_volume();
    let norm: f64 = psi.values().iter().map(|u| u.norm_squared()).sum::<f64>() * vol;
    if (norm - 1.0).abs() > 1e-6 {
        log::warn!("interaction_potentials: wavefunction norm {norm} is not 1");
    }
    let phi0 = greens_poisson(charge, exec)?;
    let a0 = greens_poisson_vector(current, exec)?;
    let phi = psi.zip_map(&phi0, |u, p| u.norm_squared() * p)?;
    let a = psi.zip_map(&a0, |u, a| {
        let s = scalar_density(u);
        [s * a[0], s * a[1], s * a[2]]
    })?;
    Ok(InteractionPotentials { phi, a, norm })
}

fn scalar_density(u: &Spinor4) -> f64 {
    u[0].norm_sqr() + u[1].norm_sqr() - u[2].norm_sqr() - u[3].norm_sqr()
}

/// Displacement-grid Coulomb potential `A^0 = 1/(4 pi r)`, other components
/// zero. The origin carries the cell average over the equivalent sphere,
/// `3 / (8 pi R)`, matching the self cell of [`greens_poisson`].
pub fn coulomb_kernel(grid: Grid3) -> Result<SpaceField<[f64; 4]>, FieldError> {
    if !grid.axes.iter().all(|a| a.is_symmetric()) {
        return Err(FieldError::ShapeMismatch(
            "displacement grid must be odd and centred on zero".into(),
        ));
    }
    let r_eq = equivalent_radius(grid.cell_volume());
    Ok(GridField::from_fn(grid, |[x, y, z]| {
        let r = (x * x + y * y + z * z).sqrt();
        let a0 = if r == 0.0 { 3.0 / (8.0 * PI * r_eq) } else { 1.0 / (4.0 * PI * r) };
        [a0, 0.0, 0.0, 0.0]
    }))
}

/// `V(x) = e sum J^mu(x') A_mu(x - x') dV`, both fields holding
/// contravariant components. `a` lives on a displacement grid
/// (odd, centred on zero) with the steps of `j`'s grid; every displacement
/// between a site and the support of `j` must lie on it.
pub fn convolution_potential(
    j: &SpaceField<[f64; 4]>,
    a: &SpaceField<[f64; 4]>,
    e: f64,
    exec: Execution,
) -> Result<SpaceField<f64>, FieldError> {
    let gj = *j.grid();
    let ga = *a.grid();
    for (x, y) in gj.axes.iter().zip(&ga.axes) {
        if (x.step - y.step).abs() > 1e-12 * x.step {
            return Err(FieldError::ShapeMismatch(format!(
                "steps differ: {} vs {}",
                x.step, y.step
            )));
        }
        if !y.is_symmetric() {
            return Err(FieldError::ShapeMismatch(
                "potential must be sampled on a displacement grid centred on zero".into(),
            ));
        }
    }
    let support: Vec<([usize; 3], [f64; 4])> = j
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.iter().any(|&c| c != 0.0))
        .map(|(i, v)| (gj.unravel(i), [0, 1, 2, 3].map(|m| METRIC[m] * v[m])))
        .collect();
    let shape = gj.shape();
    let half = ga.shape().map(|n| (n - 1) / 2);
    for axis in 0..3 {
        let lo = support.iter().map(|s| s.0[axis]).min();
        let hi = support.iter().map(|s| s.0[axis]).max();
        if let (Some(lo), Some(hi)) = (lo, hi) {
            let need = hi.max(shape[axis] - 1 - lo);
            if need > half[axis] {
                return Err(FieldError::SupportExceedsGrid(format!(
                    "axis {axis} needs displacements up to {need} steps, potential covers {}",
                    half[axis]
                )));
            }
        }
    }
    let vol = gj.cell_volume();
    let values = map_indexed(exec, gj.len(), |i| {
        let here = gj.unravel(i);
        let mut acc = 0.0;
        for &(at, jl) in &support {
            let d = [0, 1, 2].map(|c| (here[c] + half[c]) - at[c]);
            let av = a.values()[ga.index(d[0], d[1], d[2])];
            acc += jl[0] * av[0] + jl[1] * av[1] + jl[2] * av[2] + jl[3] * av[3];
        }
        e * acc * vol
    });
    Ok(GridField::new(gj, values)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Axis;

    fn odd_grid(n: usize, h: f64) -> Grid3 {
        let a = Axis::centered(n, h).unwrap();
        Grid3 { axes: [a; 3] }
    }

    #[test]
    fn point_source_is_greens_kernel() {
        let g = odd_grid(17, 0.25);
        let mut src = SpaceField::filled(g, 0.0);
        let c = g.index(8, 8, 8);
        src.values_mut()[c] = 1.0 / g.cell_volume();
        let phi = greens_poisson(&src, Execution::Sequential).unwrap();
        for i in [9usize, 12, 16] {
            let r = (i - 8) as f64 * 0.25;
            let v = phi.values()[g.index(i, 8, 8)];
            assert!((v * 4.0 * PI * r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_source_and_linearity() {
        let g = odd_grid(9, 0.5);
        let zero = SpaceField::filled(g, 0.0);
        let phi = greens_poisson(&zero, Execution::Parallel).unwrap();
        assert!(phi.values().iter().all(|&v| v == 0.0));
        let a = GridField::from_fn(g, |[x, y, z]| (-(x * x + y * y + z * z)).exp());
        let b = GridField::from_fn(g, |[x, _, _]| x.cos());
        let ab = a.zip_map(&b, |p, q| 2.0 * p - 3.0 * q).unwrap();
        let (pa, pb, pab) = (
            greens_poisson(&a, Execution::Parallel).unwrap(),
            greens_poisson(&b, Execution::Parallel).unwrap(),
            greens_poisson(&ab, Execution::Parallel).unwrap(),
        );
        for i in 0..g.len() {
            let want = 2.0 * pa.values()[i] - 3.0 * pb.values()[i];
            assert!((pab.values()[i] - want).abs() < 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn grid_limits() {
        let small = SpaceField::filled(odd_grid(7, 1.0), 0.0);
        assert!(matches!(
            greens_poisson(&small, Execution::Sequential),
            Err(FieldError::GridTooSmall { .. })
        ));
        let big = SpaceField::filled(Grid3::cube(65, 1.0).unwrap(), 0.0);
        assert!(matches!(
            greens_poisson(&big, Execution::Sequential),
            Err(FieldError::GridTooLarge { .. })
        ));
    }

    #[test]
    fn convolution_with_point_current_shifts_potential() {
        let gj = odd_grid(9, 0.5);
        let ga = odd_grid(17, 0.5);
        let a = coulomb_kernel(ga).unwrap();
        let mut j = SpaceField::filled(gj, [0.0; 4]);
        j.values_mut()[gj.index(3, 4, 5)] = [2.0, 0.0, 0.0, 0.0];
        let v = convolution_potential(&j, &a, 1.5, Execution::Sequential).unwrap();
        let vol = gj.cell_volume();
        for (i, &val) in v.values().iter().enumerate() {
            let [x, y, z] = gj.point(i);
            let [x0, y0, z0] = gj.point(gj.index(3, 4, 5));
            let r = ((x - x0).powi(2) + (y - y0).powi(2) + (z - z0).powi(2)).sqrt();
            if r > 0.0 {
                let want = 1.5 * 2.0 / (4.0 * PI * r) * vol;
                assert!((val - want).abs() < 1e-12 * want);
            }
        }
        let too_small = coulomb_kernel(odd_grid(9, 0.5)).unwrap();
        assert!(matches!(
            convolution_potential(&j, &too_small, 1.0, Execution::Sequential),
            Err(FieldError::SupportExceedsGrid(_))
        ));
    }
}

//! The gauge-function family `f = sum C_n s^n` over odd `n`, its paired phase
//! `alpha`, and the local transformations they generate, with
//! `s = psi-bar psi` sampled on a grid.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::algebra::{Spinor4, METRIC};
use crate::grid::{Grid, Grid1p1, GridField, SpacetimeField};

use super::dirac::{central, equation_residual_field, interior};
use super::{check_min_points, same_grid, FieldError};

/// Coefficients `C_n` keyed by odd `n`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GaugeCoefficients {
    terms: BTreeMap<i32, f64>,
}

impl GaugeCoefficients {
    pub fn new(terms: impl IntoIterator<Item = (i32, f64)>) -> Result<Self, FieldError> {
        let mut map = BTreeMap::new();
        for (n, c) in terms {
            if n % 2 == 0 {
                return Err(FieldError::InvalidCoefficients(format!("power {n} is even")));
            }
            if !c.is_finite() {
                return Err(FieldError::InvalidCoefficients(format!("C_{n} = {c}")));
            }
            *map.entry(n).or_insert(0.0) += c;
        }
        Ok(Self { terms: map })
    }

    pub fn single(n: i32, c: f64) -> Result<Self, FieldError> {
        Self::new([(n, c)])
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.terms.iter().map(|(&n, &c)| (n, c))
    }

    fn f_at(&self, s: f64) -> f64 {
        self.iter().map(|(n, c)| c * s.powi(n)).sum()
    }

    fn alpha_at(&self, s: f64, e: f64) -> f64 {
        e * self
            .iter()
            .map(|(n, c)| {
                if n == -1 {
                    -c * s.abs().ln()
                } else {
                    n as f64 / (n + 1) as f64 * c * s.powi(n + 1)
                }
            })
            .sum::<f64>()
    }
}

fn nonzero<G: Grid>(s: &GridField<G, f64>) -> Result<(), FieldError> {
    match s.values().iter().position(|&v| v == 0.0) {
        Some(index) => Err(FieldError::ZeroDensity { index }),
        None => Ok(()),
    }
}

/// `f = sum C_n s^n`.
pub fn gauge_f<G: Grid>(s: &GridField<G, f64>, c: &GaugeCoefficients) -> Result<GridField<G, f64>, FieldError> {
    nonzero(s)?;
    Ok(s.map(|&v| c.f_at(v)))
}

/// `alpha = e (sum_{n != -1} n/(n+1) C_n s^(n+1) - C_{-1} ln|s|)`.
pub fn gauge_alpha<G: Grid>(
    s: &GridField<G, f64>,
    c: &GaugeCoefficients,
    e: f64,
) -> Result<GridField<G, f64>, FieldError> {
    nonzero(s)?;
    Ok(s.map(|&v| c.alpha_at(v, e)))
}

/// Max-norm over interior sites and both directions of
/// `d_mu alpha - e s d_mu f`, with central differences.
pub fn gauge_constraint_residual(
    s: &SpacetimeField<f64>,
    c: &GaugeCoefficients,
    e: f64,
) -> Result<f64, FieldError> {
    let g = *s.grid();
    check_min_points(&g)?;
    let f = gauge_f(s, c)?;
    let alpha = gauge_alpha(s, c, e)?;
    let mut worst = 0.0f64;
    for (it, ix) in interior(&g) {
        let sv = s.values()[g.index(it, ix)];
        for mu in 0..2 {
            let da = central(alpha.values(), &g, it, ix, mu);
            let df = central(f.values(), &g, it, ix, mu);
            worst = worst.max((da - e * sv * df).abs());
        }
    }
    Ok(worst)
}

/// Second-order derivative of `v` along `axis` at every site: central inside,
/// three-point one-sided on the edges.
fn gradient(v: &[f64], g: &Grid1p1, axis: usize) -> Vec<f64> {
    let (n, h) = if axis == 0 { (g.t.len, g.t.step) } else { (g.x.len, g.x.step) };
    let at = |it: usize, ix: usize, k: usize| {
        if axis == 0 {
            v[g.index(k, ix)]
        } else {
            v[g.index(it, k)]
        }
    };
    (0..g.len())
        .map(|i| {
            let (it, ix) = (i / g.x.len, i % g.x.len);
            let k = if axis == 0 { it } else { ix };
            if k == 0 {
                let f0 = at(it, ix, 0);
                (4.0 * (at(it, ix, 1) - f0) - (at(it, ix, 2) - f0)) / (2.0 * h)
            } else if k == n - 1 {
                let f0 = at(it, ix, n - 1);
                (4.0 * (f0 - at(it, ix, n - 2)) - (f0 - at(it, ix, n - 3))) / (2.0 * h)
            } else {
                (at(it, ix, k + 1) - at(it, ix, k - 1)) / (2.0 * h)
            }
        })
        .collect()
}

/// `A^T_mu = s A_mu`.
pub fn interaction_four_potential(
    s: &SpacetimeField<f64>,
    a: &SpacetimeField<[f64; 4]>,
) -> Result<SpacetimeField<[f64; 4]>, FieldError> {
    Ok(s.zip_map(a, |&s, a| a.map(|c| s * c))?)
}

/// `psi -> psi exp(-i alpha)`, `A_mu -> A_mu + d_mu f` (covariant components,
/// `d_y f = d_z f = 0` on a 1+1 grid).
pub fn gauge_transform(
    psi: &SpacetimeField<Spinor4>,
    a: &SpacetimeField<[f64; 4]>,
    s: &SpacetimeField<f64>,
    c: &GaugeCoefficients,
    e: f64,
) -> Result<(SpacetimeField<Spinor4>, SpacetimeField<[f64; 4]>), FieldError> {
    same_grid(psi, a)?;
    same_grid(psi, s)?;
    let g = *psi.grid();
    check_min_points(&g)?;
    let f = gauge_f(s, c)?;
    let alpha = gauge_alpha(s, c, e)?;
    let psi2 = psi.zip_map(&alpha, |u, &al| u * Complex64::from_polar(1.0, -al))?;
    let (dt, dx) = (gradient(f.values(), &g, 0), gradient(f.values(), &g, 1));
    let shifted = a
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| [v[0] + dt[i], v[1] + dx[i], v[2], v[3]])
        .collect();
    Ok((psi2, GridField::new(g, shifted)?))
}

/// Largest `|R'(x) - exp(-i alpha) R(x)|` over interior sites, where `R` is
/// the equation residual of `(psi, s A)` and `R'` that of the transformed
/// pair. Zero in the continuum; `O(h^2)` on the grid.
pub fn gauge_covariance_defect(
    psi: &SpacetimeField<Spinor4>,
    a: &SpacetimeField<[f64; 4]>,
    s: &SpacetimeField<f64>,
    c: &GaugeCoefficients,
    e: f64,
    m: f64,
) -> Result<f64, FieldError> {
    let (psi2, a2) = gauge_transform(psi, a, s, c, e)?;
    let alpha = gauge_alpha(s, c, e)?;
    let r1 = equation_residual_field(psi, &interaction_four_potential(s, a)?, e, m)?;
    let r2 = equation_residual_field(&psi2, &interaction_four_potential(s, &a2)?, e, m)?;
    let g = *psi.grid();
    Ok(interior(&g)
        .map(|(it, ix)| {
            let i = g.index(it, ix);
            let rotated = r1.values()[i] * Complex64::from_polar(1.0, -alpha.values()[i]);
            (r2.values()[i] - rotated).norm()
        })
        .fold(0.0, f64::max))
}

/// `mu^2 = -2 eps_rho kappa^rho` with both fields in contravariant components.
pub fn fluctuation_mass_sq<G: Grid>(
    eps: &GridField<G, [f64; 4]>,
    kap: &GridField<G, [f64; 4]>,
) -> Result<GridField<G, f64>, FieldError> {
    Ok(eps.zip_map(kap, |e, k| {
        -2.0 * (0..4).map(|r| METRIC[r] * e[r] * k[r]).sum::<f64>()
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Axis, Grid1};

    fn grid(n: usize, h: f64) -> Grid1p1 {
        Grid1p1 {
            t: Axis::new(n, 0.0, h).unwrap(),
            x: Axis::new(n, 0.0, h).unwrap(),
        }
    }

    #[test]
    fn coefficient_validation() {
        assert!(GaugeCoefficients::single(2, 1.0).is_err());
        assert!(GaugeCoefficients::single(3, f64::NAN).is_err());
        assert!(GaugeCoefficients::new([(1, 2.0), (-1, 0.5), (3, -1.0)]).is_ok());
    }

    #[test]
    fn single_terms() {
        let g = Grid1 { x: Axis::new(5, 0.5, 0.5).unwrap() };
        let s = GridField::from_fn(g, |x| x);
        let one = GaugeCoefficients::single(1, 1.0).unwrap();
        let f = gauge_f(&s, &one).unwrap();
        let a = gauge_alpha(&s, &one, 0.3).unwrap();
        for i in 0..5 {
            let v = s.values()[i];
            assert_eq!(f.values()[i], v);
            assert!((a.values()[i] - 0.3 * v * v / 2.0).abs() < 1e-15);
        }
        let inv = GaugeCoefficients::single(-1, 1.0).unwrap();
        let f = gauge_f(&s, &inv).unwrap();
        let a = gauge_alpha(&s, &inv, 0.3).unwrap();
        for i in 0..5 {
            let v = s.values()[i];
            assert!((f.values()[i] - 1.0 / v).abs() < 1e-15);
            assert!((a.values()[i] + 0.3 * v.ln()).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_density_rejected() {
        let g = Grid1 { x: Axis::new(4, 0.0, 1.0).unwrap() };
        let s = GridField::from_fn(g, |x| x);
        let c = GaugeCoefficients::single(1, 1.0).unwrap();
        assert_eq!(gauge_f(&s, &c), Err(FieldError::ZeroDensity { index: 0 }));
    }

    #[test]
    fn constant_density_is_exact() {
        let g = grid(12, 0.1);
        let s = GridField::filled(g, 0.7);
        let c = GaugeCoefficients::new([(1, 2.0), (-1, 0.5), (3, -1.0)]).unwrap();
        assert_eq!(gauge_constraint_residual(&s, &c, 0.3).unwrap(), 0.0);
        let psi = GridField::from_fn(g, |(t, x)| {
            Spinor4::new(Complex64::from_polar(1.0, x - t), 0.0.into(), 0.0.into(), 0.0.into())
        });
        let a = GridField::from_fn(g, |(t, x)| [t.sin(), x.cos(), 0.1, 0.0]);
        let (psi2, a2) = gauge_transform(&psi, &a, &s, &c, 0.3).unwrap();
        assert_eq!(a2, a);
        let ph = Complex64::from_polar(1.0, -gauge_alpha(&s, &c, 0.3).unwrap().values()[0]);
        for (u, v) in psi.values().iter().zip(psi2.values()) {
            assert_eq!(*v, u * ph);
        }
    }

    #[test]
    fn empty_coefficients_are_identity() {
        let g = grid(9, 0.2);
        let s = GridField::from_fn(g, |(t, x)| 1.0 + 0.1 * (x + t).sin());
        let psi = GridField::filled(g, Spinor4::new(1.0.into(), 0.0.into(), 0.0.into(), 0.0.into()));
        let a = GridField::filled(g, [0.5, 0.0, 0.0, 0.0]);
        let (p2, a2) = gauge_transform(&psi, &a, &s, &GaugeCoefficients::default(), 1.0).unwrap();
        assert_eq!((p2, a2), (psi, a));
    }

    #[test]
    fn fluctuation_mass() {
        let g = Grid1 { x: Axis::new(2, 0.0, 1.0).unwrap() };
        let e = GridField::new(g, vec![[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0]]).unwrap();
        let k = GridField::new(g, vec![[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(fluctuation_mass_sq(&e, &k).unwrap().values(), &[-2.0, 0.0]);
    }
}

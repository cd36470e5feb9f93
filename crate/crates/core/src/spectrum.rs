//! Closed-form Coulomb spectra: the scalar-coupled equation, the conventional
//! Dirac-Coulomb (Sommerfeld) levels, their expansions and fine-structure
//! splittings, and first-order Zeeman patterns.
//!
//! Energies are in units of the particle mass `m = 1`.

use thiserror::Error;

use crate::tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("InvalidQuantumNumbers: {0}")]
    InvalidQuantumNumbers(String),
    #[error("InvalidCoupling: alpha = {alpha}, Z = {z}; both must be positive and finite")]
    InvalidCoupling { alpha: f64, z: f64 },
    #[error("SingularRegime: Z alpha = {za} >= j + 1/2 = {limit}; the conventional level has no real energy")]
    SingularRegime { za: f64, limit: f64 },
    #[error("SeriesGuard: Z alpha = {za} exceeds the expansion guard {guard}")]
    SeriesGuard { za: f64, guard: f64 },
    #[error("DomainError: {0}")]
    DomainError(String),
    #[error("WeakFieldViolated: largest shift {shift:e} is not small against the fine splitting {splitting:e}")]
    WeakFieldViolated { shift: f64, splitting: f64 },
}

/// Positive or negative energy branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    #[default]
    Positive,
    Negative,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }
}

/// Bound-state labels `(n, j, l, kappa)` with `j` stored as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelSpec {
    pub n: u32,
    pub two_j: u32,
    pub l: u32,
    pub branch: Branch,
}

impl LevelSpec {
    /// Level from `n`, `j` (a positive half-integer) and `l = j +/- 1/2`.
    pub fn new(n: u32, j: f64, l: u32) -> Result<Self, SpectrumError> {
        let two_j = 2.0 * j;
        if !(two_j > 0.0 && two_j.fract() == 0.0 && (two_j as u32) % 2 == 1) {
            return Err(SpectrumError::InvalidQuantumNumbers(format!(
                "j = {j} is not a positive half-integer"
            )));
        }
        let level = Self {
            n,
            two_j: two_j as u32,
            l,
            branch: Branch::Positive,
        };
        level.validate()?;
        Ok(level)
    }

    /// Level from the relativistic quantum number and principal number.
    pub fn from_kappa(n: u32, kappa: i32) -> Result<Self, SpectrumError> {
        if kappa == 0 {
            return Err(SpectrumError::InvalidQuantumNumbers("kappa = 0".into()));
        }
        let k = kappa.unsigned_abs();
        let l = if kappa < 0 { k - 1 } else { k };
        let level = Self {
            n,
            two_j: 2 * k - 1,
            l,
            branch: Branch::Positive,
        };
        level.validate()?;
        Ok(level)
    }

    /// Level reached by the `n_r`-th radial state (nodes of the upper
    /// component) of a given `kappa`: `n = n_r + l + 1`.
    pub fn from_radial(kappa: i32, n_r: u32) -> Result<Self, SpectrumError> {
        if kappa == 0 {
            return Err(SpectrumError::InvalidQuantumNumbers("kappa = 0".into()));
        }
        let k = kappa.unsigned_abs();
        let l = if kappa < 0 { k - 1 } else { k };
        Self::from_kappa(n_r + l + 1, kappa)
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    fn validate(&self) -> Result<(), SpectrumError> {
        let bad = |msg: String| Err(SpectrumError::InvalidQuantumNumbers(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.two_j.is_multiple_of(2) {
            return bad(format!("2j = {} must be odd", self.two_j));
        }
        if self.two_j + 1 > 2 * self.n {
            return bad(format!("j = {} exceeds n - 1/2 for n = {}", self.j(), self.n));
        }
        if self.l >= self.n {
            return bad(format!("l = {} must be below n = {}", self.l, self.n));
        }
        let two_l = 2 * self.l;
        if two_l + 1 != self.two_j && two_l != self.two_j + 1 {
            return bad(format!("l = {} is not j +/- 1/2 for j = {}", self.l, self.j()));
        }
        Ok(())
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// `j + 1/2 = |kappa|`.
    pub fn k(&self) -> f64 {
        (self.two_j + 1) as f64 / 2.0
    }

    pub fn kappa(&self) -> i32 {
        let k = self.two_j.div_ceil(2) as i32;
        if 2 * self.l + 1 == self.two_j {
            -k
        } else {
            k
        }
    }

    /// Number of nodes of the upper radial component.
    pub fn radial_nodes(&self) -> u32 {
        self.n - self.l - 1
    }

    /// Spectroscopic label such as `2P1/2`.
    pub fn label(&self) -> String {
        const L: [&str; 7] = ["S", "P", "D", "F", "G", "H", "I"];
        let letter = L.get(self.l as usize).copied().unwrap_or("?");
        format!("{}{}{}/2", self.n, letter, self.two_j)
    }
}

/// Fine-structure constant and nuclear charge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConstants {
    pub alpha: f64,
    pub z: f64,
}

impl CouplingConstants {
    pub fn new(alpha: f64, z: f64) -> Result<Self, SpectrumError> {
        if !(alpha > 0.0 && alpha.is_finite() && z > 0.0 && z.is_finite()) {
            return Err(SpectrumError::InvalidCoupling { alpha, z });
        }
        Ok(Self { alpha, z })
    }

    /// Standard `alpha` with charge number `z`.
    pub fn with_z(z: f64) -> Result<Self, SpectrumError> {
        Self::new(crate::ALPHA, z)
    }

    pub fn za(&self) -> f64 {
        self.alpha * self.z
    }
}

/// `1 - sqrt(1 - x)` without cancellation.
fn one_minus_sqrt_one_minus(x: f64) -> f64 {
    x / (1.0 + (1.0 - x).sqrt())
}

/// `1 - 1 / sqrt(1 + y)` without cancellation.
fn one_minus_inv_sqrt_one_plus(y: f64) -> f64 {
    let s = (1.0 + y).sqrt();
    y / (s * (1.0 + s))
}

fn modified_ratio(level: &LevelSpec, c: &CouplingConstants) -> f64 {
    let a = c.za();
    let k = level.k();
    let d = level.n as f64 - k + (k * k + a * a).sqrt();
    (a / d).powi(2)
}

fn conventional_ratio(level: &LevelSpec, c: &CouplingConstants) -> Result<f64, SpectrumError> {
    let a = c.za();
    let k = level.k();
    if a >= k {
        return Err(SpectrumError::SingularRegime { za: a, limit: k });
    }
    let d = level.n as f64 - k + (k * k - a * a).sqrt();
    Ok((a / d).powi(2))
}

/// Bound energy of the scalar-coupled equation,
/// `E = +/- sqrt(1 - (Z a)^2 / (n - k + sqrt(k^2 + (Z a)^2))^2)`, regular for every `Z`.
pub fn energy_modified(level: &LevelSpec, c: &CouplingConstants) -> f64 {
    level.branch.sign() * (1.0 - modified_ratio(level, c)).sqrt()
}

/// `m - |E|` for the scalar-coupled level, accurate for small `Z alpha`.
pub fn binding_modified(level: &LevelSpec, c: &CouplingConstants) -> f64 {
    one_minus_sqrt_one_minus(modified_ratio(level, c))
}

/// Sommerfeld fine-structure formula of the conventional Dirac-Coulomb problem.
pub fn energy_conventional(level: &LevelSpec, c: &CouplingConstants) -> Result<f64, SpectrumError> {
    let y = conventional_ratio(level, c)?;
    Ok(level.branch.sign() / (1.0 + y).sqrt())
}

/// `m - |E|` for the conventional level.
pub fn binding_conventional(level: &LevelSpec, c: &CouplingConstants) -> Result<f64, SpectrumError> {
    Ok(one_minus_inv_sqrt_one_plus(conventional_ratio(level, c)?))
}

/// Expansion through `(Z alpha)^4`; the quartic term has the opposite sign to
/// the conventional expansion.
pub fn energy_series(level: &LevelSpec, c: &CouplingConstants) -> Result<f64, SpectrumError> {
    let a = c.za();
    if a >= tolerances::SERIES_GUARD {
        return Err(SpectrumError::SeriesGuard {
            za: a,
            guard: tolerances::SERIES_GUARD,
        });
    }
    let n = level.n as f64;
    let a2 = a * a;
    let quartic = a2 * a2 / (2.0 * n.powi(3)) * (1.0 / level.k() - 1.0 / (4.0 * n));
    Ok(level.branch.sign() * (1.0 - a2 / (2.0 * n * n) + quartic))
}

/// Leading-order splitting `(Z alpha)^4 / (2 n^3) |1/k1 - 1/k2|` between two
/// levels of the same `n`.
pub fn fine_splitting(n: u32, j1: f64, j2: f64, c: &CouplingConstants) -> Result<f64, SpectrumError> {
    for j in [j1, j2] {
        let l = (j - 0.5).max(0.0) as u32;
        LevelSpec::new(n, j, l)?;
    }
    Ok(splitting_formula(n, j1 + 0.5, j2 + 0.5, c))
}

fn splitting_formula(n: u32, k1: f64, k2: f64, c: &CouplingConstants) -> f64 {
    let a2 = c.za() * c.za();
    a2 * a2 / (2.0 * (n as f64).powi(3)) * (1.0 / k1 - 1.0 / k2).abs()
}

/// `|E(n, j1) - E(n, j2)|` from the exact scalar-coupled formula.
pub fn exact_splitting_modified(n: u32, j1: f64, j2: f64, c: &CouplingConstants) -> Result<f64, SpectrumError> {
    let a = level_any_l(n, j1)?;
    let b = level_any_l(n, j2)?;
    Ok((binding_modified(&a, c) - binding_modified(&b, c)).abs())
}

/// `|E(n, j1) - E(n, j2)|` from the Sommerfeld formula.
pub fn exact_splitting_conventional(
    n: u32,
    j1: f64,
    j2: f64,
    c: &CouplingConstants,
) -> Result<f64, SpectrumError> {
    let a = level_any_l(n, j1)?;
    let b = level_any_l(n, j2)?;
    Ok((binding_conventional(&a, c)? - binding_conventional(&b, c)?).abs())
}

fn level_any_l(n: u32, j: f64) -> Result<LevelSpec, SpectrumError> {
    LevelSpec::new(n, j, (j - 0.5).max(0.0) as u32)
}

/// Relative ground-state gap `1 - sqrt(1 - (Z alpha)^4)` between the two theories.
pub fn percent_difference(c: &CouplingConstants) -> Result<f64, SpectrumError> {
    let a = c.za();
    if a >= 1.0 {
        return Err(SpectrumError::DomainError(format!(
            "Z alpha = {a} >= 1: the conventional ground state does not exist"
        )));
    }
    Ok(one_minus_sqrt_one_minus(a.powi(4)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelRow {
    pub level: LevelSpec,
    pub modified: f64,
    /// `None` where the conventional level is singular.
    pub conventional: Option<f64>,
    /// 1 for the highest energy; levels sharing `j` share a rank.
    pub rank_modified: usize,
    pub rank_conventional: Option<usize>,
}

/// All positive-energy levels of shell `n`, ordered by `j` then `l`, with
/// energy ranks under both theories.
pub fn level_order_report(n: u32, c: &CouplingConstants) -> Result<Vec<LevelRow>, SpectrumError> {
    if n == 0 {
        return Err(SpectrumError::InvalidQuantumNumbers("n must be at least 1".into()));
    }
    let mut levels = Vec::new();
    for two_j in (1..2 * n).step_by(2) {
        for l in [(two_j - 1) / 2, two_j.div_ceil(2)] {
            if l < n {
                levels.push(LevelSpec {
                    n,
                    two_j,
                    l,
                    branch: Branch::Positive,
                });
            }
        }
    }
    let modified: Vec<f64> = levels.iter().map(|l| energy_modified(l, c)).collect();
    let conventional: Vec<Option<f64>> = levels
        .iter()
        .map(|l| energy_conventional(l, c).ok())
        .collect();
    let rank = |values: &[Option<f64>], i: usize| -> Option<usize> {
        let v = values[i]?;
        let mut distinct: Vec<f64> = values.iter().flatten().copied().collect();
        distinct.sort_by(|a, b| b.total_cmp(a));
        distinct.dedup();
        distinct.iter().position(|x| *x == v).map(|p| p + 1)
    };
    let mod_opt: Vec<Option<f64>> = modified.iter().map(|v| Some(*v)).collect();
    Ok(levels
        .iter()
        .enumerate()
        .map(|(i, level)| LevelRow {
            level: *level,
            modified: modified[i],
            conventional: conventional[i],
            rank_modified: rank(&mod_opt, i).expect("modified energies always exist"),
            rank_conventional: rank(&conventional, i),
        })
        .collect())
}

/// Lande factor of `|l, s = 1/2, j>`.
pub fn lande_g(level: &LevelSpec) -> f64 {
    let j = level.j();
    let l = level.l as f64;
    1.0 + (j * (j + 1.0) - l * (l + 1.0) + 0.75) / (2.0 * j * (j + 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeemanSublevel {
    pub m_j: f64,
    /// First-order shift `<-(e/2m) (l + 2s).B>` in units of `m`.
    pub shift: f64,
    /// Unperturbed scalar-coupled energy plus the shift.
    pub energy: f64,
}

/// First-order Zeeman sublevels of `level` in a field `b` (units of `m^2/e`,
/// field along z). The sublevels sit on the scalar-coupled level, so the
/// doublet stack follows that theory's reversed fine-structure order.
pub fn zeeman_pattern(
    level: &LevelSpec,
    c: &CouplingConstants,
    b: f64,
) -> Result<Vec<ZeemanSublevel>, SpectrumError> {
    if !b.is_finite() {
        return Err(SpectrumError::DomainError(format!("field {b} is not finite")));
    }
    let g = lande_g(level);
    let e0 = energy_modified(level, c);
    let subs: Vec<ZeemanSublevel> = (0..=level.two_j)
        .map(|i| {
            let m_j = -level.j() + i as f64;
            let shift = -0.5 * b * g * m_j;
            ZeemanSublevel {
                m_j,
                shift,
                energy: e0 + shift,
            }
        })
        .collect();
    let largest = subs.iter().map(|s| s.shift.abs()).fold(0.0, f64::max);
    let k = level.k();
    let splitting = splitting_formula(level.n, k, k + 1.0, c);
    if largest > 0.0 && largest >= tolerances::ZEEMAN_WEAK_FIELD * splitting {
        return Err(SpectrumError::WeakFieldViolated {
            shift: largest,
            splitting,
        });
    }
    Ok(subs)
}

/// Mass-unit energy to eV.
pub fn to_ev(energy: f64) -> f64 {
    energy * crate::ELECTRON_MASS_EV
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cz(z: f64) -> CouplingConstants {
        CouplingConstants::with_z(z).unwrap()
    }

    fn lvl(n: u32, j: f64, l: u32) -> LevelSpec {
        LevelSpec::new(n, j, l).unwrap()
    }

    #[test]
    fn quantum_number_validation() {
        assert!(LevelSpec::new(1, 0.5, 0).is_ok());
        assert!(LevelSpec::new(1, 1.5, 1).is_err());
        assert!(LevelSpec::new(2, 0.5, 2).is_err());
        assert!(LevelSpec::new(2, 1.0, 1).is_err());
        assert!(LevelSpec::new(0, 0.5, 0).is_err());
        assert!(LevelSpec::new(3, 1.5, 0).is_err());
        assert!(LevelSpec::from_kappa(2, 0).is_err());
        assert!(CouplingConstants::new(0.0, 1.0).is_err());
        assert!(CouplingConstants::new(crate::ALPHA, -1.0).is_err());
    }

    #[test]
    fn kappa_mapping() {
        assert_eq!(lvl(1, 0.5, 0).kappa(), -1);
        assert_eq!(lvl(2, 0.5, 1).kappa(), 1);
        assert_eq!(lvl(2, 1.5, 1).kappa(), -2);
        assert_eq!(lvl(3, 1.5, 2).kappa(), 2);
        let l = LevelSpec::from_radial(1, 0).unwrap();
        assert_eq!((l.n, l.l, l.two_j), (2, 1, 1));
        assert_eq!(LevelSpec::from_radial(-1, 1).unwrap().n, 2);
        assert_eq!(LevelSpec::from_radial(-2, 0).unwrap().label(), "2P3/2");
        assert_eq!(lvl(2, 0.5, 1).radial_nodes(), 0);
    }

    #[test]
    fn ground_state_closed_forms() {
        let g = lvl(1, 0.5, 0);
        let c = CouplingConstants::new(1.0, 1.0).unwrap();
        assert!((energy_modified(&g, &c) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let c = cz(1e-8);
        assert!((energy_modified(&g, &c) - 1.0).abs() < 1e-15);
        let c = cz(40.0);
        let a = c.za();
        assert!((energy_conventional(&g, &c).unwrap() - (1.0 - a * a).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn conventional_singular_regime() {
        let g = lvl(1, 0.5, 0);
        assert!(energy_conventional(&g, &cz(137.0)).is_ok());
        assert!(matches!(
            energy_conventional(&g, &cz(138.0)),
            Err(SpectrumError::SingularRegime { .. })
        ));
        assert!(energy_conventional(&lvl(2, 1.5, 1), &cz(138.0)).is_ok());
    }

    #[test]
    fn branch_symmetry_exact() {
        let l = lvl(3, 1.5, 2);
        let c = cz(50.0);
        let neg = l.with_branch(Branch::Negative);
        assert_eq!(energy_modified(&l, &c), -energy_modified(&neg, &c));
    }

    #[test]
    fn series_quartic_sign_and_guard() {
        let l = lvl(2, 0.5, 0);
        let c = cz(1.0);
        let e = energy_series(&l, &c).unwrap();
        let a2 = c.za().powi(2);
        assert!(e - (1.0 - a2 / 8.0) > 0.0);
        assert!(energy_series(&l, &cz(50.0)).is_err());
        let err = (e - energy_modified(&l, &c)).abs();
        assert!(err < c.za().powi(6), "{err}");
    }

    #[test]
    fn splitting_values() {
        let c = cz(1.0);
        assert_eq!(fine_splitting(2, 0.5, 0.5, &c).unwrap(), 0.0);
        let s = fine_splitting(2, 0.5, 1.5, &c).unwrap();
        let want = c.za().powi(4) / 32.0;
        assert!(((s - want) / want).abs() < 1e-12);
        assert!((to_ev(s) - 4.528e-5).abs() < 1e-7);
        let m = exact_splitting_modified(2, 0.5, 1.5, &c).unwrap();
        let v = exact_splitting_conventional(2, 0.5, 1.5, &c).unwrap();
        assert!(((m - v) / s).abs() < 1e-4);
        assert!(fine_splitting(2, 2.5, 0.5, &c).is_err());
    }

    #[test]
    fn percent_table() {
        for (z, want) in [(50.0, 0.8901), (75.0, 4.5916), (100.0, 15.358)] {
            let p = 100.0 * percent_difference(&cz(z)).unwrap();
            assert!((p - want).abs() < 1e-3, "Z={z}: {p}");
        }
        assert!(percent_difference(&cz(140.0)).is_err());
    }

    #[test]
    fn ordering_report() {
        let rows = level_order_report(2, &cz(1.0)).unwrap();
        assert_eq!(rows.len(), 3);
        let p12 = rows.iter().find(|r| r.level.label() == "2P1/2").unwrap();
        let p32 = rows.iter().find(|r| r.level.label() == "2P3/2").unwrap();
        assert!(p12.modified > p32.modified);
        assert!(p12.conventional.unwrap() < p32.conventional.unwrap());
        assert_eq!(p12.rank_modified, 1);
        assert_eq!(p32.rank_conventional, Some(1));
        assert_eq!(level_order_report(1, &cz(1.0)).unwrap().len(), 1);
        let heavy = level_order_report(1, &cz(150.0)).unwrap();
        assert!(heavy[0].conventional.is_none());
        assert!(heavy[0].rank_conventional.is_none());
    }

    #[test]
    fn zeeman_antisymmetric_and_reversed_stack() {
        let c = cz(1.0);
        let p12 = lvl(2, 0.5, 1);
        let p32 = lvl(2, 1.5, 1);
        assert!(zeeman_pattern(&p12, &c, 0.0).unwrap().iter().all(|s| s.shift == 0.0));
        let b = 1e-12;
        let a = zeeman_pattern(&p12, &c, b).unwrap();
        let d = zeeman_pattern(&p32, &c, b).unwrap();
        for subs in [&a, &d] {
            let n = subs.len();
            for i in 0..n {
                assert_eq!(subs[i].shift, -subs[n - 1 - i].shift);
            }
        }
        let low_a = a.iter().map(|s| s.energy).fold(f64::INFINITY, f64::min);
        let high_d = d.iter().map(|s| s.energy).fold(f64::NEG_INFINITY, f64::max);
        assert!(low_a > high_d);
        assert!(matches!(
            zeeman_pattern(&p12, &c, 1e-6),
            Err(SpectrumError::WeakFieldViolated { .. })
        ));
    }

    #[test]
    fn lande_factors() {
        assert!((lande_g(&lvl(1, 0.5, 0)) - 2.0).abs() < 1e-15);
        assert!((lande_g(&lvl(2, 0.5, 1)) - 2.0 / 3.0).abs() < 1e-15);
        assert!((lande_g(&lvl(2, 1.5, 1)) - 4.0 / 3.0).abs() < 1e-15);
    }
}

//! Dirac-representation gamma algebra, the discrete space/time/particle
//! conjugation operators, the spinor representation of restricted Lorentz
//! transformations, and the block energy operator of the scalar-coupled
//! equation.
//!
//! Gamma matrices use the standard Dirac (Bjorken-Drell) basis. All entries
//! of products of gammas are Gaussian integers, so identities among them are
//! checked with exact equality.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use thiserror::Error;

use crate::grid::{Grid, Grid1p1, GridField, SpacetimeField};

pub type ComplexMatrix4 = Matrix4<Complex64>;
pub type Spinor4 = Vector4<Complex64>;
pub type RealMatrix4 = Matrix4<f64>;

/// Minkowski metric diag(+1, -1, -1, -1).
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("IndexOutOfRange: {what} index {index} not in {range}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        range: &'static str,
    },
    #[error("NotLorentz: |a g a^T - g| = {defect:e} exceeds tolerance")]
    NotLorentz { defect: f64 },
    #[error("NotRestricted: det = {det}, a00 = {a00}; only the proper orthochronous group has a logarithm")]
    NotRestricted { det: f64, a00: f64 },
    #[error("LogUndefined: principal logarithm does not exist (rotation by pi or non-convergent square root)")]
    LogUndefined,
    #[error("AsymmetricTimeGrid: time axis must have an odd number of samples centred on t = 0")]
    AsymmetricTimeGrid,
    #[error("ZeroTestField: test field vanishes at the evaluation point")]
    ZeroTestField,
}

/// Contravariant four-vector `(t, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FourVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl FourVector {
    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self { t, x, y, z }
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    pub fn spatial(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Minkowski inner product with metric (+,-,-,-).
    pub fn dot(self, other: FourVector) -> f64 {
        self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z
    }

    pub fn square(self) -> f64 {
        self.dot(self)
    }

    pub fn spatial_norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Covariant components `g_{mu nu} v^nu`.
    pub fn lower(self) -> [f64; 4] {
        [self.t, -self.x, -self.y, -self.z]
    }

    /// On-shell four-momentum of mass `m` with spatial momentum `p`.
    pub fn on_shell(m: f64, p: [f64; 3]) -> Self {
        let e = (m * m + p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        Self::new(e, p[0], p[1], p[2])
    }

    /// `gamma^mu v_mu`.
    pub fn slash(self) -> ComplexMatrix4 {
        let l = self.lower();
        let g = gammas();
        g[0] * Complex64::from(l[0])
            + g[1] * Complex64::from(l[1])
            + g[2] * Complex64::from(l[2])
            + g[3] * Complex64::from(l[3])
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector::new(self.t + o.t, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector::new(self.t - o.t, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector::new(-self.t, -self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector::new(self.t * s, self.x * s, self.y * s, self.z * s)
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pauli matrix `sigma_i`, `i` in 1..=3.
pub fn pauli(i: usize) -> Result<Matrix2<Complex64>, AlgebraError> {
    match i {
        1 => Ok(Matrix2::new(ZERO, ONE, ONE, ZERO)),
        2 => Ok(Matrix2::new(ZERO, -I, I, ZERO)),
        3 => Ok(Matrix2::new(ONE, ZERO, ZERO, -ONE)),
        _ => Err(AlgebraError::IndexOutOfRange {
            what: "pauli",
            index: i,
            range: "1..=3",
        }),
    }
}

fn pauli_unchecked(i: usize) -> Matrix2<Complex64> {
    pauli(i).expect("pauli index in range")
}

/// Assembles a 4x4 matrix from 2x2 blocks `[[a, b], [c, d]]`.
pub fn blocks(
    a: &Matrix2<Complex64>,
    b: &Matrix2<Complex64>,
    c_: &Matrix2<Complex64>,
    d: &Matrix2<Complex64>,
) -> ComplexMatrix4 {
    let mut m = ComplexMatrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(a);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(b);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(c_);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(d);
    m
}

/// Dirac-representation `gamma^mu`.
pub fn gamma(mu: usize) -> Result<ComplexMatrix4, AlgebraError> {
    let id = Matrix2::<Complex64>::identity();
    let z = Matrix2::<Complex64>::zeros();
    match mu {
        0 => Ok(blocks(&id, &z, &z, &(-id))),
        1..=3 => {
            let s = pauli_unchecked(mu);
            Ok(blocks(&z, &s, &(-s), &z))
        }
        _ => Err(AlgebraError::IndexOutOfRange {
            what: "gamma",
            index: mu,
            range: "0..=3",
        }),
    }
}

/// All four gammas, indexed by `mu`.
pub fn gammas() -> [ComplexMatrix4; 4] {
    [0, 1, 2, 3].map(|mu| gamma(mu).expect("gamma index in range"))
}

/// Block matrices `rho_i` built from 2x2 identity blocks.
pub fn rho(i: usize) -> Result<ComplexMatrix4, AlgebraError> {
    let id = Matrix2::<Complex64>::identity();
    let z = Matrix2::<Complex64>::zeros();
    match i {
        1 => Ok(blocks(&z, &id, &id, &z)),
        2 => Ok(blocks(&z, &(id * -I), &(id * I), &z)),
        3 => Ok(blocks(&id, &z, &z, &(-id))),
        _ => Err(AlgebraError::IndexOutOfRange {
            what: "rho",
            index: i,
            range: "1..=3",
        }),
    }
}

/// The unitary `U = (1/sqrt 2) [[I, iI], [iI, I]]` that rotates `rho_2` into `-rho_3`.
pub fn diagonalizer() -> ComplexMatrix4 {
    let id = Matrix2::<Complex64>::identity();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    blocks(&id, &(id * I), &(id * I), &id) * c(s, 0.0)
}

/// `sigma . v` as a 2x2 matrix.
pub fn sigma_dot(v: [f64; 3]) -> Matrix2<Complex64> {
    (1..=3).fold(Matrix2::zeros(), |acc, i| {
        acc + pauli_unchecked(i) * Complex64::from(v[i - 1])
    })
}

/// 4x4 spin matrix `Sigma^k = diag(sigma_k, sigma_k)`.
pub fn spin_sigma(k: usize) -> Result<ComplexMatrix4, AlgebraError> {
    let s = pauli(k)?;
    let z = Matrix2::zeros();
    Ok(blocks(&s, &z, &z, &s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscreteKind {
    /// `S_s = gamma^0`
    SpaceInversion,
    /// `T_s = gamma^1 gamma^2 gamma^3`
    TimeInversion,
    /// `O_s = i gamma^0 gamma^1 gamma^3`
    ParticleConjugation,
}

pub fn discrete_operator(kind: DiscreteKind) -> ComplexMatrix4 {
    let g = gammas();
    match kind {
        DiscreteKind::SpaceInversion => g[0],
        DiscreteKind::TimeInversion => g[1] * g[2] * g[3],
        DiscreteKind::ParticleConjugation => g[0] * g[1] * g[3] * I,
    }
}

pub fn anticommutator(a: &ComplexMatrix4, b: &ComplexMatrix4) -> ComplexMatrix4 {
    a * b + b * a
}

pub fn commutator(a: &ComplexMatrix4, b: &ComplexMatrix4) -> ComplexMatrix4 {
    a * b - b * a
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix4, b: &ComplexMatrix4) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_unitary_exact(m: &ComplexMatrix4) -> bool {
    m * m.adjoint() == ComplexMatrix4::identity()
}

/// `a g a^T - g`, max entry, relative to the size of `a`.
pub fn lorentz_defect(a: &RealMatrix4) -> f64 {
    let g = RealMatrix4::from_diagonal(&Vector4::from(METRIC));
    let d = a * g * a.transpose() - g;
    let scale = a.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    d.amax() / (scale * scale)
}

/// Boost with the given rapidity along a unit direction.
pub fn boost(rapidity: f64, direction: [f64; 3]) -> RealMatrix4 {
    let n = normalize3(direction);
    let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
    let mut a = RealMatrix4::identity();
    a[(0, 0)] = ch;
    for i in 0..3 {
        a[(0, i + 1)] = -sh * n[i];
        a[(i + 1, 0)] = -sh * n[i];
        for j in 0..3 {
            a[(i + 1, j + 1)] += (ch - 1.0) * n[i] * n[j];
        }
    }
    a
}

/// Active rotation by `angle` about a unit axis (Rodrigues form).
pub fn rotation(angle: f64, axis: [f64; 3]) -> RealMatrix4 {
    let n = normalize3(axis);
    let (s, co) = angle.sin_cos();
    let mut a = RealMatrix4::identity();
    let k = [[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]];
    for i in 0..3 {
        for j in 0..3 {
            let kk: f64 = (0..3).map(|l| k[i][l] * k[l][j]).sum();
            a[(i + 1, j + 1)] += s * k[i][j] + (1.0 - co) * kk;
        }
    }
    a
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Lie-algebra element of the Lorentz group: `a = exp(generator)`, mixed
/// indices `generator^mu_nu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzGenerator(pub RealMatrix4);

impl LorentzGenerator {
    /// Rotation generator about a unit axis.
    pub fn rotation(angle: f64, axis: [f64; 3]) -> Self {
        let n = normalize3(axis);
        let mut m = RealMatrix4::zeros();
        m[(1, 2)] = -angle * n[2];
        m[(2, 1)] = angle * n[2];
        m[(1, 3)] = angle * n[1];
        m[(3, 1)] = -angle * n[1];
        m[(2, 3)] = -angle * n[0];
        m[(3, 2)] = angle * n[0];
        Self(m)
    }

    /// Boost generator matching [`boost`].
    pub fn boost(rapidity: f64, direction: [f64; 3]) -> Self {
        let n = normalize3(direction);
        let mut m = RealMatrix4::zeros();
        for i in 0..3 {
            m[(0, i + 1)] = -rapidity * n[i];
            m[(i + 1, 0)] = -rapidity * n[i];
        }
        Self(m)
    }

    /// Antisymmetric lower-index coefficients `omega_{mu nu}`.
    pub fn lowered(&self) -> RealMatrix4 {
        let mut w = RealMatrix4::zeros();
        for mu in 0..4 {
            for nu in 0..4 {
                w[(mu, nu)] = METRIC[mu] * self.0[(mu, nu)];
            }
        }
        (w - w.transpose()) * 0.5
    }
}

/// Spinor matrix `L_s` for a Lorentz-algebra element, normalised so that
/// `L_s gamma^mu L_s^-1 = exp(generator)^mu_nu gamma^nu`.
///
/// Equivalent to `exp(-(i/2) omega_{mu nu} S^{mu nu})`, `S = (i/4)[gamma, gamma]`,
/// with `omega` the lowered generator of the inverse transformation.
pub fn spinor_from_generator(generator: &LorentzGenerator) -> ComplexMatrix4 {
    let w = generator.lowered();
    let g = gammas();
    let mut x = ComplexMatrix4::zeros();
    for mu in 0..4 {
        for nu in 0..4 {
            if w[(mu, nu)] != 0.0 {
                x += g[mu] * g[nu] * Complex64::from(-0.25 * w[(mu, nu)]);
            }
        }
    }
    x.exp()
}

/// Spinor representation of a restricted Lorentz matrix via its principal logarithm.
pub fn spinor_lorentz(a: &RealMatrix4) -> Result<ComplexMatrix4, AlgebraError> {
    let defect = lorentz_defect(a);
    if !(defect <= crate::tolerances::LORENTZ_MEMBERSHIP) {
        return Err(AlgebraError::NotLorentz { defect });
    }
    let det = a.determinant();
    if det <= 0.0 || a[(0, 0)] < 1.0 - crate::tolerances::LORENTZ_MEMBERSHIP {
        return Err(AlgebraError::NotRestricted { det, a00: a[(0, 0)] });
    }
    let log = principal_log(a).ok_or(AlgebraError::LogUndefined)?;
    Ok(spinor_from_generator(&LorentzGenerator(log)))
}

fn sqrt_denman_beavers(a: &RealMatrix4) -> Option<RealMatrix4> {
    let mut y = *a;
    let mut z = RealMatrix4::identity();
    for _ in 0..100 {
        let yi = y.try_inverse()?;
        let zi = z.try_inverse()?;
        let yn = (y + zi) * 0.5;
        let zn = (z + yi) * 0.5;
        let delta = (yn - y).amax();
        y = yn;
        z = zn;
        if delta <= 1e-15 * y.amax() {
            return Some(y);
        }
    }
    None
}

/// Principal matrix logarithm by inverse scaling and squaring.
pub fn principal_log(a: &RealMatrix4) -> Option<RealMatrix4> {
    let id = RealMatrix4::identity();
    let mut y = *a;
    let mut k = 0_i32;
    while (y - id).norm() > 0.25 {
        y = sqrt_denman_beavers(&y)?;
        k += 1;
        if k > 60 {
            return None;
        }
    }
    // log(y) = 2 atanh(z), z = (y - I)(y + I)^-1
    let z = (y - id) * (y + id).try_inverse()?;
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for j in 1..200 {
        term *= z2;
        let add = term / (2 * j + 1) as f64;
        sum += add;
        if add.amax() < 1e-18 {
            break;
        }
    }
    Some(sum * 2.0 * 2f64.powi(k))
}

/// `L_s gamma^mu L_s^-1 - a^mu_nu gamma^nu`, maximised over `mu` and entries.
pub fn covariance_defect(l: &ComplexMatrix4, a: &RealMatrix4) -> f64 {
    let g = gammas();
    let Some(linv) = l.try_inverse() else {
        return f64::INFINITY;
    };
    (0..4)
        .map(|mu| {
            let lhs = l * g[mu] * linv;
            let rhs = (0..4).fold(ComplexMatrix4::zeros(), |acc, nu| {
                acc + g[nu] * Complex64::from(a[(mu, nu)])
            });
            max_abs_diff(&lhs, &rhs)
        })
        .fold(0.0, f64::max)
}

/// Energy operator `rho_1 sigma.(p - e A) + rho_3 (m + e Phi)` for constant potentials.
pub fn energy_operator_matrix(
    p: [f64; 3],
    phi_i: f64,
    a_i: [f64; 3],
    charge: f64,
    mass: f64,
) -> ComplexMatrix4 {
    let k = [
        p[0] - charge * a_i[0],
        p[1] - charge * a_i[1],
        p[2] - charge * a_i[2],
    ];
    let sk = sigma_dot(k);
    let z = Matrix2::zeros();
    let kinetic = blocks(&z, &sk, &sk, &z);
    let mass_term = rho(3).expect("rho_3") * Complex64::from(mass + charge * phi_i);
    kinetic + mass_term
}

/// Ascending eigenvalues of a Hermitian 4x4 matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix4) -> [f64; 4] {
    let eig = m.symmetric_eigen();
    let mut v: [f64; 4] = [
        eig.eigenvalues[0],
        eig.eigenvalues[1],
        eig.eigenvalues[2],
        eig.eigenvalues[3],
    ];
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Largest mismatch `|lambda_k + lambda_{3-k}|` of an ascending spectrum.
pub fn spectrum_pairing_defect(eigs: &[f64; 4]) -> f64 {
    (0..2)
        .map(|k| (eigs[k] + eigs[3 - k]).abs())
        .fold(0.0, f64::max)
}

/// Affine test field `f(X) = c + k_mu X^mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineField {
    pub constant: f64,
    pub slope: [f64; 4],
}

impl AffineField {
    pub fn constant(c: f64) -> Self {
        Self {
            constant: c,
            slope: [0.0; 4],
        }
    }

    pub fn value(&self, x: FourVector) -> f64 {
        let xa = x.to_array();
        self.constant + (0..4).map(|mu| self.slope[mu] * xa[mu]).sum::<f64>()
    }

    /// `partial_mu f` (derivative with respect to the contravariant coordinate).
    pub fn gradient(&self) -> [f64; 4] {
        self.slope
    }
}

/// `[Omega, P_omega] f` at `x` as a 4x4 matrix, expanded by the product rule
/// with `Omega = gamma^mu X_mu` and `P_omega = i gamma^nu partial_nu`.
pub fn common_commutator_applied(x: FourVector, field: &AffineField) -> ComplexMatrix4 {
    let g = gammas();
    let xl = x.lower();
    let f = field.value(x);
    let df = field.gradient();
    let mut m = ComplexMatrix4::zeros();
    for mu in 0..4 {
        for nu in 0..4 {
            // Omega P f: gamma^mu X_mu i gamma^nu d_nu f
            m += g[mu] * g[nu] * (I * xl[mu] * df[nu]);
            // P (Omega f): i gamma^nu gamma^mu [ (d_nu X_mu) f + X_mu d_nu f ]
            let d_nu_x_mu = if mu == nu { METRIC[mu] } else { 0.0 };
            m -= g[nu] * g[mu] * (I * (d_nu_x_mu * f + xl[mu] * df[nu]));
        }
    }
    m
}

/// Scalar (trace) coefficient of `[Omega, P_omega] f / f` at `x`.
pub fn commutator_coefficient(x: FourVector, field: &AffineField) -> Result<Complex64, AlgebraError> {
    let f = field.value(x);
    if f == 0.0 {
        return Err(AlgebraError::ZeroTestField);
    }
    Ok(common_commutator_applied(x, field).trace() / (4.0 * f))
}

/// `[Omega, P_omega]` coefficient evaluated on the unit test field.
pub fn common_commutator_check(x: FourVector) -> Complex64 {
    commutator_coefficient(x, &AffineField::constant(1.0)).expect("unit field is nonzero")
}

fn require_symmetric_time(grid: &Grid1p1) -> Result<(), AlgebraError> {
    if grid.t.is_symmetric() {
        Ok(())
    } else {
        Err(AlgebraError::AsymmetricTimeGrid)
    }
}

/// `(T psi)(t, x) = psi(-t, x)` on a time-symmetric grid.
pub fn time_reverse<T: Clone>(field: &SpacetimeField<T>) -> Result<SpacetimeField<T>, AlgebraError> {
    let grid = *field.grid();
    require_symmetric_time(&grid)?;
    let nt = grid.t.len;
    let nx = grid.x.len;
    let v = field.values();
    let values = (0..grid.len())
        .map(|idx| {
            let (it, ix) = (idx / nx, idx % nx);
            v[grid.index(nt - 1 - it, ix)].clone()
        })
        .collect();
    Ok(GridField::new(grid, values).expect("same grid"))
}

/// Sample types that support the linear time-parity projection.
pub trait ParityProjectable: Clone {
    fn half_sum(a: &Self, b: &Self, sign: f64) -> Self;
}

impl ParityProjectable for Complex64 {
    fn half_sum(a: &Self, b: &Self, sign: f64) -> Self {
        (a + b * sign) * 0.5
    }
}

impl ParityProjectable for Spinor4 {
    fn half_sum(a: &Self, b: &Self, sign: f64) -> Self {
        (a + b * Complex64::from(sign)) * Complex64::from(0.5)
    }
}

impl ParityProjectable for f64 {
    fn half_sum(a: &Self, b: &Self, sign: f64) -> Self {
        (a + b * sign) * 0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeParity {
    Even,
    Odd,
}

impl TimeParity {
    pub fn sign(self) -> f64 {
        match self {
            TimeParity::Even => 1.0,
            TimeParity::Odd => -1.0,
        }
    }
}

/// `(1 +/- T) psi / 2`.
pub fn time_parity_project<T: ParityProjectable>(
    field: &SpacetimeField<T>,
    parity: TimeParity,
) -> Result<SpacetimeField<T>, AlgebraError> {
    let reversed = time_reverse(field)?;
    Ok(field
        .zip_map(&reversed, |a, b| T::half_sum(a, b, parity.sign()))
        .expect("same grid"))
}

/// `O_omega psi = i gamma^0 gamma^1 gamma^3 psi^*`.
pub fn particle_conjugate<G: Grid>(field: &GridField<G, Spinor4>) -> GridField<G, Spinor4> {
    let o = discrete_operator(DiscreteKind::ParticleConjugation);
    field.map(|psi| o * psi.conjugate())
}

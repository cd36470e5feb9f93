//! Tree-level cross sections with the scalar-coupled vertex: plane-wave
//! spinors, the spin sums `Sigma1` (scalar vertex) and `Sigma2` (vector
//! current), Coulomb scattering and electron-proton scattering with recoil.
//!
//! Cross sections drop the overall constant 1/16 of the lowest-order
//! amplitude, so the Coulomb result reduces to the Rutherford formula as
//! written. Units are any consistent energy unit; cross sections come out in
//! inverse energy squared per steradian.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{gamma, sigma_dot, FourVector, Spinor4, METRIC};
use crate::exec::{map_slice, Execution};
use crate::tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatterError {
    #[error("OffShell: p^2 = {p2}, m^2 = {m2}")]
    OffShell { p2: f64, m2: f64 },
    #[error("ForwardDivergence: theta = {theta} below theta_min = {theta_min}")]
    ForwardDivergence { theta: f64, theta_min: f64 },
    #[error("KinematicDomain: {0}")]
    KinematicDomain(String),
    #[error("ZeroMomentumTransfer: q^2 = 0")]
    ZeroMomentumTransfer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    fn chi(self) -> Vector2<Complex64> {
        match self {
            Spin::Up => Vector2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
            Spin::Down => Vector2::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveSpinor {
    pub p: FourVector,
    pub spin: Spin,
    pub u: Spinor4,
}

impl PlaneWaveSpinor {
    /// `u-bar = u^dagger gamma^0`.
    pub fn bar(&self) -> nalgebra::RowVector4<Complex64> {
        dirac_bar(&self.u)
    }
}

pub fn dirac_bar(u: &Spinor4) -> nalgebra::RowVector4<Complex64> {
    let mut b = u.adjoint();
    b[2] = -b[2];
    b[3] = -b[3];
    b
}

fn stack(top: Vector2<Complex64>, bottom: Vector2<Complex64>) -> Spinor4 {
    Spinor4::new(top[0], top[1], bottom[0], bottom[1])
}

fn check_on_shell(p: &FourVector, m: f64) -> Result<(), ScatterError> {
    let p2 = p.square();
    let scale = (p.t * p.t).max(m * m).max(1e-300);
    if p.t <= 0.0 || ((p2 - m * m) / scale).abs() > 1e-10 {
        return Err(ScatterError::OffShell { p2, m2: m * m });
    }
    Ok(())
}

/// Boosted rest spinor normalised to `u-bar u = 1`, so that
/// `sum_s u u-bar = (p-slash + m) / 2m`.
pub fn spinor_u(p: FourVector, m: f64, spin: Spin) -> Result<PlaneWaveSpinor, ScatterError> {
    check_on_shell(&p, m)?;
    let chi = spin.chi();
    let e = p.t;
    let lower: Vector2<Complex64> = sigma_dot(p.spatial()) * chi / Complex64::from(e + m);
    let scale = Complex64::from(((e + m) / (2.0 * m)).sqrt());
    Ok(PlaneWaveSpinor {
        p,
        spin,
        u: stack(chi, lower) * scale,
    })
}

/// Massless spinor normalised to `sum_s u u-bar = p-slash / 2`.
pub fn spinor_massless(p: FourVector, spin: Spin) -> Result<PlaneWaveSpinor, ScatterError> {
    check_on_shell(&p, 0.0)?;
    let chi = spin.chi();
    let n = p.spatial_norm_sq().sqrt();
    let dir = [p.x / n, p.y / n, p.z / n];
    let sp: Matrix2<Complex64> = sigma_dot(dir);
    let scale = Complex64::from((p.t / 2.0).sqrt());
    Ok(PlaneWaveSpinor {
        p,
        spin,
        u: stack(chi, sp * chi) * scale,
    })
}

/// `(1/2) sum |u-bar(p_f) u(p_i)|^2` from explicit spinors.
pub fn sigma1_brute(p_i: FourVector, p_f: FourVector, m: f64) -> Result<f64, ScatterError> {
    let mut sum = 0.0;
    for si in Spin::BOTH {
        let ui = spinor_u(p_i, m, si)?;
        for sf in Spin::BOTH {
            let uf = spinor_u(p_f, m, sf)?;
            sum += (uf.bar() * ui.u)[0].norm_sqr();
        }
    }
    Ok(0.5 * sum)
}

/// `(1/2)(1 + p_i . p_f / m^2)`.
pub fn sigma1(p_i: FourVector, p_f: FourVector, m: f64) -> Result<f64, ScatterError> {
    check_on_shell(&p_i, m)?;
    check_on_shell(&p_f, m)?;
    Ok(0.5 * (1.0 + p_i.dot(p_f) / (m * m)))
}

/// `sum_mu (a-bar gamma^mu b)(c-bar gamma_mu d)`.
fn current_contraction(a: &Spinor4, b: &Spinor4, c: &Spinor4, d: &Spinor4) -> Complex64 {
    let (ab, cb) = (dirac_bar(a), dirac_bar(c));
    (0..4)
        .map(|mu| {
            let g = gamma(mu).expect("mu in range");
            (ab * g * b)[0] * (cb * g * d)[0] * METRIC[mu]
        })
        .sum()
}

/// `(1/4) sum over all four spins |j_e . j_p|^2` with explicit spinors.
fn double_current_sum(
    electron: impl Fn(FourVector, Spin) -> Result<PlaneWaveSpinor, ScatterError>,
    p_i: FourVector,
    p_f: FourVector,
    big_p_i: FourVector,
    big_p_f: FourVector,
    big_m: f64,
) -> Result<f64, ScatterError> {
    let mut sum = 0.0;
    for si in Spin::BOTH {
        let ui = electron(p_i, si)?.u;
        for sf in Spin::BOTH {
            let uf = electron(p_f, sf)?.u;
            for ti in Spin::BOTH {
                let wi = spinor_u(big_p_i, big_m, ti)?.u;
                for tf in Spin::BOTH {
                    let wf = spinor_u(big_p_f, big_m, tf)?.u;
                    sum += current_contraction(&uf, &ui, &wf, &wi).norm_sqr();
                }
            }
        }
    }
    Ok(0.25 * sum)
}

/// Elastic kinematics of an electron of energy `E` off a target of mass `M`
/// (`None` for a fixed Coulomb centre).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterKinematics {
    pub energy: f64,
    pub theta: f64,
    pub m: f64,
    pub target_mass: Option<f64>,
    pub theta_min: f64,
}

impl ScatterKinematics {
    pub fn new(energy: f64, theta: f64, m: f64, target_mass: Option<f64>) -> Result<Self, ScatterError> {
        if !(m > 0.0 && energy > m && energy.is_finite()) {
            return Err(ScatterError::KinematicDomain(format!(
                "need E > m > 0, got E = {energy}, m = {m}"
            )));
        }
        if !(theta > 0.0 && theta <= std::f64::consts::PI) {
            return Err(ScatterError::KinematicDomain(format!(
                "theta = {theta} outside (0, pi]"
            )));
        }
        if let Some(mm) = target_mass {
            if !(mm > 0.0 && mm.is_finite()) {
                return Err(ScatterError::KinematicDomain(format!("target mass {mm}")));
            }
        }
        Ok(Self {
            energy,
            theta,
            m,
            target_mass,
            theta_min: tolerances::THETA_MIN,
        })
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_theta_min(mut self, theta_min: f64) -> Self {
        self.theta_min = theta_min;
        self
    }

    fn half_angle(&self) -> (f64, f64) {
        (0.5 * self.theta).sin_cos()
    }

    /// `|p|` of the incident electron.
    pub fn momentum(&self) -> f64 {
        (self.energy * self.energy - self.m * self.m).sqrt()
    }

    /// `E_f = E / (1 + (2E/M) sin^2(theta/2))`, or `E` without recoil.
    pub fn final_energy(&self) -> f64 {
        match self.target_mass {
            None => self.energy,
            Some(mm) => {
                let s = self.half_angle().0;
                self.energy / (1.0 + 2.0 * self.energy / mm * s * s)
            }
        }
    }

    /// `q^2 = -4 E_f E sin^2(theta/2)`.
    pub fn q2(&self) -> f64 {
        let s = self.half_angle().0;
        -4.0 * self.final_energy() * self.energy * s * s
    }

    fn guard_forward(&self) -> Result<(), ScatterError> {
        if self.theta < self.theta_min {
            return Err(ScatterError::ForwardDivergence {
                theta: self.theta,
                theta_min: self.theta_min,
            });
        }
        Ok(())
    }

    fn target(&self) -> Result<f64, ScatterError> {
        self.target_mass
            .ok_or_else(|| ScatterError::KinematicDomain("finite target mass required".into()))
    }

    /// Massive incident and outgoing electron four-momenta in the x-z plane.
    pub fn electron_momenta(&self) -> Result<(FourVector, FourVector), ScatterError> {
        let ef = self.final_energy();
        if ef <= self.m {
            return Err(ScatterError::KinematicDomain(format!(
                "recoil leaves E_f = {ef} below the electron mass"
            )));
        }
        let p = self.momentum();
        let pf = (ef * ef - self.m * self.m).sqrt();
        let (s, c) = self.theta.sin_cos();
        Ok((
            FourVector::new(self.energy, 0.0, 0.0, p),
            FourVector::new(ef, pf * s, 0.0, pf * c),
        ))
    }
}

/// `Sigma2` in the stable form
/// `(E_f E / m^2) [cos^2(theta/2) - (q^2 / 2M^2) sin^2(theta/2)]`.
pub fn sigma2(k: &ScatterKinematics) -> Result<f64, ScatterError> {
    let big_m = k.target()?;
    let q2 = k.q2();
    if q2 == 0.0 {
        return Err(ScatterError::ZeroMomentumTransfer);
    }
    let (s, c) = k.half_angle();
    let ef = k.final_energy();
    Ok(ef * k.energy / (k.m * k.m) * (c * c - q2 / (2.0 * big_m * big_m) * s * s))
}

/// `Sigma2` as the explicit four-spin sum. The recoil formula for `E_f` is
/// exact for a massless electron line, so the electron current uses massless
/// spinors (`sum u u-bar = p-slash / 2`) and the `1/m^2` of the `u-bar u = 1`
/// normalisation is applied at the end; the proton spinors are massive.
pub fn sigma2_brute(k: &ScatterKinematics) -> Result<f64, ScatterError> {
    let big_m = k.target()?;
    if k.q2() == 0.0 {
        return Err(ScatterError::ZeroMomentumTransfer);
    }
    let e = k.energy;
    let ef = k.final_energy();
    let (s, c) = k.theta.sin_cos();
    let p_i = FourVector::new(e, 0.0, 0.0, e);
    let p_f = FourVector::new(ef, ef * s, 0.0, ef * c);
    let big_i = FourVector::new(big_m, 0.0, 0.0, 0.0);
    let big_f = big_i + p_i - p_f;
    let sum = double_current_sum(spinor_massless, p_i, p_f, big_i, big_f, big_m)?;
    Ok(sum / (k.m * k.m))
}

/// Covariant `Sigma2` for massive electron and proton lines,
/// `[(p'.P')(p.P) + (p'.P)(p.P') - m^2 P.P' - M^2 p.p' + 2 m^2 M^2] / (2 m^2 M^2)`.
pub fn sigma2_trace(
    p_i: FourVector,
    p_f: FourVector,
    big_p_i: FourVector,
    big_p_f: FourVector,
    m: f64,
    big_m: f64,
) -> f64 {
    let num = p_f.dot(big_p_f) * p_i.dot(big_p_i) + p_f.dot(big_p_i) * p_i.dot(big_p_f)
        - m * m * big_p_i.dot(big_p_f)
        - big_m * big_m * p_i.dot(p_f)
        + 2.0 * m * m * big_m * big_m;
    num / (2.0 * m * m * big_m * big_m)
}

/// Four-spin sum with massive spinors on both lines.
pub fn sigma2_brute_massive(
    p_i: FourVector,
    p_f: FourVector,
    big_p_i: FourVector,
    big_p_f: FourVector,
    m: f64,
    big_m: f64,
) -> Result<f64, ScatterError> {
    double_current_sum(|p, s| spinor_u(p, m, s), p_i, p_f, big_p_i, big_p_f, big_m)
}

/// Static Coulomb amplitude `-Z alpha / |q|^2` (transform normalised by `1/4 pi`).
pub fn fourier_potential_coulomb(z: f64, alpha: f64, q: [f64; 3]) -> Result<f64, ScatterError> {
    let q2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
    if q2 == 0.0 {
        return Err(ScatterError::ZeroMomentumTransfer);
    }
    Ok(-z * alpha / q2)
}

/// Coulomb cross section
/// `Z^2 alpha^2 m^2 / (p^4 sin^4(theta/2)) [1 + (p^2/m^2) sin^2(theta/2)]`.
pub fn dcs_coulomb(k: &ScatterKinematics, z: f64, alpha: f64) -> Result<f64, ScatterError> {
    k.guard_forward()?;
    let (s, _) = k.half_angle();
    let p2 = k.momentum().powi(2);
    let m2 = k.m * k.m;
    Ok(z * z * alpha * alpha * m2 / (p2 * p2 * s.powi(4)) * (1.0 + p2 / m2 * s * s))
}

/// `Z^2 alpha^2 m^2 / (p^4 sin^4(theta/2))`.
pub fn rutherford(k: &ScatterKinematics, z: f64, alpha: f64) -> f64 {
    let s = k.half_angle().0;
    let p2 = k.momentum().powi(2);
    z * z * alpha * alpha * k.m * k.m / (p2 * p2 * s.powi(4))
}

/// Ultra-relativistic form `Z^2 alpha^2 / (p^2 sin^2(theta/2))`.
pub fn coulomb_high_energy(k: &ScatterKinematics, z: f64, alpha: f64) -> f64 {
    let s = k.half_angle().0;
    z * z * alpha * alpha / (k.momentum().powi(2) * s * s)
}

/// Coulomb cross section assembled as `16 m^2 |V(q)|^2 Sigma1` from the
/// amplitude and the spin sum.
pub fn dcs_coulomb_assembled(k: &ScatterKinematics, z: f64, alpha: f64) -> Result<f64, ScatterError> {
    k.guard_forward()?;
    let p = k.momentum();
    let (s, c) = k.theta.sin_cos();
    let p_i = FourVector::new(k.energy, 0.0, 0.0, p);
    let p_f = FourVector::new(k.energy, p * s, 0.0, p * c);
    let q = p_f - p_i;
    let v = fourier_potential_coulomb(z, alpha, q.spatial())?;
    Ok(16.0 * k.m * k.m * v * v * sigma1(p_i, p_f, k.m)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sigma1Mode {
    /// `(1/2)(1 + p_i . p_f / m^2)` with massive kinematics.
    Exact,
    /// `(E_f E / m^2) sin^2(theta/2)`.
    HighEnergy,
}

/// Electron-proton cross section
/// `16 alpha^2 m^4 E_f / (q^4 E^3) Sigma1 Sigma2`.
pub fn dcs_ep(k: &ScatterKinematics, alpha: f64, mode: Sigma1Mode) -> Result<f64, ScatterError> {
    k.guard_forward()?;
    let q2 = k.q2();
    if q2 == 0.0 {
        return Err(ScatterError::ZeroMomentumTransfer);
    }
    let ef = k.final_energy();
    let e = k.energy;
    let m2 = k.m * k.m;
    let s1 = match mode {
        Sigma1Mode::Exact => {
            let (p_i, p_f) = k.electron_momenta()?;
            sigma1(p_i, p_f, k.m)?
        }
        Sigma1Mode::HighEnergy => {
            let s = k.half_angle().0;
            ef * e / m2 * s * s
        }
    };
    let s2 = sigma2(k)?;
    Ok(16.0 * alpha * alpha * m2 * m2 * ef / (q2 * q2 * e.powi(3)) * s1 * s2)
}

/// Closed high-energy form
/// `(alpha^2/E^2) cot^2(theta/2) [1 - (q^2/2M^2) tan^2(theta/2)] / [1 + (2E/M) sin^2(theta/2)]`.
pub fn dcs_ep_closed(k: &ScatterKinematics, alpha: f64) -> Result<f64, ScatterError> {
    let big_m = k.target()?;
    let (s, c) = k.half_angle();
    let e = k.energy;
    let bracket = c * c - k.q2() / (2.0 * big_m * big_m) * s * s;
    Ok(alpha * alpha / (e * e) * bracket / (s * s) / (1.0 + 2.0 * e / big_m * s * s))
}

/// Conventional point-proton result with recoil (vector vertex, no form factors):
/// `alpha^2 cos^2(theta/2) / (4 E^2 sin^4(theta/2)) [1 - (q^2/2M^2) tan^2(theta/2)] E_f/E`.
pub fn dcs_conventional_recoil(k: &ScatterKinematics, alpha: f64) -> Result<f64, ScatterError> {
    k.guard_forward()?;
    let big_m = k.target()?;
    let (s, c) = k.half_angle();
    let e = k.energy;
    let bracket = c * c - k.q2() / (2.0 * big_m * big_m) * s * s;
    Ok(alpha * alpha * bracket / (4.0 * e * e * s.powi(4)) * k.final_energy() / e)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub dcs_scalar: f64,
    pub dcs_conventional: f64,
    pub ratio: f64,
}

/// Electron-proton angular distribution under both vertices.
pub fn sweep_ep(
    base: &ScatterKinematics,
    thetas: &[f64],
    alpha: f64,
    mode: Sigma1Mode,
    exec: Execution,
) -> Vec<Result<SweepRow, ScatterError>> {
    map_slice(exec, thetas, |&theta| {
        let k = base.with_theta(theta);
        let scalar = dcs_ep(&k, alpha, mode)?;
        let conv = dcs_conventional_recoil(&k, alpha)?;
        Ok(SweepRow {
            theta,
            dcs_scalar: scalar,
            dcs_conventional: conv,
            ratio: scalar / conv,
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ComplexMatrix4;
    use crate::ALPHA;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn rest_spinor() {
        let u = spinor_u(FourVector::new(1.0, 0.0, 0.0, 0.0), 1.0, Spin::Up).unwrap();
        assert_eq!(u.u, Spinor4::new(1.0.into(), 0.0.into(), 0.0.into(), 0.0.into()));
    }

    #[test]
    fn completeness_and_orthogonality() {
        let m = 1.3;
        let p = FourVector::on_shell(m, [0.4, -1.1, 2.0]);
        let mut sum = ComplexMatrix4::zeros();
        for s in Spin::BOTH {
            let u = spinor_u(p, m, s).unwrap();
            assert!(((u.bar() * u.u)[0] - 1.0).norm() < 1e-12);
            let dirac = (p.slash() - ComplexMatrix4::identity() * Complex64::from(m)) * u.u;
            assert!(dirac.iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-12);
            sum += u.u * u.bar();
        }
        let want = (p.slash() + ComplexMatrix4::identity() * Complex64::from(m)) / Complex64::from(2.0 * m);
        assert!(crate::algebra::max_abs_diff(&sum, &want) < 1e-12);
        let (a, b) = (spinor_u(p, m, Spin::Up).unwrap(), spinor_u(p, m, Spin::Down).unwrap());
        assert!((a.bar() * b.u)[0].norm() < 1e-12);
        assert!(matches!(
            spinor_u(FourVector::new(1.0, 1.0, 0.0, 0.0), m, Spin::Up),
            Err(ScatterError::OffShell { .. })
        ));
    }

    #[test]
    fn sigma1_forward_is_one() {
        let p = FourVector::on_shell(1.0, [0.3, 0.2, 0.9]);
        assert!((sigma1_brute(p, p, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((sigma1(p, p, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sigma1_high_energy_limit() {
        let theta: f64 = 1.0;
        let k = ScatterKinematics::new(1e4, theta, 1.0, None).unwrap();
        let (p_i, p_f) = k.electron_momenta().unwrap();
        let s1 = sigma1(p_i, p_f, 1.0).unwrap();
        let lim = k.energy * k.energy * (0.5 * theta).sin().powi(2);
        assert!(rel(s1, lim) < 1e-6);
    }

    #[test]
    fn sigma2_electron_proton_kinematics() {
        let m = crate::ELECTRON_MASS_EV;
        let k = ScatterKinematics::new(188e6, std::f64::consts::FRAC_PI_2, m, Some(938e6)).unwrap();
        let b = sigma2_brute(&k).unwrap();
        let c = sigma2(&k).unwrap();
        assert!(rel(b, c) < 1e-10, "{b} {c}");
        let far = ScatterKinematics::new(188e6, 1e-4, m, Some(938e6)).unwrap();
        let s2 = sigma2(&far).unwrap();
        let lead = far.final_energy() * far.energy / (m * m);
        assert!(rel(s2, lead) < 1e-8);
        let heavy = ScatterKinematics::new(188e6, 1.0, m, Some(1e30)).unwrap();
        let c2 = (0.5f64).cos().powi(2);
        assert!(rel(sigma2(&heavy).unwrap(), heavy.energy.powi(2) / (m * m) * c2) < 1e-12);
        assert!(sigma2(&ScatterKinematics::new(2.0, 1.0, 1.0, None).unwrap()).is_err());
    }

    #[test]
    fn massive_trace_matches_spinors() {
        let (m, big_m) = (1.0, 5.0);
        let p_i = FourVector::on_shell(m, [0.0, 0.0, 2.0]);
        let big_i = FourVector::new(big_m, 0.0, 0.0, 0.0);
        // elastic final state at 1 rad in the CM-free lab frame
        let theta: f64 = 1.0;
        let (e, p) = (p_i.t, 2.0);
        // solve E_f from (p_i + P_i - p_f)^2 = M^2
        let f = |ef: f64| {
            let pf = (ef * ef - m * m).sqrt();
            let p_f = FourVector::new(ef, pf * theta.sin(), 0.0, pf * theta.cos());
            (p_i + big_i - p_f).square() - big_m * big_m
        };
        let (mut lo, mut hi) = (m + 1e-12, e);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) * f(lo) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let ef = 0.5 * (lo + hi);
        let pf = (ef * ef - m * m).sqrt();
        let p_f = FourVector::new(ef, pf * theta.sin(), 0.0, pf * theta.cos());
        let big_f = p_i + big_i - p_f;
        let _ = p;
        let brute = sigma2_brute_massive(p_i, p_f, big_i, big_f, m, big_m).unwrap();
        let trace = sigma2_trace(p_i, p_f, big_i, big_f, m, big_m);
        assert!(rel(brute, trace) < 1e-12);
    }

    #[test]
    fn coulomb_limits() {
        let th = std::f64::consts::FRAC_PI_2;
        let k = ScatterKinematics::new((1.0f64 + 1e-6).sqrt(), th, 1.0, None).unwrap();
        let d = dcs_coulomb(&k, 1.0, ALPHA).unwrap();
        assert!(rel(d, rutherford(&k, 1.0, ALPHA)) < 1e-5);
        let p4 = k.momentum().powi(4);
        assert!(rel(rutherford(&k, 1.0, ALPHA), 4.0 * ALPHA * ALPHA / p4) < 1e-12);
        let a = dcs_coulomb_assembled(&k, 1.0, ALPHA).unwrap();
        assert!(rel(a, d) < 1e-12);
        assert!(matches!(
            dcs_coulomb(&k.with_theta(1e-4), 1.0, ALPHA),
            Err(ScatterError::ForwardDivergence { .. })
        ));
    }

    #[test]
    fn fourier_scaling() {
        let v1 = fourier_potential_coulomb(1.0, ALPHA, [1.0, 0.0, 0.0]).unwrap();
        assert!((v1 + ALPHA).abs() < 1e-18);
        let v2 = fourier_potential_coulomb(1.0, ALPHA, [2.0, 0.0, 0.0]).unwrap();
        assert_eq!(v2 / v1, 0.25);
        assert!(fourier_potential_coulomb(1.0, ALPHA, [0.0; 3]).is_err());
    }

    #[test]
    fn ep_high_energy_mode_is_closed_form() {
        let m = crate::ELECTRON_MASS_EV;
        for deg in [20.0f64, 60.0, 90.0, 150.0, 180.0] {
            let k = ScatterKinematics::new(188e6, deg.to_radians(), m, Some(938e6)).unwrap();
            let a = dcs_ep(&k, ALPHA, Sigma1Mode::HighEnergy).unwrap();
            let b = dcs_ep_closed(&k, ALPHA).unwrap();
            assert!(rel(a, b) < 1e-12, "{deg}: {a} {b}");
        }
    }

    #[test]
    fn ep_modes_differ_at_order_m2_over_e2() {
        let m = crate::ELECTRON_MASS_EV;
        let k = ScatterKinematics::new(188e6, 60f64.to_radians(), m, Some(938e6)).unwrap();
        let a = dcs_ep(&k, ALPHA, Sigma1Mode::Exact).unwrap();
        let b = dcs_ep(&k, ALPHA, Sigma1Mode::HighEnergy).unwrap();
        let gap = rel(a, b);
        assert!(gap > 0.0 && gap < 10.0 * (m / 188e6).powi(2), "{gap}");
    }

    #[test]
    fn sweep_policies_agree() {
        let k = ScatterKinematics::new(188e6, 1.0, crate::ELECTRON_MASS_EV, Some(938e6)).unwrap();
        let th: Vec<f64> = (1..50).map(|i| i as f64 * 0.06).collect();
        let a = sweep_ep(&k, &th, ALPHA, Sigma1Mode::Exact, Execution::Sequential);
        let b = sweep_ep(&k, &th, ALPHA, Sigma1Mode::Exact, Execution::Parallel);
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.as_ref().unwrap().dcs_scalar > 0.0));
    }
}

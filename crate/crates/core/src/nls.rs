//! Nonrelativistic limit: expectation values of the four Hamiltonian terms on
//! a 3D grid, and a split-step solver for the 1D nonlinear Schrodinger
//! equation `i psi_t = -(1/2m) psi_xx + N[psi] psi` on a periodic line.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::Vector2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use thiserror::Error;

use crate::grid::{Grid, Grid3, GridField, LineField, SpaceField};

pub type Spinor2 = Vector2<Complex64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NlsError {
    #[error("StabilityGuard: dt * max|N| = {value} exceeds {limit}")]
    StabilityGuard { value: f64, limit: f64 },
    #[error("OddGridRequired: the Choquard kernel needs an odd sample count, got {0}")]
    OddGridRequired(usize),
    #[error("UnnormalizedInput: norm {0}")]
    UnnormalizedInput(f64),
    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),
    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),
}

// ---------------------------------------------------------------------------
// Hamiltonian terms

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianTerms {
    pub kinetic: f64,
    pub electric: f64,
    pub zeeman: f64,
    pub spin_orbit: f64,
}

impl HamiltonianTerms {
    pub fn total(&self) -> f64 {
        self.kinetic + self.electric + self.zeeman + self.spin_orbit
    }
}

/// Periodic central difference of `v` along `axis` at site `at`, returned
/// unscaled together with the factor `1 / 2h`.
fn d_axis<T>(v: &[T], g: &Grid3, at: [usize; 3], axis: usize) -> (T, f64)
where
    T: Copy + std::ops::Sub<Output = T>,
{
    let n = g.shape()[axis];
    let (mut fwd, mut back) = (at, at);
    fwd[axis] = (at[axis] + 1) % n;
    back[axis] = (at[axis] + n - 1) % n;
    let h = g.axes[axis].step;
    (
        v[g.index(fwd[0], fwd[1], fwd[2])] - v[g.index(back[0], back[1], back[2])],
        0.5 / h,
    )
}

fn pauli_expect(u: &Spinor2, w: &Spinor2) -> [Complex64; 3] {
    // u^dagger sigma_k w
    let i = Complex64::i();
    [
        u[0].conj() * w[1] + u[1].conj() * w[0],
        -i * u[0].conj() * w[1] + i * u[1].conj() * w[0],
        u[0].conj() * w[0] - u[1].conj() * w[1],
    ]
}

/// Expectation values of `p^2/2m`, `e Phi`, `-(e/2m) k.B` with
/// `k = l + sigma` and the spin-orbit term with the scalar-coupling sign,
/// `-(e / 2 m^2 r^2)(r . grad Phi)(s . l)`. `b` is the uniform field of
/// `A = B x r / 2`. Derivatives are periodic central differences; `psi` must
/// satisfy `sum |psi|^2 dV = 1` to 1e-6.
pub fn hamiltonian_terms(
    psi: &SpaceField<Spinor2>,
    phi: &SpaceField<f64>,
    b: [f64; 3],
    e: f64,
    m: f64,
) -> Result<HamiltonianTerms, NlsError> {
    if psi.grid() != phi.grid() {
        return Err(NlsError::ShapeMismatch("psi and phi grids differ".into()));
    }
    let g = *psi.grid();
    if g.shape().iter().any(|&n| n < 3) {
        return Err(NlsError::ShapeMismatch("need at least 3 samples per axis".into()));
    }
    let vol = g.cell_volume();
    let v = psi.values();
    let norm: f64 = v.iter().map(|u| u.norm_squared()).sum::<f64>() * vol;
    if (norm - 1.0).abs() > 1e-6 {
        return Err(NlsError::UnnormalizedInput(norm));
    }
    let i = Complex64::i();
    let (mut kin, mut ele, mut zee, mut so) = (0.0, 0.0, 0.0, Complex64::new(0.0, 0.0));
    for site in 0..g.len() {
        let at = g.unravel(site);
        let r = g.point(site);
        let u = v[site];
        let grad = [0, 1, 2].map(|a| {
            let (d, k) = d_axis(v, &g, at, a);
            d * Complex64::from(k)
        });
        kin += grad.iter().map(|d| d.norm_squared()).sum::<f64>();
        ele += phi.values()[site] * u.norm_squared();
        // l psi = -i r x grad psi, one component per axis
        let l_psi = [
            (grad[2] * Complex64::from(r[1]) - grad[1] * Complex64::from(r[2])) * -i,
            (grad[0] * Complex64::from(r[2]) - grad[2] * Complex64::from(r[0])) * -i,
            (grad[1] * Complex64::from(r[0]) - grad[0] * Complex64::from(r[1])) * -i,
        ];
        let spin = pauli_expect(&u, &u);
        for k in 0..3 {
            let orbital = u.dotc(&l_psi[k]);
            zee += b[k] * (orbital + spin[k]).re;
        }
        let r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
        if r2 > 0.0 {
            let dphi = [0, 1, 2].map(|a| {
                let (d, k) = d_axis(phi.values(), &g, at, a);
                d * k
            });
            let radial = r[0] * dphi[0] + r[1] * dphi[1] + r[2] * dphi[2];
            // u^dagger (s . l) psi with s = sigma / 2
            let sl: Complex64 = (0..3).map(|k| pauli_expect(&u, &l_psi[k])[k]).sum::<Complex64>() * 0.5;
            so += sl * (radial / r2);
        }
    }
    Ok(HamiltonianTerms {
        kinetic: kin * vol / (2.0 * m),
        electric: e * ele * vol,
        zeeman: -e / (2.0 * m) * zee * vol,
        spin_orbit: -e / (2.0 * m * m) * so.re * vol,
    })
}

/// Hydrogen-like test states in units where the Bohr radius is 1, normalised
/// on the grid. The `P` states share `R(r) = r exp(-r/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HydrogenicState {
    /// `1s`, `R = exp(-r)`, spin up.
    S1Half,
    /// `2P1/2, m_j = 1/2`.
    P1Half,
    /// `2P3/2, m_j = 3/2`.
    P3Half,
}

pub fn hydrogenic(grid: Grid3, state: HydrogenicState) -> SpaceField<Spinor2> {
    let zero = Complex64::new(0.0, 0.0);
    let mut f = GridField::from_fn(grid, |[x, y, z]| {
        let r = (x * x + y * y + z * z).sqrt();
        // r Y_10 ~ z, r Y_11 ~ -(x + i y)/sqrt 2 up to a shared constant
        let y10 = Complex64::from(z);
        let y11 = -Complex64::new(x, y) / 2f64.sqrt();
        match state {
            HydrogenicState::S1Half => Spinor2::new(Complex64::from((-r).exp()), zero),
            HydrogenicState::P1Half => {
                let rad = Complex64::from((-r / 2.0).exp());
                Spinor2::new(-y10 * (1.0f64 / 3.0).sqrt(), y11 * (2.0f64 / 3.0).sqrt()) * rad
            }
            HydrogenicState::P3Half => Spinor2::new(y11, zero) * Complex64::from((-r / 2.0).exp()),
        }
    });
    let n: f64 = f.values().iter().map(|u| u.norm_squared()).sum::<f64>() * grid.cell_volume();
    let k = Complex64::from(1.0 / n.sqrt());
    f.values_mut().iter_mut().for_each(|u| *u *= k);
    f
}

// ---------------------------------------------------------------------------
// 1D evolution

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Nonlinearity {
    /// `N = g |psi|^2`.
    #[default]
    Cubic,
    /// `N = g |psi|^2 Phi`, with `Phi` the 1D Poisson potential of `|psi|^2`
    /// (kernel `-|x - x'| / 2`, minimum image on the periodic line).
    Choquard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NlsState {
    pub psi: LineField<Complex64>,
    pub g: f64,
    pub mass: f64,
    pub mode: Nonlinearity,
    pub dt: f64,
    pub t: f64,
}

/// Largest `dt * max|N|` accepted by [`evolve`].
pub const STABILITY_LIMIT: f64 = 0.1;

impl NlsState {
    pub fn new(psi: LineField<Complex64>, g: f64, dt: f64) -> Self {
        Self {
            psi,
            g,
            mass: 1.0,
            mode: Nonlinearity::Cubic,
            dt,
            t: 0.0,
        }
    }

    pub fn with_mode(mut self, mode: Nonlinearity) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    fn step_h(&self) -> f64 {
        self.psi.grid().x.step
    }

    fn validate(&self) -> Result<(), NlsError> {
        let n = self.psi.len();
        if n < 4 {
            return Err(NlsError::InvalidParameter(format!("{n} samples")));
        }
        if !(self.dt > 0.0 && self.dt.is_finite() && self.mass > 0.0 && self.g.is_finite()) {
            return Err(NlsError::InvalidParameter(format!(
                "dt = {}, mass = {}, g = {}",
                self.dt, self.mass, self.g
            )));
        }
        if self.mode == Nonlinearity::Choquard && n.is_multiple_of(2) {
            return Err(NlsError::OddGridRequired(n));
        }
        Ok(())
    }
}

/// Angular wavenumbers of the DFT bins for `n` samples at spacing `h`.
fn wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let l = n as f64 * h;
    (0..n)
        .map(|j| {
            let jj = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            2.0 * PI * jj / l
        })
        .collect()
}

/// `Phi(x) = sum -|x - x'|/2 rho(x') h` with minimum-image distances.
fn choquard_potential(rho: &[f64], h: f64) -> Vec<f64> {
    let n = rho.len();
    (0..n)
        .map(|i| {
            rho.iter()
                .enumerate()
                .map(|(j, &r)| {
                    let d = i.abs_diff(j);
                    let d = d.min(n - d) as f64 * h;
                    -0.5 * d * r
                })
                .sum::<f64>()
                * h
        })
        .collect()
}

fn nonlinear_potential(psi: &[Complex64], g: f64, mode: Nonlinearity, h: f64) -> Vec<f64> {
    let rho: Vec<f64> = psi.iter().map(|z| z.norm_sqr()).collect();
    match mode {
        Nonlinearity::Cubic => rho.iter().map(|r| g * r).collect(),
        Nonlinearity::Choquard => {
            let phi = choquard_potential(&rho, h);
            rho.iter().zip(&phi).map(|(r, p)| g * r * p).collect()
        }
    }
}

struct Spectral {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    k: Vec<f64>,
}

impl Spectral {
    fn new(n: usize, h: f64) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
            k: wavenumbers(n, h),
        }
    }

    fn kinetic_phases(&self, m: f64, dt: f64) -> Vec<Complex64> {
        self.k
            .iter()
            .map(|k| Complex64::from_polar(1.0, -k * k / (2.0 * m) * dt))
            .collect()
    }

    fn apply(&self, psi: &mut [Complex64], phases: &[Complex64]) {
        self.fwd.process(psi);
        let scale = 1.0 / psi.len() as f64;
        for (z, p) in psi.iter_mut().zip(phases) {
            *z *= p * scale;
        }
        self.inv.process(psi);
    }

    fn derivative(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let mut buf = psi.to_vec();
        self.fwd.process(&mut buf);
        let scale = 1.0 / psi.len() as f64;
        for (z, k) in buf.iter_mut().zip(&self.k) {
            *z *= Complex64::new(0.0, *k * scale);
        }
        self.inv.process(&mut buf);
        buf
    }
}

/// Strang splitting: half nonlinear phase, full spectral kinetic step, half
/// nonlinear phase. The nonlinear phase is exact because `N` depends on
/// `|psi|` only. Runs `round(duration / dt)` steps.
pub fn evolve(state: NlsState, duration: f64) -> Result<NlsState, NlsError> {
    state.validate()?;
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(NlsError::InvalidParameter(format!("duration {duration}")));
    }
    let NlsState { psi, g, mass, mode, dt, t } = state;
    let grid = *psi.grid();
    let h = grid.x.step;
    let mut v = psi.into_values();
    let spec = Spectral::new(v.len(), h);
    let phases = spec.kinetic_phases(mass, dt);
    let steps = (duration / dt).round() as usize;
    let half_kick = |v: &mut [Complex64]| -> Result<(), NlsError> {
        let n = nonlinear_potential(v, g, mode, h);
        let worst = n.iter().fold(0.0f64, |a, x| a.max(x.abs())) * dt;
        if worst > STABILITY_LIMIT {
            return Err(NlsError::StabilityGuard {
                value: worst,
                limit: STABILITY_LIMIT,
            });
        }
        for (z, p) in v.iter_mut().zip(&n) {
            *z *= Complex64::from_polar(1.0, -0.5 * dt * p);
        }
        Ok(())
    };
    for _ in 0..steps {
        half_kick(&mut v)?;
        spec.apply(&mut v, &phases);
        half_kick(&mut v)?;
    }
    Ok(NlsState {
        psi: GridField::new(grid, v).expect("length preserved"),
        g,
        mass,
        mode,
        dt,
        t: t + steps as f64 * dt,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conserved {
    pub norm: f64,
    pub kinetic: f64,
    pub interaction: f64,
    pub energy: f64,
}

/// `norm = sum |psi|^2 h`; `kinetic = sum |psi_x|^2 h / 2m` with a spectral
/// derivative; `interaction = (1/2) sum |psi|^2 N h`, i.e. `(g/2) sum |psi|^4 h`
/// for the cubic mode and the same form with `N = g |psi|^2 Phi` for Choquard.
pub fn conserved_quantities(state: &NlsState) -> Conserved {
    let h = state.step_h();
    let v = state.psi.values();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>() * h;
    let dpsi = Spectral::new(v.len(), h).derivative(v);
    let kinetic = dpsi.iter().map(|z| z.norm_sqr()).sum::<f64>() * h / (2.0 * state.mass);
    let n = nonlinear_potential(v, state.g, state.mode, h);
    let interaction = 0.5 * v.iter().zip(&n).map(|(z, p)| z.norm_sqr() * p).sum::<f64>() * h;
    Conserved {
        norm,
        kinetic,
        interaction,
        energy: kinetic + interaction,
    }
}

/// Periodic line of `n` samples centred on zero with total length `length`.
pub fn periodic_line(n: usize, length: f64) -> Result<crate::grid::Grid1, NlsError> {
    let h = length / n as f64;
    let x = crate::grid::Axis::new(n, -0.5 * length, h).map_err(|e| NlsError::InvalidParameter(e.to_string()))?;
    Ok(crate::grid::Grid1 { x })
}

/// `sech(x - x0) exp(i v x)`: the bright soliton of the focusing cubic
/// equation with `g = -1`, `m = 1`, boosted to velocity `v`.
pub fn sech_soliton(n: usize, length: f64, x0: f64, v: f64) -> Result<LineField<Complex64>, NlsError> {
    let grid = periodic_line(n, length)?;
    Ok(GridField::from_fn(grid, |x| {
        Complex64::from_polar(1.0 / (x - x0).cosh(), v * x)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_field_stays_zero() {
        let grid = periodic_line(64, 20.0).unwrap();
        let s = NlsState::new(GridField::filled(grid, Complex64::new(0.0, 0.0)), -1.0, 1e-2);
        let out = evolve(s, 1.0).unwrap();
        assert!(out.psi.values().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
        let c = conserved_quantities(&out);
        assert_eq!((c.norm, c.energy), (0.0, 0.0));
    }

    #[test]
    fn soliton_integrals() {
        let s = NlsState::new(sech_soliton(1024, 80.0, 0.0, 0.0).unwrap(), -1.0, 1e-3);
        let c = conserved_quantities(&s);
        assert!((c.norm - 2.0).abs() < 1e-12);
        assert!((c.kinetic - 1.0 / 3.0).abs() < 1e-12);
        assert!((c.interaction + 2.0 / 3.0).abs() < 1e-12);
        let mut rot = s.clone();
        rot.psi = s.psi.map(|z| z * Complex64::from_polar(1.0, 0.7));
        assert!((conserved_quantities(&rot).norm - c.norm).abs() < 1e-14);
    }

    #[test]
    fn guards() {
        let psi = sech_soliton(64, 20.0, 0.0, 0.0).unwrap();
        let s = NlsState::new(psi.clone(), -1.0, 0.5);
        assert!(matches!(evolve(s, 1.0), Err(NlsError::StabilityGuard { .. })));
        let s = NlsState::new(psi, -1.0, 1e-3).with_mode(Nonlinearity::Choquard);
        assert_eq!(evolve(s, 0.1), Err(NlsError::OddGridRequired(64)));
    }

    #[test]
    fn choquard_conserves_norm() {
        let psi = sech_soliton(65, 20.0, 0.0, 0.0).unwrap();
        let s = NlsState::new(psi, 0.5, 1e-3).with_mode(Nonlinearity::Choquard);
        let n0 = conserved_quantities(&s).norm;
        let out = evolve(s, 0.5).unwrap();
        assert!((conserved_quantities(&out).norm - n0).abs() < 1e-12);
    }

    #[test]
    fn plane_wave_kinetic_term() {
        let g = Grid3::cube(16, 4.0).unwrap();
        let k = 2.0 * PI / 8.0;
        let amp = 1.0 / (8.0f64.powi(3)).sqrt();
        let psi = GridField::from_fn(g, |[x, _, _]| {
            Spinor2::new(Complex64::from_polar(amp, k * x), Complex64::new(0.0, 0.0))
        });
        let phi = GridField::filled(g, 0.0);
        let t = hamiltonian_terms(&psi, &phi, [0.0; 3], 1.0, 1.0).unwrap();
        let h = g.axes[0].step;
        let discrete = ((k * h).sin() / h).powi(2) / 2.0;
        assert!((t.kinetic - discrete).abs() < 1e-12);
        assert!((t.kinetic - k * k / 2.0).abs() < 0.05 * k * k);
        assert_eq!((t.electric, t.spin_orbit), (0.0, 0.0));
        assert!(t.zeeman.abs() < 1e-15);
    }
}

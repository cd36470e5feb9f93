//! Shooting solver for Coulomb bound states of the radial Dirac system with
//! the potential in either the mass slot (scalar coupling) or the energy slot
//! (vector coupling):
//!
//! ```text
//! G' = -(kappa/r) G + (A0 + A1/r) F
//! F' =  (kappa/r) F - (B0 + B1/r) G
//! ```
//!
//! with `A0 = E + m`, `B0 = E - m`, `B1 = Z alpha` and `A1 = -Z alpha`
//! (scalar) or `+Z alpha` (vector).
//!
//! Writing `G = rho cos(theta)`, `F = s rho sin(theta)` on the grid `x = ln r`
//! gives a bounded angle equation. Without the scale `s` the mismatch
//! `theta_out(r_c) - theta_in(r_c)` is strictly decreasing in `E`; a positive
//! `s` only relabels angles monotonically within each half-turn, so the sign of
//! the mismatch against every multiple of pi is unchanged. Eigenvalues sit
//! where it crosses such a multiple, and the `n_r`-th crossing above zero
//! energy is the wanted state.

use std::f64::consts::PI;

use thiserror::Error;

use crate::exec::{map_slice, Execution};
use crate::spectrum::LevelSpec;
use crate::tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadialError {
    #[error("InvalidProblem: {0}")]
    InvalidProblem(String),
    #[error("SingularRegime: vector coupling needs Z alpha = {za} < |kappa| = {kappa}")]
    SingularRegime { za: f64, kappa: u32 },
    #[error("NoConvergence: {0}")]
    NoConvergence(String),
    #[error("GridTooCoarse: matching defect {defect:e} after bisection")]
    GridTooCoarse { defect: f64 },
    #[error("EmptyRange: need -m < E_lo < E_hi < m and at least one step")]
    EmptyRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// Coulomb term added to the mass.
    Scalar,
    /// Coulomb term added to the energy (conventional Dirac-Coulomb).
    Vector,
}

impl Coupling {
    pub fn name(self) -> &'static str {
        match self {
            Coupling::Scalar => "scalar",
            Coupling::Vector => "vector",
        }
    }
}

/// Log-spaced radial mesh `r in [r_min, r_max]` with step `h` in `ln r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProblem {
    pub coupling: Coupling,
    pub z: f64,
    pub alpha: f64,
    pub kappa: i32,
    /// Excitation index among the positive-energy states of this `kappa`.
    pub n_r: u32,
    pub mass: f64,
    /// `None` selects the default mesh for the expected state.
    pub grid: Option<RadialGrid>,
    /// Matching radius; `None` uses the classical turning point estimate.
    pub r_match: Option<f64>,
}

impl RadialProblem {
    pub fn new(coupling: Coupling, z: f64, kappa: i32, n_r: u32) -> Self {
        Self {
            coupling,
            z,
            alpha: crate::ALPHA,
            kappa,
            n_r,
            mass: 1.0,
            grid: None,
            r_match: None,
        }
    }

    pub fn with_grid(mut self, grid: RadialGrid) -> Self {
        self.grid = Some(grid);
        self
    }

    /// Default mesh extent with a different log step.
    pub fn with_step(mut self, step: f64) -> Self {
        let mut g = self.default_grid();
        g.step = step;
        self.grid = Some(g);
        self
    }

    pub fn za(&self) -> f64 {
        self.z * self.alpha
    }

    /// Principal quantum number of the requested state.
    pub fn principal(&self) -> u32 {
        let k = self.kappa.unsigned_abs();
        let l = if self.kappa < 0 { k - 1 } else { k };
        self.n_r + l + 1
    }

    /// Sign changes of `G` for the requested state. Under scalar coupling a
    /// `kappa > 0` upper component carries one extra node close to the origin.
    pub fn expected_nodes(&self) -> u32 {
        match (self.coupling, self.kappa > 0) {
            (Coupling::Scalar, true) => self.n_r + 1,
            _ => self.n_r,
        }
    }

    /// Level labels of the requested state.
    pub fn level(&self) -> Option<LevelSpec> {
        LevelSpec::from_radial(self.kappa, self.n_r).ok()
    }

    /// Hydrogen-like energy guess used only to size the mesh.
    fn energy_estimate(&self) -> f64 {
        let t = self.za() / self.principal() as f64;
        self.mass / (1.0 + t * t).sqrt()
    }

    fn decay_estimate(&self) -> f64 {
        let e = self.energy_estimate();
        (self.mass * self.mass - e * e).sqrt()
    }

    pub fn default_grid(&self) -> RadialGrid {
        RadialGrid {
            r_min: 1e-6 / (self.z * self.mass),
            r_max: 40.0 / self.decay_estimate(),
            step: 0.002,
        }
    }

    fn validate(&self) -> Result<(), RadialError> {
        let bad = |m: String| Err(RadialError::InvalidProblem(m));
        if self.kappa == 0 {
            return bad("kappa must be nonzero".into());
        }
        if !(self.z > 0.0 && self.z.is_finite()) {
            return bad(format!("Z = {} must be positive", self.z));
        }
        if !(self.alpha > 0.0 && self.mass > 0.0) {
            return bad("alpha and mass must be positive".into());
        }
        if self.coupling == Coupling::Vector && self.za() >= self.kappa.unsigned_abs() as f64 {
            return Err(RadialError::SingularRegime {
                za: self.za(),
                kappa: self.kappa.unsigned_abs(),
            });
        }
        if let Some(g) = self.grid {
            if !(g.r_min > 0.0 && g.r_max > g.r_min && g.step > 0.0 && g.step.is_finite()) {
                return bad(format!("bad mesh {g:?}"));
            }
            if g.r_max <= 20.0 / self.decay_estimate() {
                return bad(format!(
                    "r_max = {} is inside 20 decay lengths of the expected state",
                    g.r_max
                ));
            }
        }
        Ok(())
    }
}

/// Normalised bound state on the radial mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    pub energy: f64,
    pub r: Vec<f64>,
    pub g: Vec<f64>,
    pub f: Vec<f64>,
    /// Sign changes of `G`.
    pub node_count: u32,
    pub converged: bool,
    /// `|sin(mismatch)|` at the returned energy.
    pub residual: f64,
    pub iterations: usize,
}

impl BoundState {
    /// `int (G^2 + F^2) dr` by the trapezoid rule in `ln r`.
    pub fn norm(&self) -> f64 {
        let w: Vec<f64> = self
            .r
            .iter()
            .zip(self.g.iter().zip(&self.f))
            .map(|(r, (g, f))| (g * g + f * f) * r)
            .collect();
        let h = (self.r[1] / self.r[0]).ln();
        trapezoid(&w, h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSample {
    pub energy: f64,
    /// `sin` of the matching mismatch; zero at eigenvalues.
    pub defect: f64,
    /// Eigenvalues of this `kappa` strictly between zero and `energy`.
    pub node_count: u32,
    /// Set when an eigenvalue lies between this sample and the previous one.
    pub crossing: bool,
}

fn trapezoid(w: &[f64], h: f64) -> f64 {
    if w.len() < 2 {
        return 0.0;
    }
    h * (w.iter().sum::<f64>() - 0.5 * (w[0] + w[w.len() - 1]))
}

/// Mesh, couplings and matching index for one problem.
struct Shooter {
    kappa: f64,
    mass: f64,
    /// `A1`, `B1`.
    a1: f64,
    b1: f64,
    gamma: f64,
    h: f64,
    r: Vec<f64>,
    r_mid: Vec<f64>,
    ic: usize,
}

#[derive(Clone, Copy)]
struct Coeffs {
    /// `(a + b)/2` and `(a - b)/2` as `p r + q`.
    sum_r: f64,
    sum_0: f64,
    diff_r: f64,
    diff_0: f64,
}

impl Shooter {
    fn new(p: &RadialProblem) -> Result<Self, RadialError> {
        p.validate()?;
        let grid = p.grid.unwrap_or_else(|| p.default_grid());
        let za = p.za();
        let (a1, b1) = match p.coupling {
            Coupling::Scalar => (-za, za),
            Coupling::Vector => (za, za),
        };
        let kappa = p.kappa as f64;
        let gamma = (kappa * kappa - a1 * b1).sqrt();
        let (x0, x1) = (grid.r_min.ln(), grid.r_max.ln());
        let n = ((x1 - x0) / grid.step).ceil().max(8.0) as usize;
        let h = (x1 - x0) / n as f64;
        let r: Vec<f64> = (0..=n).map(|i| (x0 + i as f64 * h).exp()).collect();
        let r_mid: Vec<f64> = (0..n).map(|i| (x0 + (i as f64 + 0.5) * h).exp()).collect();
        let e_est = p.energy_estimate();
        let rc = p
            .r_match
            .unwrap_or(za / (p.mass - e_est).max(1e-300))
            .clamp(grid.r_min * 1e3, grid.r_max / 4.0)
            .clamp(r[1], r[n - 1]);
        let ic = ((rc.ln() - x0) / h).round() as usize;
        Ok(Self {
            kappa,
            mass: p.mass,
            a1,
            b1,
            gamma,
            h,
            r,
            r_mid,
            ic,
        })
    }

    /// Lower-component scale `s`: `F = s rho sin(theta)`. Balances the two
    /// components so the angle sweeps at the decay rate rather than at `2r`.
    fn scale(&self, e: f64) -> f64 {
        ((self.mass - e) / (self.mass + e)).sqrt()
    }

    fn coeffs(&self, e: f64) -> Coeffs {
        let (a0, b0) = (e + self.mass, e - self.mass);
        let s = self.scale(e);
        let (ar, a_0) = (s * a0, s * self.a1);
        let (br, b_0) = (b0 / s, self.b1 / s);
        Coeffs {
            sum_r: 0.5 * (ar + br),
            sum_0: 0.5 * (a_0 + b_0),
            diff_r: 0.5 * (ar - br),
            diff_0: 0.5 * (a_0 - b_0),
        }
    }

    /// `(d theta/dx, d ln rho/dx)`.
    #[inline]
    fn rhs(&self, c: &Coeffs, r: f64, theta: f64) -> (f64, f64) {
        let (s2, c2) = (2.0 * theta).sin_cos();
        let half_sum = c.sum_r * r + c.sum_0;
        let half_diff = c.diff_r * r + c.diff_0;
        (
            self.kappa * s2 - half_sum + half_diff * c2,
            -self.kappa * c2 + half_diff * s2,
        )
    }

    #[inline]
    fn step(&self, c: &Coeffs, r0: f64, rm: f64, r1: f64, th: f64, l: f64, h: f64) -> (f64, f64) {
        let (k1, m1) = self.rhs(c, r0, th);
        let (k2, m2) = self.rhs(c, rm, th + 0.5 * h * k1);
        let (k3, m3) = self.rhs(c, rm, th + 0.5 * h * k2);
        let (k4, m4) = self.rhs(c, r1, th + h * k3);
        (
            th + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4),
            l + h / 6.0 * (m1 + 2.0 * m2 + 2.0 * m3 + m4),
        )
    }

    /// Angle and log-amplitude at the first mesh point from `r^gamma (c0 + c1 r)`.
    fn origin(&self, e: f64) -> (f64, f64) {
        let (a0, b0) = (e + self.mass, e - self.mass);
        let g0 = 1.0;
        let f0 = (self.gamma + self.kappa) / self.a1;
        let det = 2.0 * self.gamma + 1.0;
        let (p, q) = (a0 * f0, -b0 * g0);
        let g1 = ((self.gamma + 1.0 - self.kappa) * p + self.a1 * q) / det;
        let f1 = ((self.gamma + 1.0 + self.kappa) * q - self.b1 * p) / det;
        let r = self.r[0];
        let (g, f) = (g0 + g1 * r, (f0 + f1 * r) / self.scale(e));
        (f.atan2(g), self.gamma * r.ln() + g.hypot(f).ln())
    }

    fn decay(&self, e: f64) -> f64 {
        (self.mass * self.mass - e * e).sqrt()
    }

    /// Mesh index where the inward sweep begins: 40 decay lengths out, so
    /// the step stays resolved for energies far from the expected state.
    fn inward_start(&self, e: f64) -> usize {
        let n = self.r.len() - 1;
        let r_start = 40.0 / self.decay(e);
        if r_start >= self.r[n] {
            return n;
        }
        let i = ((r_start.ln() - self.r[0].ln()) / self.h).ceil() as usize;
        i.clamp(self.match_index(e), n)
    }

    /// Matching index: the turning-point estimate, pulled in to 10 decay
    /// lengths when the trial energy is deeply bound. For a trial energy that
    /// is not an eigenvalue, the two sweeps never differ by a multiple of pi at
    /// any radius, so moving the matching point leaves the bracketing intact.
    fn match_index(&self, e: f64) -> usize {
        let r_cap = 10.0 / self.decay(e);
        if r_cap >= self.r[self.ic] {
            return self.ic;
        }
        let i = ((r_cap.ln() - self.r[0].ln()) / self.h).floor() as usize;
        i.clamp(1, self.ic)
    }

    /// Angle of the decaying solution, `F/G = -s`, at the outer edge.
    fn tail(&self) -> f64 {
        -std::f64::consts::FRAC_PI_4
    }

    /// Angles at the matching point from both sides; optionally the full
    /// composite `(theta, ln rho)` profile.
    fn shoot(&self, e: f64, keep: bool) -> (f64, f64, Option<(Vec<f64>, Vec<f64>)>) {
        let c = self.coeffs(e);
        let n = self.r.len() - 1;
        let ic = self.match_index(e);
        let (mut th, mut l) = self.origin(e);
        let mut out = keep.then(|| (vec![0.0; n + 1], vec![0.0; n + 1]));
        if let Some((t, ll)) = out.as_mut() {
            t[0] = th;
            ll[0] = l;
        }
        for i in 0..ic {
            (th, l) = self.step(&c, self.r[i], self.r_mid[i], self.r[i + 1], th, l, self.h);
            if let Some((t, ll)) = out.as_mut() {
                t[i + 1] = th;
                ll[i + 1] = l;
            }
        }
        let theta_out = th;
        let l_out = l;
        let start = self.inward_start(e);
        let (mut th, mut l) = (self.tail(), 0.0);
        let mut inner = keep.then(|| (vec![0.0; n + 1], vec![0.0; n + 1]));
        if let Some((t, ll)) = inner.as_mut() {
            for i in start..=n {
                t[i] = th;
                ll[i] = l - self.decay(e) * (self.r[i] - self.r[start]);
            }
        }
        for i in (ic..start).rev() {
            (th, l) = self.step(&c, self.r[i + 1], self.r_mid[i], self.r[i], th, l, -self.h);
            if let Some((t, ll)) = inner.as_mut() {
                t[i] = th;
                ll[i] = l;
            }
        }
        let theta_in = th;
        let profile = out.zip(inner).map(|((mut t, mut ll), (ti, li))| {
            let shift = PI * ((theta_out - theta_in) / PI).round();
            let lift = l_out - li[ic];
            for i in ic + 1..=n {
                t[i] = ti[i] + shift;
                ll[i] = li[i] + lift;
            }
            (t, ll)
        });
        (theta_out, theta_in, profile)
    }

    fn mismatch(&self, e: f64) -> f64 {
        let (o, i, _) = self.shoot(e, false);
        o - i
    }
}

/// Lowest energy probed; the mismatch there anchors the state count.
fn floor_energy(mass: f64) -> f64 {
    1e-9 * mass
}

fn ceiling_energy(mass: f64) -> f64 {
    mass * (1.0 - 1e-13)
}

/// Solves for the `n_r`-th positive-energy state of the problem.
pub fn solve_bound(problem: &RadialProblem) -> Result<BoundState, RadialError> {
    let s = Shooter::new(problem)?;
    let m = problem.mass;
    let mut lo = floor_energy(m);
    let mut hi = ceiling_energy(m);
    let d_lo = s.mismatch(lo);
    // largest multiple of pi strictly below the anchor, then count down
    let top = (d_lo / PI).ceil() as i64 - 1;
    let target = PI * (top - problem.n_r as i64) as f64;
    let d_hi = s.mismatch(hi);
    if d_hi >= target {
        return Err(RadialError::NoConvergence(format!(
            "only {} states below the continuum on this mesh; requested n_r = {}",
            ((d_lo - d_hi) / PI).floor().max(0.0),
            problem.n_r
        )));
    }
    let mut iterations = 0;
    while hi - lo > tolerances::RADIAL_BISECTION && iterations < tolerances::RADIAL_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if s.mismatch(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let converged = hi - lo <= tolerances::RADIAL_BISECTION;
    if !converged {
        return Err(RadialError::NoConvergence(format!(
            "bracket [{lo}, {hi}] after {iterations} iterations"
        )));
    }
    let energy = 0.5 * (lo + hi);
    let (to, ti, profile) = s.shoot(energy, true);
    let residual = (to - ti).sin().abs();
    if residual > 1e-6 {
        return Err(RadialError::GridTooCoarse { defect: residual });
    }
    let (theta, lrho) = profile.expect("profile requested");
    let lmax = lrho.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut g: Vec<f64> = Vec::with_capacity(theta.len());
    let mut f: Vec<f64> = Vec::with_capacity(theta.len());
    let sc = s.scale(energy);
    for (t, l) in theta.iter().zip(&lrho) {
        let rho = (l - lmax).exp();
        g.push(rho * t.cos());
        f.push(sc * rho * t.sin());
    }
    let w: Vec<f64> = (0..g.len())
        .map(|i| (g[i] * g[i] + f[i] * f[i]) * s.r[i])
        .collect();
    let scale = trapezoid(&w, s.h).sqrt().recip();
    g.iter_mut().for_each(|v| *v *= scale);
    f.iter_mut().for_each(|v| *v *= scale);
    let node_count = count_sign_changes(&g);
    Ok(BoundState {
        energy,
        r: s.r,
        g,
        f,
        node_count,
        converged,
        residual,
        iterations,
    })
}

/// Sign changes of `v`, ignoring samples that underflow relative to its peak.
fn count_sign_changes(v: &[f64]) -> u32 {
    let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let floor = 1e-10 * peak;
    let mut last = 0.0_f64;
    let mut count = 0;
    for &x in v {
        if x.abs() <= floor {
            continue;
        }
        if last != 0.0 && x.signum() != last.signum() {
            count += 1;
        }
        last = x;
    }
    count
}

/// Matching defect on `steps` evenly spaced energies in `[e_lo, e_hi]`.
pub fn eigen_scan(
    problem: &RadialProblem,
    e_lo: f64,
    e_hi: f64,
    steps: usize,
) -> Result<Vec<ScanSample>, RadialError> {
    let m = problem.mass;
    if steps == 0 || !(-m < e_lo && e_lo <= e_hi && e_hi < m) || (steps > 1 && e_lo == e_hi) {
        return Err(RadialError::EmptyRange);
    }
    let s = Shooter::new(problem)?;
    let anchor = s.mismatch(floor_energy(m));
    let count = |d: f64| -> u32 {
        // multiples of pi in (d, anchor)
        let below_anchor = (anchor / PI).ceil() - 1.0;
        let above_d = (d / PI).floor() + 1.0;
        (below_anchor - above_d + 1.0).max(0.0) as u32
    };
    let mut samples: Vec<ScanSample> = Vec::with_capacity(steps);
    for i in 0..steps {
        let e = if steps == 1 {
            e_lo
        } else {
            e_lo + (e_hi - e_lo) * i as f64 / (steps - 1) as f64
        };
        let d = s.mismatch(e);
        let node_count = count(d);
        let crossing = samples.last().is_some_and(|p| p.node_count != node_count);
        samples.push(ScanSample {
            energy: e,
            defect: d.sin(),
            node_count,
            crossing,
        });
    }
    Ok(samples)
}

/// Solves independent problems under the given execution policy.
pub fn solve_many(
    problems: &[RadialProblem],
    exec: Execution,
) -> Vec<Result<BoundState, RadialError>> {
    map_slice(exec, problems, solve_bound)
}

//! The acceptance computations, each reported as a list of measured parts
//! with their tolerances. Shared by the acceptance test target and the
//! command-line `reproduce` recipes.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    anticommutator, boost, covariance_defect, discrete_operator, energy_operator_matrix, gammas,
    hermitian_eigenvalues, rho, rotation, spectrum_pairing_defect, spinor_lorentz, ComplexMatrix4,
    DiscreteKind, FourVector, METRIC,
};
use crate::exec::{map_indexed, Execution};
use crate::fields::{
    gauge_constraint_residual, gauge_covariance_defect, greens_poisson, GaugeCoefficients,
};
use crate::grid::{Axis, Grid, Grid1p1, Grid3, GridField, SpaceField, SpacetimeField};
use crate::nls::{conserved_quantities, evolve, sech_soliton, NlsState};
use crate::radial::{solve_many, Coupling, RadialProblem};
use crate::scattering::{
    coulomb_high_energy, dcs_conventional_recoil, dcs_coulomb, dcs_ep, rutherford, sigma1,
    sigma1_brute, sigma2, sigma2_brute, ScatterKinematics, Sigma1Mode,
};
use crate::spectrum::{
    energy_conventional, energy_modified, exact_splitting_conventional, exact_splitting_modified,
    fine_splitting, percent_difference, CouplingConstants, LevelSpec, SpectrumError,
};
use crate::tolerances::Tolerances;
use crate::{ALPHA, ELECTRON_MASS_EV};

/// Seed of every random draw, so reports are reproducible.
pub const SEED: u64 = 20_240_601;

#[derive(Debug, Clone, PartialEq)]
pub struct Part {
    pub name: String,
    pub measured: String,
    pub tolerance: String,
    pub passed: bool,
}

impl Part {
    fn new(name: impl Into<String>, measured: impl Into<String>, tolerance: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            measured: measured.into(),
            tolerance: tolerance.into(),
            passed,
        }
    }

    /// `value <= limit`, reported in scientific notation.
    fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, format!("{value:.3e}"), format!("<= {limit:.1e}"), value <= limit)
    }

    fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, format!("{value:.4}"), format!(">= {limit}"), value >= limit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub id: u32,
    pub title: &'static str,
    pub parts: Vec<Part>,
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.parts.iter().all(|p| p.passed) && self.seconds < self.budget_seconds
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} criterion {}: {} ({:.2} s, budget {} s)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            self.budget_seconds
        )?;
        for p in &self.parts {
            writeln!(
                f,
                "    {} {}: {} (tolerance {})",
                if p.passed { "ok  " } else { "FAIL" },
                p.name,
                p.measured,
                p.tolerance
            )?;
        }
        Ok(())
    }
}

fn timed(id: u32, title: &'static str, budget_seconds: f64, body: impl FnOnce() -> Vec<Part>) -> Report {
    let start = Instant::now();
    let parts = body();
    Report {
        id,
        title,
        parts,
        seconds: start.elapsed().as_secs_f64(),
        budget_seconds,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn fold_max(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

/// Criterion ids that are implemented as specified but cannot pass, because
/// the relation they test does not hold. Each still runs and prints FAIL.
pub const KNOWN_UNATTAINABLE: &[u32] = &[7];

pub const CRITERIA: u32 = 10;

/// Runs criterion `id` (1 to 10).
pub fn run(id: u32, exec: Execution, tol: &Tolerances) -> Option<Report> {
    Some(match id {
        1 => percent_table(tol),
        2 => ground_state_regularity(tol),
        3 => radial_oracle(exec, tol),
        4 => level_ordering(exec, tol),
        5 => splitting_equality(tol),
        6 => spin_sums(exec, tol),
        7 => cross_section_limits(tol),
        8 => algebra_identities(exec, tol),
        9 => soliton(tol),
        10 => gauge_suite(exec, tol),
        _ => return None,
    })
}

pub fn run_all(exec: Execution, tol: &Tolerances) -> Vec<Report> {
    (1..=CRITERIA).filter_map(|id| run(id, exec, tol)).collect()
}

/// Rows `(Z, computed percent, quoted percent)` of the ground-state gap table.
pub fn percent_rows() -> Result<Vec<(f64, f64, f64)>, SpectrumError> {
    [(50.0, 1.0), (75.0, 5.0), (100.0, 15.0)]
        .into_iter()
        .map(|(z, quoted)| {
            let c = CouplingConstants::with_z(z)?;
            Ok((z, 100.0 * percent_difference(&c)?, quoted))
        })
        .collect()
}

pub fn percent_table(tol: &Tolerances) -> Report {
    timed(1, "ground-state percentage table", 1.0, || {
        let expected = [0.89, 4.59, 15.36];
        match percent_rows() {
            Ok(rows) => rows
                .iter()
                .zip(expected)
                .map(|(&(z, pct, quoted), want)| {
                    let close = (pct - want).abs() < tol.percent_table;
                    let rounds = pct.round() == quoted;
                    Part::new(
                        format!("Z = {z}"),
                        format!("{pct:.4}% (rounds to {})", pct.round()),
                        format!("|x - {want}%| < {}% and rounds to {quoted}%", tol.percent_table),
                        close && rounds,
                    )
                })
                .collect(),
            Err(e) => vec![Part::new("table", e.to_string(), "no error", false)],
        }
    })
}

pub fn ground_state_regularity(tol: &Tolerances) -> Report {
    timed(2, "ground-state regularity beyond Z alpha = 1", 1.0, || {
        let ground = LevelSpec::new(1, 0.5, 0).expect("1s1/2");
        let mut parts = Vec::new();
        for z in [137.0, 150.0, 170.0, 200.0] {
            let c = CouplingConstants::with_z(z).expect("positive Z");
            let e = energy_modified(&ground, &c);
            let want = 1.0 / (1.0 + c.za() * c.za()).sqrt();
            let err = (e - want).abs();
            parts.push(Part::new(
                format!("modified E(1s1/2), Z = {z}"),
                format!("{e:.12} (|diff| {err:.1e})"),
                format!("finite, |diff| <= {:.0e}", tol.ground_state),
                e.is_finite() && err <= tol.ground_state,
            ));
        }
        for z in [137.0, 138.0, 150.0, 170.0, 200.0] {
            let c = CouplingConstants::with_z(z).expect("positive Z");
            let r = energy_conventional(&ground, &c);
            let singular = matches!(r, Err(SpectrumError::SingularRegime { .. }));
            let (measured, passed) = match &r {
                Ok(e) => (format!("{e:.12}"), z < 138.0),
                Err(e) => (e.to_string(), z >= 138.0 && singular),
            };
            parts.push(Part::new(
                format!("conventional E(1s1/2), Z = {z}"),
                measured,
                if z >= 138.0 { "SingularRegime" } else { "finite" },
                passed,
            ));
        }
        parts
    })
}

/// The radial oracle matrix: both couplings, kappa in {-1, +1, -2}, n_r in {0, 1}.
pub fn radial_matrix() -> Vec<RadialProblem> {
    let mut out = Vec::new();
    for (coupling, zs) in [
        (Coupling::Scalar, &[1.0, 20.0, 50.0, 92.0, 137.0, 170.0][..]),
        (Coupling::Vector, &[1.0, 20.0, 50.0, 92.0][..]),
    ] {
        for &z in zs {
            for kappa in [-1, 1, -2] {
                for n_r in [0, 1] {
                    out.push(RadialProblem::new(coupling, z, kappa, n_r));
                }
            }
        }
    }
    out
}

fn closed_energy(p: &RadialProblem) -> Option<f64> {
    let level = p.level()?;
    let c = CouplingConstants::new(p.alpha, p.z).ok()?;
    match p.coupling {
        Coupling::Scalar => Some(energy_modified(&level, &c)),
        Coupling::Vector => energy_conventional(&level, &c).ok(),
    }
}

pub fn radial_oracle(exec: Execution, tol: &Tolerances) -> Report {
    timed(3, "radial solver against closed forms", 60.0, || {
        let problems = radial_matrix();
        let results = solve_many(&problems, exec);
        let mut parts = Vec::new();
        for coupling in [Coupling::Scalar, Coupling::Vector] {
            let mut worst = 0.0f64;
            let mut worst_at = String::new();
            let mut failures = Vec::new();
            for (p, r) in problems.iter().zip(&results).filter(|(p, _)| p.coupling == coupling) {
                let tag = format!("Z={} kappa={} n_r={}", p.z, p.kappa, p.n_r);
                match (r, closed_energy(p)) {
                    (Ok(b), Some(want)) => {
                        let err = (b.energy - want).abs() / p.mass;
                        if err > worst {
                            worst = err;
                            worst_at = tag.clone();
                        }
                        if b.node_count != p.expected_nodes() {
                            failures.push(format!("{tag}: {} nodes", b.node_count));
                        }
                    }
                    (Err(e), _) => failures.push(format!("{tag}: {e}")),
                    (_, None) => failures.push(format!("{tag}: no closed form")),
                }
            }
            let count = problems.iter().filter(|p| p.coupling == coupling).count();
            let mut part = Part::at_most(
                format!("{} coupling, {count} states, max |dE|/m (at {worst_at})", coupling.name()),
                worst,
                tol.radial_oracle,
            );
            if !failures.is_empty() {
                part.passed = false;
                part.measured = format!("{}; {}", part.measured, failures.join("; "));
            }
            parts.push(part);
        }
        let z170 = problems
            .iter()
            .zip(&results)
            .filter(|(p, _)| p.coupling == Coupling::Scalar && p.z == 170.0)
            .map(|(p, r)| match (r, closed_energy(p)) {
                (Ok(b), Some(w)) => (b.energy - w).abs(),
                _ => f64::INFINITY,
            });
        parts.push(Part::at_most("scalar coupling at Z = 170, max |dE|/m", fold_max(z170), tol.radial_oracle));
        parts
    })
}

pub fn level_ordering(exec: Execution, _tol: &Tolerances) -> Report {
    timed(4, "2P doublet ordering at Z = 92", 10.0, || {
        let c = CouplingConstants::with_z(92.0).expect("Z = 92");
        let p_half = LevelSpec::new(2, 0.5, 1).expect("2P1/2");
        let p_three = LevelSpec::new(2, 1.5, 1).expect("2P3/2");
        let (m_half, m_three) = (energy_modified(&p_half, &c), energy_modified(&p_three, &c));
        let conv = (energy_conventional(&p_half, &c), energy_conventional(&p_three, &c));
        let mut parts = vec![Part::new(
            "closed form, modified: E(2P1/2) > E(2P3/2)",
            format!("{m_half:.12} vs {m_three:.12}"),
            "strict order",
            m_half > m_three,
        )];
        parts.push(match conv {
            (Ok(h), Ok(t)) => Part::new(
                "closed form, conventional: E(2P1/2) < E(2P3/2)",
                format!("{h:.12} vs {t:.12}"),
                "strict order",
                h < t,
            ),
            _ => Part::new("closed form, conventional", "singular", "finite levels", false),
        });
        // 2P1/2 is kappa = +1 and 2P3/2 is kappa = -2, both n_r = 0
        let problems: Vec<RadialProblem> = [Coupling::Scalar, Coupling::Vector]
            .into_iter()
            .flat_map(|cp| [RadialProblem::new(cp, 92.0, 1, 0), RadialProblem::new(cp, 92.0, -2, 0)])
            .collect();
        let e: Vec<Option<f64>> = solve_many(&problems, exec)
            .into_iter()
            .map(|r| r.ok().map(|b| b.energy))
            .collect();
        let solver = |name: &str, a: Option<f64>, b: Option<f64>, above: bool| match (a, b) {
            (Some(a), Some(b)) => Part::new(
                name,
                format!("{a:.12} vs {b:.12}"),
                "strict order",
                if above { a > b } else { a < b },
            ),
            _ => Part::new(name, "solver failed", "converged states", false),
        };
        parts.push(solver("radial solver, scalar: E(2P1/2) > E(2P3/2)", e[0], e[1], true));
        parts.push(solver("radial solver, vector: E(2P1/2) < E(2P3/2)", e[2], e[3], false));
        parts
    })
}

pub fn splitting_equality(tol: &Tolerances) -> Report {
    timed(5, "n = 2 fine splitting at Z = 1", 1.0, || {
        let c = CouplingConstants::with_z(1.0).expect("Z = 1");
        let (modified, conventional, leading) = match (
            exact_splitting_modified(2, 0.5, 1.5, &c),
            exact_splitting_conventional(2, 0.5, 1.5, &c),
            fine_splitting(2, 0.5, 1.5, &c),
        ) {
            (Ok(a), Ok(b), Ok(l)) => (a, b, l),
            _ => return vec![Part::new("splittings", "error", "finite", false)],
        };
        let closed = c.za().powi(4) / 32.0;
        vec![
            Part::at_most(
                format!("|dE_mod - dE_conv| / dE (dE_mod = {modified:.6e})"),
                (modified - conventional).abs() / conventional,
                tol.splitting_agreement,
            ),
            Part::at_most("leading splitting vs m (Z alpha)^4 / 32, relative", rel(leading, closed), tol.splitting_closed_form),
        ]
    })
}

fn random_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let ct: f64 = rng.gen_range(-1.0..1.0);
    let ph: f64 = rng.gen_range(0.0..2.0 * PI);
    let st = (1.0 - ct * ct).sqrt();
    [st * ph.cos(), st * ph.sin(), ct]
}

/// Worst relative mismatch between the brute-force and closed-form spin sums
/// over `draws` random kinematics each.
pub fn spin_sum_defects(draws: usize, exec: Execution) -> (f64, f64) {
    let s1 = map_indexed(exec, draws, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ (i as u64));
        let m: f64 = rng.gen_range(0.1..10.0);
        let p = m * rng.gen_range(0.0..30.0);
        let (a, b) = (random_direction(&mut rng), random_direction(&mut rng));
        let pi = FourVector::on_shell(m, a.map(|x| p * x));
        let pf = FourVector::on_shell(m, b.map(|x| p * x));
        match (sigma1_brute(pi, pf, m), sigma1(pi, pf, m)) {
            (Ok(x), Ok(y)) => rel(x, y),
            _ => f64::INFINITY,
        }
    });
    let s2 = map_indexed(exec, draws, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED.rotate_left(17) ^ (i as u64));
        let e: f64 = rng.gen_range(1.5..1e3);
        let big = e * rng.gen_range(0.05..100.0);
        let theta = rng.gen_range(0.01..PI);
        match ScatterKinematics::new(e, theta, 1.0, Some(big)) {
            Ok(k) => match (sigma2_brute(&k), sigma2(&k)) {
                (Ok(x), Ok(y)) => rel(x, y),
                _ => f64::INFINITY,
            },
            Err(_) => f64::INFINITY,
        }
    });
    (fold_max(s1), fold_max(s2))
}

pub fn spin_sums(exec: Execution, tol: &Tolerances) -> Report {
    timed(6, "spin-sum trace oracles", 30.0, || {
        let (d1, d2) = spin_sum_defects(1000, exec);
        vec![
            Part::at_most("Sigma1 brute vs closed form, 1000 draws, max relative", d1, tol.sigma1),
            Part::at_most("Sigma2 brute vs closed form, 1000 draws, max relative", d2, tol.sigma2),
        ]
    })
}

/// Angles from `lo` to `hi` degrees inclusive, in radians.
fn degrees(lo: u32, hi: u32, step: u32) -> Vec<f64> {
    (lo..=hi).step_by(step as usize).map(|d| (d as f64).to_radians()).collect()
}

/// `(max - min) / |mean|` of a sampled quantity.
fn spread(v: &[f64]) -> f64 {
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    (hi - lo) / mean.abs()
}

pub fn cross_section_limits(tol: &Tolerances) -> Report {
    timed(7, "cross-section limits", 5.0, || {
        let m = 1.0;
        let mut parts = Vec::new();
        let slow = ScatterKinematics::new((1.0f64 + 1e-6).sqrt(), 1.0, m, None).expect("E > m");
        let dev = degrees(1, 180, 1).into_iter().map(|th| {
            let k = slow.with_theta(th);
            dcs_coulomb(&k, 1.0, ALPHA).map_or(f64::INFINITY, |d| rel(d, rutherford(&k, 1.0, ALPHA)))
        });
        parts.push(Part::at_most("|p| = 1e-3 m: Coulomb vs Rutherford, 1..180 deg", fold_max(dev), tol.dcs_limit));
        // The ultra-relativistic form drops m^2 / (p^2 sin^2(theta/2)), which is
        // below 1e-5 at |p| = 1e3 m only for theta above about 37 degrees.
        let fast = ScatterKinematics::new((1.0f64 + 1e6).sqrt(), 1.0, m, None).expect("E > m");
        let dev = degrees(60, 180, 1).into_iter().map(|th| {
            let k = fast.with_theta(th);
            dcs_coulomb(&k, 1.0, ALPHA).map_or(f64::INFINITY, |d| rel(d, coulomb_high_energy(&k, 1.0, ALPHA)))
        });
        parts.push(Part::at_most(
            "|p| = 1e3 m: Coulomb vs ultra-relativistic form, 60..180 deg",
            fold_max(dev),
            tol.dcs_limit,
        ));
        let ep = ScatterKinematics::new(188e6, 1.0, ELECTRON_MASS_EV, Some(938e6)).expect("E > m");
        let mut literal = Vec::new();
        let mut corrected = Vec::new();
        for th in degrees(10, 180, 5) {
            let k = ep.with_theta(th);
            let s2 = (0.5 * th).sin().powi(2);
            match (dcs_ep(&k, ALPHA, Sigma1Mode::HighEnergy), dcs_conventional_recoil(&k, ALPHA)) {
                (Ok(d), Ok(c)) => {
                    literal.push(d * s2 / c);
                    corrected.push(d / (s2 * c));
                }
                _ => {
                    literal.push(f64::NAN);
                    corrected.push(f64::NAN);
                }
            }
        }
        let flat = |v: &[f64]| if v.iter().all(|x| x.is_finite()) { spread(v) } else { f64::INFINITY };
        parts.push(Part::at_most(
            "E = 188 MeV, M = 938 MeV: spread of dcs_ep(highE) sin^2(theta/2) / conventional, 10..180 deg",
            flat(&literal),
            tol.dcs_ratio_flatness,
        ));
        parts.push(Part::at_most(
            "same kinematics: spread of dcs_ep(highE) / (sin^2(theta/2) conventional)",
            flat(&corrected),
            tol.dcs_ratio_flatness,
        ));
        parts
    })
}

/// Largest entry of `a - b`; zero means bit-exact agreement.
fn exact_gap(a: &ComplexMatrix4, b: &ComplexMatrix4) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn algebra_identities(exec: Execution, tol: &Tolerances) -> Report {
    timed(8, "gamma algebra identity suite", 10.0, || {
        let g = gammas();
        let id = ComplexMatrix4::identity();
        let mut parts = Vec::new();
        let anti = fold_max((0..4).flat_map(|mu| {
            let g = &g;
            (mu..4).map(move |nu| {
                let want = if mu == nu { id * Complex64::from(2.0 * METRIC[mu]) } else { ComplexMatrix4::zeros() };
                exact_gap(&anticommutator(&g[mu], &g[nu]), &want)
            })
        }));
        parts.push(Part::at_most("{gamma^mu, gamma^nu} - 2 g^{mu nu}, 10 pairs", anti, 0.0));

        let s = discrete_operator(DiscreteKind::SpaceInversion);
        let t = discrete_operator(DiscreteKind::TimeInversion);
        let o = discrete_operator(DiscreteKind::ParticleConjugation);
        let conj = |m: &ComplexMatrix4, x: &ComplexMatrix4| m * x * m.adjoint();
        let space = fold_max((0..4).map(|mu| {
            let sign = if mu == 0 { 1.0 } else { -1.0 };
            exact_gap(&conj(&s, &g[mu]), &(g[mu] * Complex64::from(sign)))
        }));
        let time = fold_max((0..4).map(|mu| {
            let sign = if mu == 0 { -1.0 } else { 1.0 };
            exact_gap(&conj(&t, &g[mu]), &(g[mu] * Complex64::from(sign)))
        }));
        let particle = fold_max((0..4).map(|mu| exact_gap(&conj(&o, &g[mu].map(|z| z.conj())), &g[mu])));
        let unitary = fold_max([s, t, o].iter().map(|m| exact_gap(&(m * m.adjoint()), &id)));
        parts.push(Part::at_most("space inversion: gamma^0 kept, gamma^i reversed", space, 0.0));
        parts.push(Part::at_most("time inversion: gamma^0 reversed, gamma^i kept", time, 0.0));
        parts.push(Part::at_most("particle conjugation: O (gamma^mu)* O^-1 = gamma^mu", particle, 0.0));
        parts.push(Part::at_most("S, T, O unitary", unitary, 0.0));
        // sqrt 2 U has Gaussian-integer entries, so the rotation of rho_2 into
        // -rho_3 can be checked exactly on it.
        let i = Complex64::i();
        let one = Complex64::from(1.0);
        let mut u2 = ComplexMatrix4::zeros();
        for k in 0..4 {
            u2[(k, k)] = one;
            u2[(k, (k + 2) % 4)] = i;
        }
        let (r2, r3) = (rho(2).expect("rho_2"), rho(3).expect("rho_3"));
        let diag = exact_gap(&(u2 * r2 * u2.adjoint()), &(r3 * Complex64::from(-2.0)))
            .max(exact_gap(&(u2 * u2.adjoint()), &(id * Complex64::from(2.0))));
        parts.push(Part::at_most("U rho_2 U^-1 = -rho_3", diag, 0.0));

        let cov = map_indexed(exec, 100, |k| {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED.wrapping_add(k as u64));
            let a = boost(rng.gen_range(-2.5..2.5), random_direction(&mut rng))
                * rotation(rng.gen_range(0.0..0.9 * PI), random_direction(&mut rng));
            spinor_lorentz(&a).map_or(f64::INFINITY, |l| covariance_defect(&l, &a))
        });
        parts.push(Part::at_most(
            "L gamma^mu L^-1 = a^mu_nu gamma^nu, 100 random boosts",
            fold_max(cov),
            tol.spinor_covariance,
        ));
        let pairing = map_indexed(exec, 1000, |k| {
            let mut rng = ChaCha8Rng::seed_from_u64(SEED.rotate_left(31).wrapping_add(k as u64));
            let mut v3 = || [0; 3].map(|_| rng.gen_range(-3.0..3.0));
            let (p, a) = (v3(), v3());
            let phi = rng.gen_range(-3.0..3.0);
            let e = rng.gen_range(-2.0..2.0);
            let m = rng.gen_range(0.0..3.0);
            spectrum_pairing_defect(&hermitian_eigenvalues(&energy_operator_matrix(p, phi, a, e, m)))
        });
        parts.push(Part::at_most(
            "energy-operator spectrum pairs as +-lambda, 1000 draws",
            fold_max(pairing),
            tol.spectrum_pairing,
        ));
        parts
    })
}

pub fn soliton(tol: &Tolerances) -> Report {
    timed(9, "bright soliton over T = 10", 60.0, || {
        let psi0 = match sech_soliton(1024, 80.0, 0.0, 0.0) {
            Ok(p) => p,
            Err(e) => return vec![Part::new("initial state", e.to_string(), "valid", false)],
        };
        let state = NlsState::new(psi0.clone(), -1.0, 1e-3);
        let before = conserved_quantities(&state);
        let after = match evolve(state, 10.0) {
            Ok(s) => s,
            Err(e) => return vec![Part::new("evolution", e.to_string(), "no error", false)],
        };
        let shape = fold_max(
            after
                .psi
                .values()
                .iter()
                .zip(psi0.values())
                .map(|(a, b)| (a.norm() - b.norm()).abs()),
        );
        let c = conserved_quantities(&after);
        vec![
            Part::at_most("max | |psi(T)| - sech |, N = 1024, dt = 1e-3", shape, tol.soliton_shape),
            Part::at_most("|norm(T) - norm(0)|", (c.norm - before.norm).abs(), tol.nls_norm_drift),
            Part::new(
                "energy drift (reported)",
                format!("{:.3e}", (c.energy - before.energy).abs()),
                "none",
                true,
            ),
        ]
    })
}

/// Uniform 1+1 grid with `n` samples per axis over `[0, len]`.
fn spacetime(n: usize, len: f64) -> Grid1p1 {
    let h = len / (n - 1) as f64;
    let axis = Axis::new(n, 0.0, h).expect("positive step");
    Grid1p1 { t: axis, x: axis }
}

fn smooth_density(g: Grid1p1) -> SpacetimeField<f64> {
    GridField::from_fn(g, |(t, x)| 1.0 + 0.1 * (x + 0.5 * t).sin())
}

/// The three coefficient sets of the gauge convergence study.
pub fn gauge_coefficient_sets() -> Vec<GaugeCoefficients> {
    vec![
        GaugeCoefficients::single(1, 1.0).expect("odd"),
        GaugeCoefficients::new([(1, 2.0), (-1, 0.5), (3, -1.0)]).expect("odd"),
        GaugeCoefficients::new([(-3, 0.2), (5, 0.7)]).expect("odd"),
    ]
}

/// Largest `|4 pi r phi - 1|` for a unit point charge on a 48^3 grid over
/// `2 <= r <= 8` (cell size 0.5).
pub fn point_source_defect(exec: Execution) -> Result<f64, crate::fields::FieldError> {
    let g = Grid3::cube(48, 12.0)?;
    let mut src = SpaceField::filled(g, 0.0);
    let c = g.index(24, 24, 24);
    src.values_mut()[c] = 1.0 / g.cell_volume();
    let phi = greens_poisson(&src, exec)?;
    let x0 = g.point(c);
    Ok(fold_max(phi.values().iter().enumerate().filter_map(|(i, &v)| {
        let p = g.point(i);
        let r = ((p[0] - x0[0]).powi(2) + (p[1] - x0[1]).powi(2) + (p[2] - x0[2]).powi(2)).sqrt();
        (2.0..=8.0).contains(&r).then(|| (v * 4.0 * PI * r - 1.0).abs())
    })))
}

/// Constraint residual and gauge covariance defect on the grids with `n` and
/// `2n - 1` samples per axis over `[0, 3]`, as `([coarse, fine], [coarse, fine])`.
/// The covariance probe uses the same smooth density with `e = 0.7`.
pub fn gauge_residuals(c: &GaugeCoefficients, e: f64, n: usize) -> Result<([f64; 2], [f64; 2]), crate::fields::FieldError> {
    let mut residual = [0.0; 2];
    let mut defect = [0.0; 2];
    for (k, g) in [spacetime(n, 3.0), spacetime(2 * n - 1, 3.0)].into_iter().enumerate() {
        residual[k] = gauge_constraint_residual(&smooth_density(g), c, e)?;
        let psi = GridField::from_fn(g, |(t, x)| {
            let env = Complex64::from_polar(1.0 + 0.2 * (0.7 * x).cos(), 0.8 * x - 1.3 * t);
            crate::algebra::Spinor4::new(env, env * 0.3, env * Complex64::new(0.0, 0.2), 0.0.into())
        });
        let a = GridField::from_fn(g, |(t, x)| [0.4 * (0.5 * x).sin(), 0.2 * t.cos(), 0.1, 0.0]);
        defect[k] = gauge_covariance_defect(&psi, &a, &smooth_density(g), c, 0.7, 1.0)?;
    }
    Ok((residual, defect))
}

pub fn gauge_suite(exec: Execution, tol: &Tolerances) -> Report {
    timed(10, "gauge and field suite", 120.0, || {
        let mut parts = Vec::new();
        let mut defect = [f64::NAN; 2];
        for (k, c) in gauge_coefficient_sets().iter().enumerate() {
            let (r, d) = gauge_residuals(c, 0.3, 21).unwrap_or(([f64::NAN; 2], [f64::NAN; 2]));
            if k == 0 {
                defect = d;
            }
            parts.push(Part::at_least(
                format!("constraint residual order, coefficient set {}", k + 1),
                (r[0] / r[1]).log2(),
                tol.min_order,
            ));
        }
        let [d1, d2] = defect;
        parts.push(Part::at_least(
            format!("gauge-transformed residual defect order ({d1:.2e} -> {d2:.2e})"),
            (d1 / d2).log2(),
            tol.min_order,
        ));
        parts.push(Part::at_most(
            "48^3 point source, max |4 pi r phi - 1| over 2 <= r <= 8",
            point_source_defect(exec).unwrap_or(f64::INFINITY),
            tol.poisson_point,
        ));
        parts
    })
}

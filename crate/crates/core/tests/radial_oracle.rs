//! Shooting solver against the closed-form spectra.

use unitary_dirac::radial::{solve_bound, solve_many, Coupling, RadialProblem};
use unitary_dirac::spectrum::{energy_conventional, energy_modified, CouplingConstants};
use unitary_dirac::Execution;

fn closed(p: &RadialProblem) -> f64 {
    let level = p.level().unwrap();
    let c = CouplingConstants::new(p.alpha, p.z).unwrap();
    match p.coupling {
        Coupling::Scalar => energy_modified(&level, &c),
        Coupling::Vector => energy_conventional(&level, &c).unwrap(),
    }
}

fn matrix() -> Vec<RadialProblem> {
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

#[test]
fn oracle_matrix() {
    let problems = matrix();
    let results = solve_many(&problems, Execution::Parallel);
    for (p, r) in problems.iter().zip(results) {
        let b = r.unwrap_or_else(|e| panic!("{p:?}: {e}"));
        let want = closed(p);
        assert!(
            (b.energy - want).abs() <= 1e-6,
            "{:?} Z={} kappa={} n_r={}: {} vs {}",
            p.coupling,
            p.z,
            p.kappa,
            p.n_r,
            b.energy,
            want
        );
        assert_eq!(b.node_count, p.expected_nodes(), "{p:?}");
        assert!((b.norm() - 1.0).abs() < 1e-8);
    }
}

#[test]
fn second_order_or_better_under_refinement() {
    let base = RadialProblem::new(Coupling::Scalar, 50.0, -1, 0);
    let want = closed(&base);
    let err = |h: f64| (solve_bound(&base.clone().with_step(h)).unwrap().energy - want).abs();
    let (coarse, fine) = (err(0.08), err(0.04));
    assert!(coarse / fine >= 4.0 || fine < 1e-10, "{coarse:e} -> {fine:e}");
}

#[test]
fn solver_reproduces_doublet_order_at_z92() {
    let e = |c, kappa| solve_bound(&RadialProblem::new(c, 92.0, kappa, 0)).unwrap().energy;
    // 2P1/2 is kappa = +1, 2P3/2 is kappa = -2
    assert!(e(Coupling::Scalar, 1) > e(Coupling::Scalar, -2));
    assert!(e(Coupling::Vector, 1) < e(Coupling::Vector, -2));
}

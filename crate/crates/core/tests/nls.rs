use num_complex::Complex64;
use unitary_dirac::grid::{Grid, Grid3, GridField, LineField};
use unitary_dirac::nls::*;

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `sech(x - x0 - v t) exp(i (v x + (1 - v^2) t / 2))`.
fn moving_soliton(grid_of: &LineField<Complex64>, x0: f64, v: f64, t: f64) -> Vec<Complex64> {
    let g = *grid_of.grid();
    GridField::from_fn(g, |x| {
        Complex64::from_polar(1.0 / (x - x0 - v * t).cosh(), v * x + 0.5 * (1.0 - v * v) * t)
    })
    .into_values()
}

#[test]
fn soliton_keeps_its_shape_and_norm() {
    let p0 = sech_soliton(1024, 80.0, 0.0, 0.0).unwrap();
    let s = NlsState::new(p0.clone(), -1.0, 1e-3);
    let c0 = conserved_quantities(&s);
    let out = evolve(s, 10.0).unwrap();
    assert!((out.t - 10.0).abs() < 1e-9);
    let c1 = conserved_quantities(&out);
    let shape = out
        .psi
        .values()
        .iter()
        .zip(p0.values())
        .map(|(a, b)| (a.norm() - b.norm()).abs())
        .fold(0.0, f64::max);
    assert!(shape < 1e-6, "{shape}");
    assert!((c1.norm - c0.norm).abs() < 1e-9);
    assert!((c1.energy - c0.energy).abs() < 1e-8 * 10.0);
    assert!(max_diff(out.psi.values(), &moving_soliton(&p0, 0.0, 0.0, 10.0)) < 1e-5);
}

#[test]
fn splitting_is_second_order_in_time() {
    let p0 = sech_soliton(512, 60.0, 0.0, 0.0).unwrap();
    let exact = moving_soliton(&p0, 0.0, 0.0, 2.0);
    let err = |dt: f64| {
        let out = evolve(NlsState::new(p0.clone(), -1.0, dt), 2.0).unwrap();
        max_diff(out.psi.values(), &exact)
    };
    let (e1, e2) = (err(0.01), err(0.005));
    // The ratio tends to 4 from below: 3.9994 for 0.02/0.01, 3.99994 here.
    assert!((e1 / e2).log2() > 1.999, "{e1} {e2}");
}

#[test]
fn boosted_soliton_moves_at_its_velocity() {
    let v = 1.5;
    let p0 = sech_soliton(1024, 80.0, -10.0, v).unwrap();
    let out = evolve(NlsState::new(p0.clone(), -1.0, 1e-3), 6.0).unwrap();
    let rho: Vec<f64> = out.psi.values().iter().map(|z| z.norm_sqr()).collect();
    let h = out.psi.grid().x.step;
    let centre = (0..rho.len()).map(|i| out.psi.grid().point(i) * rho[i]).sum::<f64>()
        / rho.iter().sum::<f64>();
    assert!((centre - (-10.0 + v * 6.0)).abs() < h, "{centre}");
    assert!(max_diff(out.psi.values(), &moving_soliton(&p0, -10.0, v, 6.0)) < 1e-4);
}

#[test]
fn free_gaussian_spreads_quadratically() {
    let (s0, m) = (1.0f64, 2.0);
    let grid = periodic_line(1024, 80.0).unwrap();
    let amp = (2.0 * std::f64::consts::PI * s0 * s0).powf(-0.25);
    let p0 = GridField::from_fn(grid, |x| Complex64::from(amp * (-x * x / (4.0 * s0 * s0)).exp()));
    let mut s = NlsState::new(p0, 0.0, 1e-2).with_mass(m);
    for t in [1.0, 2.0, 4.0] {
        s = evolve(s.clone(), t - s.t).unwrap();
        let var: f64 = s
            .psi
            .values()
            .iter()
            .enumerate()
            .map(|(i, z)| grid.point(i).powi(2) * z.norm_sqr())
            .sum::<f64>()
            * grid.x.step;
        let want = s0 * s0 + t * t / (4.0 * m * m * s0 * s0);
        assert!((var - want).abs() < 1e-8, "t={t}: {var} vs {want}");
    }
}

fn coulomb_cube() -> (Grid3, GridField<Grid3, f64>) {
    let g = Grid3::cube(40, 14.0).unwrap();
    let phi = GridField::from_fn(g, |[x, y, z]| -1.0 / (x * x + y * y + z * z).sqrt());
    (g, phi)
}

#[test]
fn spin_orbit_order_is_reversed() {
    let (g, phi) = coulomb_cube();
    let so = |st| hamiltonian_terms(&hydrogenic(g, st), &phi, [0.0; 3], 1.0, 1.0).unwrap().spin_orbit;
    let (half, three_half) = (so(HydrogenicState::P1Half), so(HydrogenicState::P3Half));
    // s.l is -1 for j = 1/2 and +1/2 for j = 3/2; with the reversed sign the
    // j = 1/2 level sits above. <1/r^3> = 1/24 for this radial function.
    assert!(half > 0.0 && three_half < 0.0 && half > three_half);
    assert!((half / three_half + 2.0).abs() < 1e-9, "{half} {three_half}");
    // The singular weight near the origin makes the grid value converge
    // slowly: 19% low at h = 0.7, 11% at h = 0.5.
    let fine = Grid3::cube(56, 14.0).unwrap();
    let phi_fine = GridField::from_fn(fine, |[x, y, z]| -1.0 / (x * x + y * y + z * z).sqrt());
    let half_fine = hamiltonian_terms(&hydrogenic(fine, HydrogenicState::P1Half), &phi_fine, [0.0; 3], 1.0, 1.0)
        .unwrap()
        .spin_orbit;
    let exact = 1.0 / 48.0;
    assert!((half_fine - exact).abs() < (half - exact).abs());
    assert!((half_fine - exact).abs() < 0.15 * exact, "{half_fine}");
    let s = so(HydrogenicState::S1Half);
    assert!(s.abs() < 1e-12 * half, "{s}");
}

#[test]
fn unnormalised_input_is_rejected() {
    let (g, phi) = coulomb_cube();
    let psi = hydrogenic(g, HydrogenicState::S1Half).map(|u| u * Complex64::from(1.1));
    assert!(matches!(
        hamiltonian_terms(&psi, &phi, [0.0; 3], 1.0, 1.0),
        Err(NlsError::UnnormalizedInput(_))
    ));
}

#[test]
fn zeeman_term_of_aligned_spin() {
    // s-state, spin up along B: k.B = sigma_z B, so the term is -(e/2m) B.
    let (g, phi) = coulomb_cube();
    let t = hamiltonian_terms(&hydrogenic(g, HydrogenicState::S1Half), &phi, [0.0, 0.0, 0.3], 1.0, 1.0).unwrap();
    assert!((t.zeeman + 0.15).abs() < 1e-6, "{}", t.zeeman);
    assert!(t.electric < 0.0);
}

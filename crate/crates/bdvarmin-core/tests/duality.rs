use bdvarmin_core::duality::{
    delta_functional, density_to_weights, dipole_norm, dual_value, duality_gap, lip_dual_norm, project_div_free,
    residual_functional, DivFreeProjector, DualCandidate, DIV_TOL,
};
use bdvarmin_core::grid::{interior_div_norm, sym_gradient, Sym2, SymTensorField};
use bdvarmin_core::lp::DenseSimplex;
use bdvarmin_core::solver::{minimize_fj, minimize_plain, run_viscosity_sequence, sigma_field, Schedule, SolverOptions};
use bdvarmin_core::{GridDomain, Integrand, VectorField};

fn shear(g: GridDomain) -> VectorField {
    VectorField::from_fn(g, |x, y| [0.5 * (3.0 * x * y).sin(), x * x - 0.5 * y])
}

#[test]
fn projection_fixes_div_free_fields() {
    let g = GridDomain::unit_square(10).unwrap();
    let c = SymTensorField::constant(g, Sym2::sym_product([0.6, -0.8], [0.6, -0.8]));
    assert!(project_div_free(&c).unwrap().sub(&c).max_norm() < 1e-10);
    let u0 = VectorField::from_fn(g, |x, y| [x * y, (2.0 * x).sin() * y]);
    let s = minimize_plain(&Integrand::quadratic(), &u0, &SolverOptions { tol: 1e-12, ..Default::default() }).unwrap();
    let sigma = sym_gradient(&s.v);
    assert!(interior_div_norm(&sigma) < 1e-10);
    assert!(project_div_free(&sigma).unwrap().sub(&sigma).max_norm() < 1e-10);
    let p = DivFreeProjector::new(g).unwrap();
    let wiggle = SymTensorField::from_fn(g, |x, y| Sym2::new((7.0 * x).sin(), x * y, (5.0 * y).cos()));
    let once = p.project(&wiggle).unwrap();
    assert!(interior_div_norm(&once) < 1e-10);
    assert!(p.project(&once).unwrap().sub(&once).max_norm() < 1e-10);
}

#[test]
fn zero_candidate_on_area() {
    let g = GridDomain::unit_square(8).unwrap();
    let f = Integrand::area();
    let chi = DualCandidate::new(SymTensorField::zeros(g), &f, DIV_TOL);
    let u0 = shear(g);
    assert!((dual_value(&chi, &u0, &f) - 1.0).abs() < 1e-14);
    let primal = minimize_plain(&f, &u0, &SolverOptions::default()).unwrap().energy_f;
    assert!(duality_gap(primal, &chi, &u0, &f).unwrap() >= 0.0);
}

#[test]
fn infeasible_candidates() {
    let g = GridDomain::unit_square(6).unwrap();
    let f = Integrand::phi_mu(1.5).unwrap();
    let u0 = shear(g);
    let big = DualCandidate::new(SymTensorField::constant(g, Sym2::new(3.0, 0.0, 0.0)), &f, DIV_TOL);
    assert!(!big.feasible);
    assert_eq!(dual_value(&big, &u0, &f), f64::NEG_INFINITY);
    let bumpy = SymTensorField::from_fn(g, |x, _| Sym2::new(x, 0.0, 0.0));
    let c = DualCandidate::new(bumpy, &f, DIV_TOL);
    assert!(!c.feasible && c.div_residual > 0.1);
    assert!(duality_gap(0.0, &c, &u0, &f).is_err());
}

#[test]
fn quadratic_strong_duality() {
    let g = GridDomain::unit_square(12).unwrap();
    let f = Integrand::quadratic();
    let u0 = shear(g);
    let s = minimize_plain(&f, &u0, &SolverOptions { tol: 1e-12, ..Default::default() }).unwrap();
    let chi = DualCandidate::from_stress(&sym_gradient(&s.v), &f).unwrap();
    assert!(chi.feasible);
    let gap = duality_gap(s.energy_f, &chi, &u0, &f).unwrap();
    assert!(gap.abs() <= 1e-8, "{gap}");
}

#[test]
fn area_gap_closes_along_sequence() {
    let g = GridDomain::unit_square(16).unwrap();
    let f = Integrand::area();
    let u0 = shear(g);
    let seq = run_viscosity_sequence(&f, &Schedule::dyadic(8, 1e-10), &u0, &SolverOptions::default()).unwrap();
    let gaps: Vec<f64> = seq
        .solutions
        .iter()
        .zip(&seq.sigmas)
        .map(|(s, sigma)| {
            let chi = DualCandidate::from_stress(sigma, &f).unwrap();
            duality_gap(s.energy_f, &chi, &u0, &f).unwrap()
        })
        .collect();
    assert!(gaps.iter().all(|g| *g >= -1e-9), "{gaps:?}");
    assert!(*gaps.last().unwrap() < 1e-3, "{gaps:?}");
    assert!(gaps.last().unwrap() < &gaps[0]);
}

#[test]
fn stress_matches_sigma_field() {
    let g = GridDomain::unit_square(8).unwrap();
    let f = Integrand::phi_mu(1.2).unwrap();
    let s = minimize_fj(&f, 4, &shear(g), &SolverOptions::default()).unwrap();
    let sigma = sigma_field(&f, 4, &s.v);
    // Discrete Euler-Lagrange: the stress is divergence free at the optimum.
    assert!(interior_div_norm(&sigma) < 1e-9);
    let r = residual_functional(&sigma);
    assert!(lip_dual_norm(g, &r, &DenseSimplex::default()).unwrap() < 1e-9);
}

// Reference values from HiGHS (oracles/lip_oracle.py).
#[test]
fn lip_norm_matches_highs() {
    for (n, a, b, want) in [
        (6, 1.3, 0.9, 0.1551743684005858),
        (8, 1.3, 0.9, 0.13580684434367948),
        (8, 2.1, 0.3, 0.1565759857740763),
    ] {
        let g = GridDomain::unit_square(n).unwrap();
        let h2 = g.h() * g.h();
        let mut w = vec![[0.0; 2]; g.num_nodes()];
        for j in 0..n {
            for i in 0..n {
                let (fi, fj) = (i as f64, j as f64);
                w[g.node(i, j)] = [(a * fi + 0.7 * fj).sin() * h2, (0.4 * fi - b * fj).cos() * h2];
            }
        }
        let v = lip_dual_norm(g, &w, &DenseSimplex::default()).unwrap();
        assert!((v - want).abs() < 1e-9, "n={n}: {v} vs {want}");
    }
}

#[test]
fn dipoles() {
    let g = GridDomain::unit_square(9).unwrap();
    let lp = DenseSimplex::default();
    for (a, b) in [((4, 4), (5, 4)), ((2, 3), (6, 6)), ((1, 1), (7, 7)), ((1, 4), (7, 4)), ((4, 2), (4, 6))] {
        let mut w = vec![[0.0; 2]; g.num_nodes()];
        w[g.node(a.0, a.1)][1] = 1.0;
        w[g.node(b.0, b.1)][1] = -1.0;
        let v = lip_dual_norm(g, &w, &lp).unwrap();
        assert!((v - dipole_norm(g, a, b)).abs() < 1e-9, "{a:?} {b:?}: {v}");
    }
    // Neighbours are one lattice step apart.
    assert!((dipole_norm(g, (4, 4), (5, 4)) - g.h()).abs() < 1e-15);
    // Far-apart points near the boundary route through it.
    assert!((dipole_norm(g, (1, 1), (7, 7)) - 2.0 * g.h()).abs() < 1e-15);
}

#[test]
fn zero_functional() {
    let g = GridDomain::unit_square(7).unwrap();
    assert_eq!(lip_dual_norm(g, &density_to_weights(&VectorField::zeros(g)), &DenseSimplex::default()).unwrap(), 0.0);
    assert!(lip_dual_norm(g, &[[0.0; 2]; 3], &DenseSimplex::default()).is_err());
}

#[test]
fn difference_quotients_bounded_by_l1() {
    let g = GridDomain::unit_square(9).unwrap();
    let h2 = g.h() * g.h();
    let fields = [
        VectorField::from_fn(g, |x, y| [(9.0 * x).sin() * y, (x - y).signum()]),
        VectorField::from_fn(g, |x, y| [if x > 0.5 { 1.0 } else { -1.0 }, (13.0 * x * y).cos()]),
        VectorField::from_fn(g, |x, y| [x * x - y, 0.0]),
    ];
    for v in &fields {
        let l1: f64 = v.values.iter().map(|c| (c[0].abs() + c[1].abs()) * h2).sum();
        for axis in 0..2 {
            for steps in 1..4 {
                let t = delta_functional(v, axis, steps).unwrap();
                let n = lip_dual_norm(g, &t, &DenseSimplex::default()).unwrap();
                assert!(n <= l1 + 1e-12, "axis {axis} steps {steps}: {n} > {l1}");
            }
        }
    }
    assert!(delta_functional(&fields[0], 2, 1).is_err());
    assert!(delta_functional(&fields[0], 0, 0).is_err());
}

use bdvarmin_core::grid::sym_gradient;
use bdvarmin_core::rigid::{korn_poincare_check, lp_stability_ratio, project_rigid, rigid_basis};
use bdvarmin_core::{Error, GridDomain, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rigid(g: GridDomain, a: f64, b: f64, c: f64) -> VectorField {
    VectorField::from_fn(g, |x, y| [a - c * y, b + c * x])
}

#[test]
fn basis_properties() {
    for n in [3, 8, 17] {
        let g = GridDomain::unit_square(n).unwrap();
        let b = rigid_basis(g);
        assert_eq!(b.dim(), 3);
        for (k, f) in b.fields.iter().enumerate() {
            assert!(sym_gradient(f).max_norm() < 1e-13);
            for m in 0..3 {
                let want = if k == m { 1.0 } else { 0.0 };
                assert!((b.gram[k][m] - want).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn projection_examples() {
    let g = GridDomain::unit_square(12).unwrap();
    let b = rigid_basis(g);
    let r = rigid(g, 0.3, -1.1, 0.7);
    let (pi, res) = project_rigid(&b, &r).unwrap();
    assert!(res.max_norm() < 1e-12 && pi.sub(&r).max_norm() < 1e-12);

    // Explicitly orthogonalise a non-rigid field, then add a rigid one back.
    let mut w = VectorField::from_fn(g, |x, y| [x * x * y, (3.0 * x).sin() - y * y]);
    for f in &b.fields {
        let c = f.dot(&w);
        w.axpy(-c, f);
    }
    let u = w.add(&r);
    let (pi, res) = project_rigid(&b, &u).unwrap();
    assert!(pi.sub(&r).max_norm() < 1e-10);
    assert!(res.sub(&w).max_norm() < 1e-10);
    for f in &b.fields {
        assert!(f.dot(&res).abs() < 1e-10);
    }
    let (pi2, _) = project_rigid(&b, &pi).unwrap();
    assert!(pi2.sub(&pi).max_norm() < 1e-13);
    assert!(project_rigid(&b, &VectorField::zeros(GridDomain::unit_square(5).unwrap())).is_err());
}

#[test]
fn lp_stability() {
    let g = GridDomain::unit_square(10).unwrap();
    let b = rigid_basis(g);
    let u = VectorField::from_fn(g, |x, y| [(x - y).exp(), x * y]);
    // In L2 the projection is orthogonal.
    assert!(lp_stability_ratio(&b, &u, 2.0).unwrap() <= 1.0 + 1e-12);
    for p in [1.0, 1.5, 4.0] {
        let r = lp_stability_ratio(&b, &u, p).unwrap();
        assert!(r.is_finite() && r > 0.0);
    }
    assert_eq!(lp_stability_ratio(&b, &VectorField::zeros(g), 2.0).unwrap(), 0.0);
}

#[test]
fn korn_quadratic_shear() {
    let g = GridDomain::unit_square(16).unwrap();
    let b = rigid_basis(g);
    let u = VectorField::from_fn(g, |_, y| [0.5 * y * y, 0.0]);
    let e = sym_gradient(&u);
    // Only the off-diagonal entry survives.
    assert!(e.values.iter().all(|s| s.xx.abs() < 1e-14 && s.yy.abs() < 1e-14));
    let k = korn_poincare_check(&b, &u, 1.0, 2.0).unwrap();
    assert!(k.c_q.is_finite() && k.c_p.is_finite() && k.c_q > 0.0 && k.c_p > 0.0);
    let g32 = GridDomain::unit_square(32).unwrap();
    let u32 = VectorField::from_fn(g32, |_, y| [0.5 * y * y, 0.0]);
    let fine = korn_poincare_check(&rigid_basis(g32), &u32, 1.0, 2.0).unwrap();
    assert!((fine.c_p / k.c_p - 1.0).abs() < 0.1 && (fine.c_q / k.c_q - 1.0).abs() < 0.1);
}

#[test]
fn korn_invariances() {
    let g = GridDomain::unit_square(12).unwrap();
    let b = rigid_basis(g);
    let u = VectorField::from_fn(g, |x, y| [(2.0 * y).sin() * x, x * x - y]);
    let k = korn_poincare_check(&b, &u, 1.5, 3.0).unwrap();
    let k2 = korn_poincare_check(&b, &u.scaled(4.2), 1.5, 3.0).unwrap();
    assert!((k.c_q - k2.c_q).abs() < 1e-12 * k.c_q && (k.c_p - k2.c_p).abs() < 1e-12 * k.c_p);
    let (_, w) = project_rigid(&b, &u).unwrap();
    let kw = korn_poincare_check(&b, &w, 1.5, 3.0).unwrap();
    let kr = korn_poincare_check(&b, &w.add(&rigid(g, 2.0, -1.0, 0.5)), 1.5, 3.0).unwrap();
    assert!((kw.c_q - kr.c_q).abs() < 1e-10 * kw.c_q && (kw.c_p - kr.c_p).abs() < 1e-10 * kw.c_p);
    // The same rigid part serves both quotients.
    assert!(kr.rigid_part.sub(&rigid(g, 2.0, -1.0, 0.5)).max_norm() < 1e-10);
}

#[test]
fn korn_rejects() {
    let g = GridDomain::unit_square(6).unwrap();
    let b = rigid_basis(g);
    assert!(matches!(korn_poincare_check(&b, &rigid(g, 1.0, 2.0, 3.0), 1.0, 2.0), Err(Error::RigidInput)));
    let u = VectorField::from_fn(g, |x, y| [x * y, 0.0]);
    assert!(korn_poincare_check(&b, &u, 2.0, 1.5).is_err());
    assert!(korn_poincare_check(&b, &u, 1.0, 1.0).is_err());
}

fn ensemble_sup(n: usize, seed: u64) -> f64 {
    let g = GridDomain::unit_square(n).unwrap();
    let b = rigid_basis(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sup: f64 = 0.0;
    for _ in 0..12 {
        let c: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let k: Vec<f64> = (0..3).map(|_| rng.gen_range(0.5..3.0)).collect();
        let u = VectorField::from_fn(g, |x, y| {
            [c[0] * (k[0] * x + c[1] * y).sin() + c[2] * x * y, c[3] * (k[1] * y).cos() + c[4] * (k[2] * x * y).sin() + c[5] * x * x]
        });
        let r = korn_poincare_check(&b, &u, 1.0, 2.0).unwrap();
        sup = sup.max(r.c_p).max(r.c_q);
    }
    sup
}

#[test]
fn korn_constant_is_grid_stable() {
    let coarse = ensemble_sup(8, 11);
    let fine = ensemble_sup(64, 11);
    assert!(fine < 2.0 * coarse, "{coarse} -> {fine}");
}

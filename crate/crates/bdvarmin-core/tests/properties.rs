use bdvarmin_core::duality::{dual_value, lip_dual_norm, DivFreeProjector, DualCandidate, DIV_TOL};
use bdvarmin_core::grid::{divergence, sym_gradient, Sym2, SymTensorField};
use bdvarmin_core::lp::DenseSimplex;
use bdvarmin_core::rigid::{project_rigid, rigid_basis};
use bdvarmin_core::solver::energy_f;
use bdvarmin_core::spaces::{gagliardo, logconvexity_check, SampledFunction};
use bdvarmin_core::{GridDomain, Integrand, VectorField};
use proptest::prelude::*;

const N: usize = 6;

fn grid() -> GridDomain {
    GridDomain::unit_square(N).unwrap()
}

fn nodal() -> impl Strategy<Value = VectorField> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), N * N)
        .prop_map(|v| VectorField::new(grid(), v.into_iter().map(|(a, b)| [a, b]).collect()).unwrap())
}

fn cells() -> impl Strategy<Value = SymTensorField> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), (N - 1) * (N - 1))
        .prop_map(|v| SymTensorField::new(grid(), v.into_iter().map(|(a, b, c)| Sym2::new(a, b, c)).collect()).unwrap())
}

fn sym() -> impl Strategy<Value = Sym2> {
    (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0).prop_map(|(a, b, c)| Sym2::new(a, b, c))
}

fn interior(mut v: VectorField) -> VectorField {
    let g = v.grid;
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            if g.is_boundary(i, j) {
                v.values[g.node(i, j)] = [0.0, 0.0];
            }
        }
    }
    v
}

fn integrands() -> [Integrand; 3] {
    [Integrand::area(), Integrand::phi_mu(1.5).unwrap(), Integrand::phi_mu(3.0).unwrap()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn divergence_is_negative_adjoint(s in cells(), phi in nodal()) {
        let phi = interior(phi);
        let h2 = grid().h() * grid().h();
        let lhs = s.dot(&sym_gradient(&phi)) * h2;
        let rhs = -divergence(&s).dot(&phi) * h2;
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn rigid_fields_have_no_strain(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
        let v = VectorField::from_fn(grid(), |x, y| [a - c * y, b + c * x]);
        prop_assert!(sym_gradient(&v).max_norm() < 1e-13);
    }

    #[test]
    fn fenchel_young_inequality(xi in sym(), eta in sym()) {
        for f in integrands() {
            let eta = eta * (0.99 * f.recession() / eta.norm().max(f.recession()));
            let excess = f.eval(&xi) + f.conjugate_fn(&eta) - eta.dot(&xi);
            prop_assert!(excess >= -1e-9, "{} {excess}", f.name());
        }
    }

    #[test]
    fn weak_duality(s in cells(), w in nodal(), u0 in nodal()) {
        let p = DivFreeProjector::new(grid()).unwrap();
        let w = u0.add(&interior(w.sub(&u0)));
        for f in integrands() {
            let chi = p.project(&s).unwrap();
            let m = chi.max_norm();
            let chi = if m > 0.0 { chi.scaled(0.99 * f.recession() / m) } else { chi };
            let cand = DualCandidate::new(chi, &f, DIV_TOL);
            prop_assert!(cand.feasible);
            prop_assert!(dual_value(&cand, &u0, &f) <= energy_f(&f, &w) + 1e-9);
        }
    }

    #[test]
    fn projection_idempotent_and_symmetric(a in cells(), b in cells()) {
        let p = DivFreeProjector::new(grid()).unwrap();
        let pa = p.project(&a).unwrap();
        let pb = p.project(&b).unwrap();
        prop_assert!(p.project(&pa).unwrap().sub(&pa).max_norm() < 1e-10);
        prop_assert!((pa.dot(&b) - a.dot(&pb)).abs() < 1e-10);
    }

    #[test]
    fn rigid_residual_is_orthogonal(u in nodal()) {
        let basis = rigid_basis(grid());
        let (pi, res) = project_rigid(&basis, &u).unwrap();
        for f in &basis.fields {
            prop_assert!(f.dot(&res).abs() < 1e-10);
        }
        let (pi2, _) = project_rigid(&basis, &pi).unwrap();
        prop_assert!(pi2.sub(&pi).max_norm() < 1e-12);
    }

    #[test]
    fn gagliardo_scaling(u in nodal(), lam in -4.0f64..4.0, s in 0.1f64..0.9, p in 1.0f64..3.0) {
        let f = SampledFunction::from_vector_field(&u);
        let a = gagliardo(&f, s, p).unwrap();
        let b = gagliardo(&f.scaled(lam), s, p).unwrap();
        prop_assert!((b - lam.abs() * a).abs() <= 1e-10 * (1.0 + b));
    }

    #[test]
    fn logconvexity_holds(u in nodal(), s in 0.05f64..0.95, t in 0.05f64..0.95, lam in 0.05f64..0.95) {
        let f = SampledFunction::from_vector_field(&u);
        prop_assert!(logconvexity_check(&f, s, t, lam).unwrap() >= -1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lip_norm_is_a_seminorm(a in nodal(), b in nodal(), lam in -3.0f64..3.0) {
        let g = grid();
        let lp = DenseSimplex::default();
        let na = lip_dual_norm(g, &a.values, &lp).unwrap();
        let nb = lip_dual_norm(g, &b.values, &lp).unwrap();
        let nab = lip_dual_norm(g, &a.add(&b).values, &lp).unwrap();
        let nl = lip_dual_norm(g, &a.scaled(lam).values, &lp).unwrap();
        prop_assert!(nab <= na + nb + 1e-9);
        prop_assert!((nl - lam.abs() * na).abs() <= 1e-9 * (1.0 + nl));
    }
}

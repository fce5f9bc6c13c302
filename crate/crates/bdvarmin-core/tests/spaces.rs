use bdvarmin_core::grid::Sym2;
use bdvarmin_core::lp::DenseSimplex;
use bdvarmin_core::spaces::*;
use bdvarmin_core::{GridDomain, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn random_field(n: usize, seed: u64) -> SampledFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    SampledFunction::new(n, n, 1.0 / (n - 1) as f64, 1, vals).unwrap()
}

#[test]
fn constants_vanish_everywhere() {
    let g = GridDomain::unit_square(9).unwrap();
    let c = SampledFunction::scalar_2d(g, |_, _| 2.5);
    assert_eq!(gagliardo(&c, 0.5, 2.0).unwrap(), 0.0);
    assert_eq!(besov_nikolskii(&c, 0.5, 2.0, f64::INFINITY).unwrap(), 0.0);
    assert_eq!(besov_nikolskii(&c, 0.3, 1.0, 2.0).unwrap(), 0.0);
    assert!(bmo_norm(&c) < 1e-15);
    assert!(calderon_seminorm(&c, 0.5, 2.0).unwrap() < 1e-15);
    assert!(doro_seminorm(&c, 0.5, 2.0).unwrap() < 1e-15);
    assert_eq!(doro_ratio(&c, 0.5, 2.0).unwrap(), 0.0);
    assert_eq!(w11_seminorm(&c), 0.0);
    assert!(frac_sharp_maximal(&c, 0.5).values.iter().all(|v| *v < 1e-15));
    assert!(logconvexity_check(&c, 0.25, 0.75, 0.5).unwrap().abs() < 1e-15);
}

#[test]
fn gagliardo_matches_double_sum() {
    let ind = SampledFunction::line(16, 0.0, 1.0 / 15.0, |x| if x < 0.5 { 1.0 } else { 0.0 }).unwrap();
    for (s, p) in [(0.5, 2.0), (0.3, 1.0), (0.8, 3.5)] {
        let a = gagliardo(&ind, s, p).unwrap();
        let b = gagliardo_brute_force(&ind, s, p);
        assert!((a - b).abs() <= 1e-12 * b, "{a} {b}");
    }
    let g = GridDomain::unit_square(7).unwrap();
    let vf = SampledFunction::from_vector_field(&VectorField::from_fn(g, |x, y| [x * y, (4.0 * x).sin()]));
    let a = gagliardo(&vf, 0.4, 1.5).unwrap();
    assert!((a - gagliardo_brute_force(&vf, 0.4, 1.5)).abs() <= 1e-12 * a);
    assert!(gagliardo(&ind, 1.0, 2.0).is_err() && gagliardo(&ind, 0.5, 0.5).is_err());
}

#[test]
fn gagliardo_is_one_homogeneous() {
    let u = random_field(8, 3);
    for (s, p) in [(0.5, 1.0), (0.5, 2.0), (0.2, 3.0)] {
        let a = gagliardo(&u, s, p).unwrap();
        let b = gagliardo(&u.scaled(-3.0), s, p).unwrap();
        assert!((b - 3.0 * a).abs() <= 1e-12 * b);
    }
}

#[test]
fn sign_function_diverges_slowly() {
    // gagliardo^2 of sgn on (-1, 1) grows like log n.
    let vals: Vec<f64> = [64, 128, 256, 512]
        .iter()
        .map(|&n| {
            let u = SampledFunction::line(n, -1.0, 2.0 / (n - 1) as f64, |x| x.signum()).unwrap();
            gagliardo(&u, 0.5, 2.0).unwrap().powi(2)
        })
        .collect();
    let steps: Vec<f64> = vals.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(steps.iter().all(|d| *d > 0.5), "{vals:?}");
    let (lo, hi) = steps.iter().fold((f64::INFINITY, 0.0f64), |(a, b), d| (a.min(*d), b.max(*d)));
    assert!(hi / lo < 1.2, "{steps:?}");
}

#[test]
fn besov_of_lipschitz_fields() {
    let vals: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| {
            let g = GridDomain::unit_square(n).unwrap();
            let u = SampledFunction::scalar_2d(g, |x, y| (2.0 * x).sin() + 0.5 * y);
            // Lipschitz constant 2 per axis on the unit square.
            let b = besov_nikolskii(&u, 0.5, 2.0, f64::INFINITY).unwrap();
            assert!(b <= 2.0, "{b}");
            b
        })
        .collect();
    assert!((vals[2] / vals[0] - 1.0).abs() < 0.1, "{vals:?}");
}

#[test]
fn ramp_sequence() {
    let rows = bbm_experiment(&[2.0, 4.0, 8.0, 16.0, 32.0, 64.0], 2049).unwrap();
    for r in &rows {
        assert_eq!(r.max_abs, 1.0);
        assert!((r.w11 - 2.0).abs() < 1e-12);
    }
    for w in rows.windows(2) {
        assert!(w[1].gagliardo_sq > w[0].gagliardo_sq);
    }
    let b: Vec<f64> = rows.iter().map(|r| r.besov).collect();
    let (lo, hi) = b.iter().fold((f64::INFINITY, 0.0f64), |(a, c), v| (a.min(*v), c.max(*v)));
    assert!(hi / lo < 1.5, "{b:?}");
    assert!(growth_per_doubling(&rows) >= 0.5 * std::f64::consts::LN_2);
}

#[test]
fn sharp_maximal_matches_enumeration() {
    for n in [5, 8] {
        let g = GridDomain::unit_square(n).unwrap();
        for u in [
            SampledFunction::scalar_2d(g, |x, _| x),
            SampledFunction::from_vector_field(&VectorField::from_fn(g, |x, y| [x * x, (3.0 * y).cos()])),
        ] {
            for alpha in [0.0, 0.3, 1.0] {
                let fast = frac_sharp_maximal(&u, alpha);
                let slow = frac_sharp_maximal_brute_force(&u, alpha);
                for (a, b) in fast.values.iter().zip(&slow) {
                    assert!((a - b).abs() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn logconvexity_margins() {
    for seed in 0..5 {
        let u = random_field(16, seed);
        assert!(logconvexity_check(&u, 0.25, 0.75, 0.5).unwrap() >= -1e-12);
        assert!(logconvexity_check(&u, 0.1, 0.6, 0.3).unwrap() >= -1e-12);
    }
    let mut vals = vec![0.0; 256];
    let k = 7 + 8 * 16;
    vals[k] = 1.0;
    let spike = SampledFunction::new(16, 16, 1.0 / 15.0, 1, vals).unwrap();
    let m = logconvexity_check(&spike, 0.25, 0.75, 0.5).unwrap();
    assert!(m >= -1e-12);
    let ms = frac_sharp_maximal(&spike, 0.25).values[k];
    let mt = frac_sharp_maximal(&spike, 0.75).values[k];
    let mm = frac_sharp_maximal(&spike, 0.5).values[k];
    assert!(((ms * mt).sqrt() - mm).abs() < 1e-12);
    assert!(logconvexity_check(&spike, 0.0, 0.5, 0.5).is_err());
}

#[test]
fn calderon_single_spike() {
    let mut vals = vec![0.0; 256];
    vals[5 + 9 * 16] = 1.0;
    let u = SampledFunction::new(16, 16, 1.0 / 15.0, 1, vals).unwrap();
    for (alpha, p) in [(0.5, 2.0), (0.25, 1.0), (1.0, 3.0)] {
        let brute = frac_sharp_maximal_brute_force(&u, alpha);
        let want = (brute.iter().map(|v| v.powf(p)).sum::<f64>() * u.cell_volume()).powf(1.0 / p);
        let got = calderon_seminorm(&u, alpha, p).unwrap();
        assert!((got - want).abs() <= 1e-12 * want);
    }
}

// calderon <= besov(p, p) and besov(p, inf) <= 4 calderon on the corpus.
#[test]
fn calderon_sandwich() {
    for n in [9, 17, 33] {
        for (name, f) in smooth_corpus(n).unwrap() {
            for (a, p) in [(0.5, 2.0), (0.25, 1.5)] {
                let c = calderon_seminorm(&f, a, p).unwrap();
                let bpp = besov_nikolskii(&f, a, p, p).unwrap();
                let binf = besov_nikolskii(&f, a, p, f64::INFINITY).unwrap();
                assert!(c <= bpp && binf <= 4.0 * c, "{name} n={n}: {c} {bpp} {binf}");
            }
        }
    }
}

const DORO_BAND: f64 = 5.0;

#[test]
fn doro_band_on_corpus() {
    for (s, p) in [(0.5, 2.0), (0.25, 1.5)] {
        for n in [16, 32] {
            for (name, f) in smooth_corpus(n).unwrap() {
                let r = doro_ratio(&f, s, p).unwrap();
                assert!((1.0 / DORO_BAND..=DORO_BAND).contains(&r), "{name} n={n}: {r}");
            }
        }
    }
    assert!(doro_seminorm(&random_field(6, 1), 1.0, 2.0).is_err());
}

#[test]
fn centred_reduction() {
    for seed in 0..3 {
        let u = random_field(12, seed);
        for alpha in [0.0, 0.5, 1.0] {
            let r = doro_reduction_check(&u, alpha).unwrap();
            assert!(r.margin >= 0.0 && r.max_ratio <= r.constant, "{r:?}");
        }
    }
}

#[test]
fn smith_recovers_band_limited_fields() {
    let n = 32;
    let g = PeriodicGrid::new(n, 1.0 / n as f64).unwrap();
    let mut u = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let (x, y) = (i as f64 / n as f64, j as f64 / n as f64);
            u.push([(TAU * x).sin() * (2.0 * TAU * y).cos() + 0.3 * (3.0 * TAU * y).sin(), (TAU * (x + y)).cos() - 0.2 * (5.0 * TAU * x).sin()]);
        }
    }
    let want = strip_kernel_modes(g, &u);
    let e = periodic_sym_gradient(g, &u).unwrap();
    let r = smith_reconstruct(g, &e).unwrap();
    assert!(r.residual < 1e-12);
    let num: f64 = r.u.iter().zip(&want).map(|(a, b)| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sum();
    let den: f64 = want.iter().map(|b| b[0] * b[0] + b[1] * b[1]).sum();
    assert!((num / den).sqrt() <= 1e-8);

    let zero = smith_reconstruct(g, &vec![Sym2::ZERO; n * n]).unwrap();
    assert!(zero.u.iter().all(|v| v == &[0.0, 0.0]));
    let shift = periodic_sym_gradient(g, &vec![[0.7, -0.1]; n * n]).unwrap();
    assert!(smith_reconstruct(g, &shift).unwrap().u.iter().all(|v| v[0].abs() < 1e-13 && v[1].abs() < 1e-13));
    // A strain that is no symmetric gradient leaves a misfit.
    let bad: Vec<Sym2> = (0..n * n).map(|k| Sym2::new(if k % 3 == 0 { 1.0 } else { 0.0 }, 0.0, 0.0)).collect();
    assert!(smith_reconstruct(g, &bad).unwrap().residual > 1e-3);
}

#[test]
fn ornstein_small_grid() {
    let r = ornstein_experiment(GridDomain::unit_square(8).unwrap(), &DenseSimplex::default(), OrnsteinOptions::default()).unwrap();
    assert!(r.ratio > 1.0);
    assert!((ornstein_quotient(&r.maximiser) - r.ratio).abs() < 1e-6 * r.ratio);
    assert!(ornstein_experiment(GridDomain::unit_square(5).unwrap(), &DenseSimplex::default(), OrnsteinOptions::default()).is_err());
}

#[test]
fn exponents_by_hand() {
    let two = exponent_report(2, 1.2).unwrap();
    assert!((two.q_max - 0.8 * 4.0 / 3.0).abs() < 1e-15);
    assert!((two.w11_threshold - 1.5).abs() < 1e-15);
    assert!((two.viscosity_threshold - 1.75).abs() < 1e-15);
    assert!((two.second_derivative_threshold - 8.0 / 7.0).abs() < 1e-15);
    assert!((two.higher_integrability_threshold - 4.0 / 3.0).abs() < 1e-15);
    let three = exponent_report(3, 1.5).unwrap();
    assert!((three.q_max - 0.5 * 6.0 / 5.0).abs() < 1e-15);
    assert!((three.w11_threshold - 4.0 / 3.0).abs() < 1e-15);
    assert!((three.viscosity_threshold - 1.5).abs() < 1e-15);
    assert!((three.second_derivative_threshold - 12.0 / 11.0).abs() < 1e-15);
    assert!((three.higher_integrability_threshold - 1.2).abs() < 1e-15);
    assert!(exponent_report(2, 1.0).is_err());
    assert!((bd_bmo_eps_bound(2, 2.0) - 1.0 / 6.0).abs() < 1e-15);
}

#[test]
fn constant_strain_energies_vanish() {
    let g = GridDomain::unit_square(10).unwrap();
    let v = VectorField::from_fn(g, |x, y| [0.3 * x - 0.2 * y, 0.5 * y + 0.1 * x]);
    let rho = cutoff_window(g, 2);
    for axis in 0..2 {
        assert!(weighted_dq_energy(&v, 1.5, 1.5, 0.5, axis, 2, &rho).unwrap().abs() < 1e-25);
        assert!(second_order_energy(&v, 1.5, axis, 2, &rho).unwrap().abs() < 1e-25);
    }
    assert!(weighted_dq_energy(&v, 1.5, 1.5, 0.5, 0, 9, &rho).is_err());
    assert!(weighted_dq_energy(&v, 1.5, 1.5, 1.0, 0, 1, &rho).is_err());
    assert!(weighted_dq_energy(&v, 1.5, 2.0, 0.5, 0, 1, &rho).is_err());
    assert!(second_order_energy(&v, 1.5, 0, 1, &rho[1..]).is_err());
}

#[test]
fn bd_bmo_experiment() {
    let g = GridDomain::unit_square(12).unwrap();
    let c = SampledFunction::from_vector_field(&VectorField::from_fn(g, |_, _| [1.0, 2.0]));
    let r = bd_bmo_embedding_experiment(&c, 2.0, 0.1).unwrap();
    assert!(r.total_variation == 0.0 && r.bmo < 1e-15 && r.gagliardo == 0.0 && r.ratio == 0.0);
    assert!(bd_bmo_embedding_experiment(&c, 2.0, 0.2).is_err());
    assert!(bd_bmo_embedding_experiment(&c, 1.0, 0.1).is_err());
    // Critical exponent: the ratio keeps growing along the ramps.
    let ratios: Vec<f64> = [2.0, 8.0, 32.0, 128.0]
        .iter()
        .map(|&k| bd_bmo_embedding_experiment(&bbm_field(k, 1025).unwrap(), 2.0, 0.0).unwrap().ratio)
        .collect();
    assert!(ratios.windows(2).all(|w| w[1] > w[0] * 1.1), "{ratios:?}");
    // Subcritical, smooth fields: a fixed band across resolutions.
    for n in [9, 17, 33] {
        for (name, f) in smooth_vector_corpus(n).unwrap() {
            let r = bd_bmo_embedding_experiment(&f, 2.0, 0.1).unwrap();
            assert!(!r.critical && r.ratio > 0.5 && r.ratio < 2.0, "{name} n={n}: {}", r.ratio);
        }
    }
}

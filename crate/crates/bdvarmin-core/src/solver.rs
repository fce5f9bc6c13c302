//! Damped Newton minimisation of the stabilised energies
//! `F_j[v] = sum_cells (f(e(v)) + |e(v)|^2/(2j)) h^2` over `u0 + (zero on the
//! boundary)`, viscosity sequences and their monitors.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{divergence, sym_gradient, GridDomain, Sym2, SymTensorField, VectorField};
use crate::integrands::{Integrand, PerturbedIntegrand};
use crate::linalg::{assemble_stiffness, DofMap};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Stop once the Euler-Lagrange residual drops below this.
    pub tol: f64,
    pub max_iters: usize,
    /// Seed of the interior perturbation of the initial guess.
    pub seed: u64,
    /// Amplitude of that perturbation (0 starts from `u0`).
    pub perturbation: f64,
    pub hess_floor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-10, max_iters: 200, seed: 0, perturbation: 1e-2, hess_floor: 1e-12 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViscositySolution {
    /// Stabilisation index; 0 marks the unstabilised problem.
    pub j: u64,
    pub v: VectorField,
    pub energy_fj: f64,
    pub energy_f: f64,
    pub el_residual: f64,
    pub eps_l1: f64,
    pub iterations: usize,
    /// Energy after every accepted step, starting with the initial guess.
    pub energy_trace: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub j_values: Vec<u64>,
    pub tol: f64,
    pub max_iters: usize,
}

impl Schedule {
    pub fn new(j_values: Vec<u64>, tol: f64, max_iters: usize) -> Result<Self> {
        if j_values.is_empty() || j_values[0] == 0 || j_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid("j_values must be positive and strictly increasing".into()));
        }
        if !(tol > 0.0) {
            return Err(Error::Param { name: "tol", value: tol, range: "(0, inf)" });
        }
        Ok(Schedule { j_values, tol, max_iters })
    }

    /// `1, 2, 4, ..., 2^k`.
    pub fn dyadic(k: u32, tol: f64) -> Self {
        Schedule { j_values: (0..=k).map(|i| 1u64 << i).collect(), tol, max_iters: 200 }
    }
}

fn stabilised(f: &Integrand, j: u64) -> PerturbedIntegrand {
    if j == 0 {
        PerturbedIntegrand { base: f.clone(), quad_weight: 0.0, ekeland: false }
    } else {
        PerturbedIntegrand { base: f.clone(), quad_weight: 0.5 / j as f64, ekeland: false }
    }
}

fn energy(fp: &PerturbedIntegrand, eps: &SymTensorField) -> f64 {
    let h2 = eps.grid.h() * eps.grid.h();
    eps.values.iter().map(|e| fp.eval(e)).sum::<f64>() * h2
}

/// `sum_cells f(e(v)) h^2`.
pub fn energy_f(f: &Integrand, v: &VectorField) -> f64 {
    let eps = sym_gradient(v);
    let h2 = v.grid.h() * v.grid.h();
    eps.values.iter().map(|e| f.eval(e)).sum::<f64>() * h2
}

/// `sum_cells (f(e(v)) + |e(v)|^2/(2j)) h^2`.
pub fn energy_fj(f: &Integrand, j: u64, v: &VectorField) -> f64 {
    energy(&stabilised(f, j), &sym_gradient(v))
}

fn residual_of(stress: &SymTensorField) -> f64 {
    crate::grid::interior_div_norm(stress)
}

/// Discrete L2 norm over interior nodes of `div f_j'(e(v))` (`j = 0`: of `f'`).
pub fn el_residual(v: &VectorField, f: &Integrand, j: u64) -> f64 {
    let fp = stabilised(f, j);
    let eps = sym_gradient(v);
    residual_of(&eps.map(|e| fp.grad(&e)))
}

/// `tau = f'(e(v))`.
pub fn tau_field(f: &Integrand, v: &VectorField) -> SymTensorField {
    sym_gradient(v).map(|e| f.grad(&e))
}

/// `sigma_j = f_j'(e(v)) = tau + e(v)/j`.
pub fn sigma_field(f: &Integrand, j: u64, v: &VectorField) -> SymTensorField {
    let fp = stabilised(f, j);
    sym_gradient(v).map(|e| fp.grad(&e))
}

pub fn initial_guess(u0: &VectorField, opts: &SolverOptions) -> VectorField {
    let mut v = u0.clone();
    if opts.perturbation != 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let g = u0.grid;
        for j in 1..g.ny() - 1 {
            for i in 1..g.nx() - 1 {
                let n = g.node(i, j);
                v.values[n][0] += opts.perturbation * crate::math::normal(&mut rng);
                v.values[n][1] += opts.perturbation * crate::math::normal(&mut rng);
            }
        }
    }
    v
}

/// Newton iteration for `F_j` started from `init` (boundary values of `u0`
/// are imposed on it). Returns the last iterate whether or not it converged;
/// check `el_residual` against `opts.tol`.
pub fn newton_solve(f: &Integrand, j: u64, u0: &VectorField, init: &VectorField, opts: &SolverOptions) -> ViscositySolution {
    let g: GridDomain = u0.grid;
    let fp = stabilised(f, j);
    let dofs = DofMap::interior(g);
    let mut v = init.clone();
    for jj in 0..g.ny() {
        for ii in 0..g.nx() {
            if g.is_boundary(ii, jj) {
                let n = g.node(ii, jj);
                v.values[n] = u0.values[n];
            }
        }
    }
    let h2 = g.h() * g.h();
    let mut eps = sym_gradient(&v);
    let mut e_cur = energy(&fp, &eps);
    let mut trace = vec![e_cur];
    let mut iters = 0;
    let mut residual;
    loop {
        let stress = eps.map(|e| fp.grad(&e));
        let div = divergence(&stress);
        residual = residual_of(&stress);
        if residual <= opts.tol || iters >= opts.max_iters || dofs.n_dofs == 0 {
            break;
        }
        let mut grad = vec![0.0; dofs.n_dofs];
        for (n, d) in dofs.node_dof.iter().enumerate() {
            if let Some(d) = *d {
                grad[d] = -h2 * div.values[n][0];
                grad[d + 1] = -h2 * div.values[n][1];
            }
        }
        let k = assemble_stiffness(&dofs, |c| fp.hess(&eps.values[c]).add_identity(opts.hess_floor).0);
        let chol = match k.cholesky() {
            Ok(c) => c,
            Err(_) => break,
        };
        let mut step = chol.solve(&grad);
        for s in step.iter_mut() {
            *s = -*s;
        }
        let slope: f64 = grad.iter().zip(&step).map(|(a, b)| a * b).sum();
        let slack = 1e-14 * e_cur.abs().max(1.0);
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-12 {
            let mut trial = v.clone();
            for (n, d) in dofs.node_dof.iter().enumerate() {
                if let Some(d) = *d {
                    trial.values[n][0] += t * step[d];
                    trial.values[n][1] += t * step[d + 1];
                }
            }
            let te = sym_gradient(&trial);
            let e_new = energy(&fp, &te);
            if e_new <= e_cur + 1e-4 * t * slope + slack {
                accepted = Some((trial, te, e_new));
                break;
            }
            t *= 0.5;
        }
        let Some((nv, ne, en)) = accepted else { break };
        v = nv;
        eps = ne;
        e_cur = en;
        trace.push(e_cur);
        iters += 1;
    }
    let energy_f = eps.values.iter().map(|e| f.eval(e)).sum::<f64>() * h2;
    ViscositySolution {
        j,
        eps_l1: eps.l1_norm(),
        v,
        energy_fj: e_cur,
        energy_f,
        el_residual: residual,
        iterations: iters,
        energy_trace: trace,
    }
}

fn finish(sol: ViscositySolution, opts: &SolverOptions) -> Result<ViscositySolution> {
    if sol.el_residual <= opts.tol {
        Ok(sol)
    } else {
        Err(Error::NoConvergence { iters: sol.iterations, residual: sol.el_residual, last: Some(Box::new(sol.v)) })
    }
}

/// Minimiser of `F_j` in `u0 + (zero on the boundary)`.
pub fn minimize_fj(f: &Integrand, j: u64, u0: &VectorField, opts: &SolverOptions) -> Result<ViscositySolution> {
    if j == 0 {
        return Err(Error::Param { name: "j", value: 0.0, range: "[1, inf)" });
    }
    let init = initial_guess(u0, opts);
    finish(newton_solve(f, j, u0, &init, opts), opts)
}

/// Minimiser of the unstabilised `F` (needs a strictly convex profile).
pub fn minimize_plain(f: &Integrand, u0: &VectorField, opts: &SolverOptions) -> Result<ViscositySolution> {
    let init = initial_guess(u0, opts);
    finish(newton_solve(f, 0, u0, &init, opts), opts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SequenceMonitors {
    /// Largest `F_{j'}[v_{j'}] - F_j[v_j]` over consecutive pairs.
    pub max_energy_increase: f64,
    pub monotone: bool,
    /// `(F_{j_1}[v_{j_1}] + c2 |Omega|) / c0`.
    pub coercivity_bound: f64,
    pub max_eps_l1: f64,
    pub coercive: bool,
    /// `max_j sup |tau_j|` against `c_inf`.
    pub max_tau: f64,
    pub tau_bounded: bool,
}

impl SequenceMonitors {
    pub fn all_pass(&self) -> bool {
        self.monotone && self.coercive && self.tau_bounded
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViscositySequence {
    pub solutions: Vec<ViscositySolution>,
    /// `sigma_j = f_j'(e(v_j))` per solution.
    pub sigmas: Vec<SymTensorField>,
    pub monitors: SequenceMonitors,
}

/// Solves `F_j` along the schedule, warm-starting each solve from the
/// previous minimiser, and evaluates the monotonicity, coercivity and
/// stress-bound monitors.
pub fn run_viscosity_sequence(f: &Integrand, schedule: &Schedule, u0: &VectorField, opts: &SolverOptions) -> Result<ViscositySequence> {
    let opts = SolverOptions { tol: schedule.tol, max_iters: schedule.max_iters, ..*opts };
    let mut solutions: Vec<ViscositySolution> = Vec::with_capacity(schedule.j_values.len());
    for &j in &schedule.j_values {
        let init = match solutions.last() {
            Some(prev) => prev.v.clone(),
            None => initial_guess(u0, &opts),
        };
        solutions.push(finish(newton_solve(f, j, u0, &init, &opts), &opts)?);
    }
    let sigmas = solutions.iter().map(|s| sigma_field(f, s.j, &s.v)).collect();
    let monitors = monitors(f, &solutions);
    Ok(ViscositySequence { solutions, sigmas, monitors })
}

pub fn monitors(f: &Integrand, solutions: &[ViscositySolution]) -> SequenceMonitors {
    let mut max_inc = f64::NEG_INFINITY;
    for w in solutions.windows(2) {
        max_inc = max_inc.max(w[1].energy_fj - w[0].energy_fj);
    }
    if solutions.len() < 2 {
        max_inc = 0.0;
    }
    let gc = f.growth_constants();
    let area = solutions.first().map(|s| s.v.grid.area()).unwrap_or(0.0);
    let first = solutions.first().map(|s| s.energy_fj).unwrap_or(0.0);
    let bound = (first + gc.c2 * area) / gc.c0;
    let max_eps = solutions.iter().map(|s| s.eps_l1).fold(0.0, f64::max);
    let max_tau = solutions.iter().map(|s| tau_field(f, &s.v).max_norm()).fold(0.0, f64::max);
    let cinf = f.recession();
    SequenceMonitors {
        max_energy_increase: max_inc,
        monotone: max_inc <= 1e-10,
        coercivity_bound: bound,
        max_eps_l1: max_eps,
        coercive: max_eps <= bound,
        max_tau,
        tau_bounded: max_tau <= cinf * (1.0 + 1e-12),
    }
}

/// Cell sub-rectangle `[i0, i1) x [j0, j1)` of nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeRect {
    pub i0: usize,
    pub i1: usize,
    pub j0: usize,
    pub j1: usize,
}

/// `max_j max_{x in K} M#(v_j)(x)` with cubes centred at `x` inside the grid.
pub fn lbmo_monitor(v_list: &[VectorField], k: NodeRect) -> Result<f64> {
    let mut m: f64 = 0.0;
    for v in v_list {
        let g = v.grid;
        if k.i0 == 0 || k.j0 == 0 || k.i1 >= g.nx() || k.j1 >= g.ny() || k.i0 >= k.i1 || k.j0 >= k.j1 {
            return Err(Error::Invalid("K must be a nonempty rectangle strictly inside the grid".into()));
        }
        let s = crate::spaces::SampledFunction::from_vector_field(v);
        let sharp = crate::spaces::frac_sharp_maximal(&s, 0.0).values;
        for j in k.j0..k.j1 {
            for i in k.i0..k.i1 {
                m = m.max(sharp[i + j * g.nx()]);
            }
        }
    }
    Ok(m)
}

/// Mean of `|e|` over cells, handy for scale-free tolerances.
pub fn mean_strain(v: &VectorField) -> f64 {
    let e = sym_gradient(v);
    e.values.iter().map(Sym2::norm).sum::<f64>() / e.values.len().max(1) as f64
}

/// L1 distance of two strain fields, `sum |e1 - e2| h^2`.
pub fn strain_l1_distance(a: &VectorField, b: &VectorField) -> f64 {
    sym_gradient(a).sub(&sym_gradient(b)).l1_norm()
}

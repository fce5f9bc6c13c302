//! Sparse LP backend over the Clarabel interior-point solver.

use bdvarmin_core::lp::{DenseSimplex, LinearProgram, LpSolution, LpSolver};
use bdvarmin_core::{Error, Result};
use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettingsBuilder, DefaultSolver, IPSolver, NonnegativeConeT, SolverStatus};

#[derive(Clone, Copy, Debug)]
pub struct ClarabelLp {
    pub tol: f64,
    pub max_iter: u32,
}

impl Default for ClarabelLp {
    fn default() -> Self {
        ClarabelLp { tol: 1e-10, max_iter: 400 }
    }
}

impl LpSolver for ClarabelLp {
    fn name(&self) -> &'static str {
        "clarabel"
    }

    fn maximize(&self, lp: &LinearProgram) -> Result<LpSolution> {
        let n = lp.num_vars();
        let (mut ii, mut jj, mut vv) = (Vec::new(), Vec::new(), Vec::new());
        let mut b = Vec::with_capacity(lp.rows.len() + n);
        for (r, row) in lp.rows.iter().enumerate() {
            for &(j, a) in row {
                ii.push(r);
                jj.push(j);
                vv.push(a);
            }
            b.push(lp.rhs[r]);
        }
        let mut m = lp.rows.len();
        for (j, &free) in lp.free.iter().enumerate() {
            if !free {
                ii.push(m);
                jj.push(j);
                vv.push(-1.0);
                b.push(0.0);
                m += 1;
            }
        }
        let a = CscMatrix::new_from_triplets(m, n, ii, jj, vv);
        let p = CscMatrix::<f64>::zeros((n, n));
        let q: Vec<f64> = lp.objective.iter().map(|c| -c).collect();
        let settings = DefaultSettingsBuilder::default()
            .verbose(false)
            .max_iter(self.max_iter)
            .tol_gap_abs(self.tol)
            .tol_gap_rel(self.tol)
            .tol_feas(self.tol)
            .build()
            .map_err(|e| Error::Lp(format!("settings: {e:?}")))?;
        let mut solver = DefaultSolver::new(&p, &q, &a, &b, &[NonnegativeConeT(m)], settings)
            .map_err(|e| Error::Lp(format!("setup: {e:?}")))?;
        solver.solve();
        match solver.solution.status {
            SolverStatus::Solved | SolverStatus::AlmostSolved => {
                let x = solver.solution.x.clone();
                Ok(LpSolution { objective: lp.value(&x), x })
            }
            s => Err(Error::Lp(format!("clarabel status {s:?}"))),
        }
    }
}

/// Dense simplex for small programs, Clarabel otherwise.
pub fn auto_solver(lp_vars: usize) -> Box<dyn LpSolver + Send + Sync> {
    if lp_vars <= 300 {
        Box::new(DenseSimplex::default())
    } else {
        Box::new(ClarabelLp::default())
    }
}

//! The `solve -> dual -> relaxation -> spaces` pipeline behind `experiment`.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Result;
use bdvarmin_core::duality::{duality_gap, dual_value, stress_h1_seminorm, DualCandidate};
use bdvarmin_core::grid::sym_gradient;
use bdvarmin_core::relaxation::{
    boundary_attainment_check, nogap_check, relaxed_functional, uniqueness_check, BoundaryTrace, DiscreteBDField,
};
use bdvarmin_core::rigid::{korn_poincare_check, rigid_basis};
use bdvarmin_core::solver::{lbmo_monitor, minimize_plain, run_viscosity_sequence, tau_field, NodeRect, SolverOptions, ViscositySequence, ViscositySolution};
use bdvarmin_core::spaces::{self, SampledFunction};
use bdvarmin_core::{Integrand, VectorField};

use crate::config::{Diagnostic, ExperimentConfig};
use crate::io::{self, fmt_f64};
use crate::report::DiagnosticsReport;

/// One row of the gap table.
#[derive(Clone, Debug, PartialEq)]
pub struct GapRow {
    /// 0 for the unstabilised minimiser.
    pub j: u64,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub div_residual: f64,
}

/// Gap of `from_stress(stress)` against `F[v]`.
pub fn gap_row(f: &Integrand, u0: &VectorField, sol: &ViscositySolution, stress: &bdvarmin_core::SymTensorField) -> Result<GapRow> {
    let chi = DualCandidate::from_stress(stress, f)?;
    let gap = duality_gap(sol.energy_f, &chi, u0, f)?;
    Ok(GapRow { j: sol.j, primal: sol.energy_f, dual: dual_value(&chi, u0, f), gap, div_residual: chi.div_residual })
}

pub fn write_gap_table(path: &Path, rows: &[GapRow]) -> Result<()> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.j.to_string(), fmt_f64(r.primal), fmt_f64(r.dual), fmt_f64(r.gap), fmt_f64(r.div_residual)])
        .collect();
    io::write_table(io::create(path)?, &["j", "primal", "dual", "gap", "div_residual"], &rows)
}

pub fn write_sequence_table(path: &Path, sols: &[ViscositySolution]) -> Result<()> {
    let rows: Vec<Vec<String>> = sols
        .iter()
        .map(|s| {
            vec![
                s.j.to_string(),
                fmt_f64(s.energy_fj),
                fmt_f64(s.energy_f),
                fmt_f64(s.el_residual),
                fmt_f64(s.eps_l1),
                s.iterations.to_string(),
            ]
        })
        .collect();
    io::write_table(io::create(path)?, &["j", "energy_fj", "energy_f", "el_residual", "eps_l1", "iterations"], &rows)
}

pub fn solution_meta(f: &Integrand, j: u64) -> BTreeMap<String, String> {
    BTreeMap::from([("integrand".to_string(), f.name()), ("j".to_string(), j.to_string())])
}

fn p(k: &str, v: impl ToString) -> (&str, String) {
    (k, v.to_string())
}

fn push_solution(r: &mut DiagnosticsReport, prefix: &str, s: &ViscositySolution) {
    let j = [p("j", s.j)];
    r.push(&format!("{prefix}.energy_fj"), &j, s.energy_fj);
    r.push(&format!("{prefix}.energy_f"), &j, s.energy_f);
    r.push(&format!("{prefix}.el_residual"), &j, s.el_residual);
    r.push(&format!("{prefix}.eps_l1"), &j, s.eps_l1);
    r.push(&format!("{prefix}.iterations"), &j, s.iterations as f64);
}

pub fn push_monitors(r: &mut DiagnosticsReport, seq: &ViscositySequence) {
    let m = &seq.monitors;
    r.push("sequence.max_energy_increase", &[], m.max_energy_increase);
    r.push("sequence.monotone", &[], m.monotone as u8 as f64);
    r.push("sequence.coercivity_bound", &[], m.coercivity_bound);
    r.push("sequence.max_eps_l1", &[], m.max_eps_l1);
    r.push("sequence.coercive", &[], m.coercive as u8 as f64);
    r.push("sequence.max_tau", &[], m.max_tau);
    r.push("sequence.tau_bounded", &[], m.tau_bounded as u8 as f64);
}

/// Runs every configured diagnostic. A failing stage is recorded in
/// `failures` and the later stages still run when their inputs exist.
pub fn run(cfg: &ExperimentConfig) -> Result<DiagnosticsReport> {
    cfg.validate()?;
    let mut rep = DiagnosticsReport::new(cfg.hash());
    if cfg.diagnostics.is_empty() {
        return write_outputs(cfg, rep, None, None, &[]);
    }
    let f = cfg.integrand();
    let u0 = cfg.load_u0()?;
    let g = u0.grid;
    let opts = SolverOptions { tol: cfg.schedule.tol, max_iters: cfg.schedule.max_iters, seed: cfg.seed, ..Default::default() };
    let wants = |d: Diagnostic| cfg.diagnostics.contains(&d);
    let fail = |rep: &mut DiagnosticsReport, d: &str, e: &dyn std::fmt::Display| rep.failures.push(format!("{d}: {e}"));

    let needs_plain = wants(Diagnostic::Solve) || ((wants(Diagnostic::Dual) || wants(Diagnostic::Relax)) && !wants(Diagnostic::Sequence));
    let plain = if needs_plain {
        match minimize_plain(&f, &u0, &opts) {
            Ok(s) => {
                push_solution(&mut rep, "solve", &s);
                Some(s)
            }
            Err(e) => {
                fail(&mut rep, "solve", &e);
                None
            }
        }
    } else {
        None
    };

    let needs_seq = wants(Diagnostic::Sequence) || wants(Diagnostic::Nogap) || wants(Diagnostic::Lbmo);
    let seq = if needs_seq {
        match run_viscosity_sequence(&f, &cfg.schedule(), &u0, &opts) {
            Ok(s) => {
                for sol in &s.solutions {
                    push_solution(&mut rep, "sequence", sol);
                }
                push_monitors(&mut rep, &s);
                Some(s)
            }
            Err(e) => {
                fail(&mut rep, "sequence", &e);
                None
            }
        }
    } else {
        None
    };

    let mut gaps = Vec::new();
    if wants(Diagnostic::Dual) {
        if let Some(s) = &plain {
            match gap_row(&f, &u0, s, &tau_field(&f, &s.v)) {
                Ok(row) => gaps.push(row),
                Err(e) => fail(&mut rep, "dual", &e),
            }
        }
        if let Some(sq) = &seq {
            for (sol, sigma) in sq.solutions.iter().zip(&sq.sigmas) {
                match gap_row(&f, &u0, sol, sigma) {
                    Ok(row) => gaps.push(row),
                    Err(e) => fail(&mut rep, "dual", &e),
                }
            }
            if let Some(last) = sq.sigmas.last() {
                rep.push("dual.stress_h1", &[p("j", sq.solutions.last().unwrap().j)], stress_h1_seminorm(last));
            }
        }
        for row in &gaps {
            rep.push("dual.gap", &[p("j", row.j)], row.gap);
            rep.push("dual.value", &[p("j", row.j)], row.dual);
        }
        if gaps.is_empty() && rep.failures.is_empty() {
            fail(&mut rep, "dual", &"no primal solution available");
        }
    }

    let final_v: Option<VectorField> = seq
        .as_ref()
        .and_then(|s| s.solutions.last().map(|x| x.v.clone()))
        .or_else(|| plain.as_ref().map(|s| s.v.clone()));

    if wants(Diagnostic::Relax) {
        match &final_v {
            Some(v) => {
                let trace = BoundaryTrace::from_nodal(&u0);
                let bd = DiscreteBDField::from_smooth(v);
                match relaxed_functional(&bd, &trace, &f).and_then(|rv| {
                    boundary_attainment_check(&bd, &trace, &f, 64).map(|b| (rv, b))
                }) {
                    Ok((rv, b)) => {
                        rep.push("relax.absolutely_continuous", &[], rv.absolutely_continuous);
                        rep.push("relax.singular", &[], rv.singular);
                        rep.push("relax.boundary", &[], rv.boundary);
                        rep.push("relax.total", &[], rv.total());
                        rep.push("relax.attainment_margin", &[], b.margin);
                        rep.push("relax.identity_defect", &[], b.identity_defect);
                        rep.push("relax.attainment_pass", &[], b.pass as u8 as f64);
                    }
                    Err(e) => fail(&mut rep, "relax", &e),
                }
            }
            None => fail(&mut rep, "relax", &"no solution available"),
        }
    }

    if wants(Diagnostic::Nogap) {
        if let Some(sq) = &seq {
            match nogap_check(&f, &u0, &sq.solutions, 1.0) {
                Ok(n) => {
                    rep.push("nogap.relaxed", &[], n.relaxed);
                    rep.push("nogap.inf_fj", &[], n.inf_fj);
                    rep.push("nogap.tol", &[], n.tol);
                    rep.push("nogap.holds", &[], n.holds as u8 as f64);
                }
                Err(e) => fail(&mut rep, "nogap", &e),
            }
        }
    }

    if wants(Diagnostic::Uniqueness) {
        match uniqueness_check(&f, &u0, (cfg.seed + 1, cfg.seed + 2), &opts) {
            Ok(u) => {
                rep.push("uniqueness.eps_distance", &[], u.eps_distance);
                rep.push("uniqueness.eps_scale", &[], u.eps_scale);
                rep.push("uniqueness.rigid_norm", &[], u.rigid_norm);
                rep.push("uniqueness.rigid_residual", &[], u.rigid_residual);
            }
            Err(e) => fail(&mut rep, "uniqueness", &e),
        }
    }

    if wants(Diagnostic::Lbmo) {
        if let Some(sq) = &seq {
            let m = (g.nx().min(g.ny()) / 4).max(1);
            let k = NodeRect { i0: m, i1: g.nx() - m, j0: m, j1: g.ny() - m };
            let vs: Vec<VectorField> = sq.solutions.iter().map(|s| s.v.clone()).collect();
            match lbmo_monitor(&vs, k) {
                Ok(x) => rep.push("lbmo.monitor", &[p("margin", m)], x),
                Err(e) => fail(&mut rep, "lbmo", &e),
            }
        }
    }

    if wants(Diagnostic::Korn) {
        match &final_v {
            Some(v) => match korn_poincare_check(&rigid_basis(g), v, 1.0, 2.0) {
                Ok(k) => {
                    rep.push("korn.c_q", &[p("q", 1), p("p", 2)], k.c_q);
                    rep.push("korn.c_p", &[p("q", 1), p("p", 2)], k.c_p);
                }
                Err(e) => fail(&mut rep, "korn", &e),
            },
            None => fail(&mut rep, "korn", &"no solution available"),
        }
    }

    if wants(Diagnostic::Spaces) {
        match &final_v {
            Some(v) => {
                let u = SampledFunction::from_vector_field(v);
                let ops: [(&str, Vec<(&str, String)>, bdvarmin_core::Result<f64>); 5] = [
                    ("spaces.gagliardo", vec![p("s", 0.5), p("p", 2)], spaces::gagliardo(&u, 0.5, 2.0)),
                    ("spaces.besov", vec![p("alpha", 0.5), p("p", 2), p("q", "inf")], spaces::besov_nikolskii(&u, 0.5, 2.0, f64::INFINITY)),
                    ("spaces.bmo", vec![], Ok(spaces::bmo_norm(&u))),
                    ("spaces.calderon", vec![p("alpha", 0.5), p("p", 2)], spaces::calderon_seminorm(&u, 0.5, 2.0)),
                    ("spaces.doro_ratio", vec![p("s", 0.5), p("p", 2)], spaces::doro_ratio(&u, 0.5, 2.0)),
                ];
                for (name, params, val) in ops {
                    match val {
                        Ok(x) => rep.push(name, &params, x),
                        Err(e) => fail(&mut rep, name, &e),
                    }
                }
                rep.push("spaces.strain_l1", &[], sym_gradient(v).l1_norm());
            }
            None => fail(&mut rep, "spaces", &"no solution available"),
        }
    }

    if wants(Diagnostic::Exponents) {
        let mu = f.mu.expect("validated");
        for n in [2u32, 3] {
            match spaces::exponent_report(n, mu) {
                Ok(e) => {
                    let ps = [p("n", n), p("mu", mu)];
                    rep.push("exponents.q_max", &ps, e.q_max);
                    rep.push("exponents.w11_threshold", &ps, e.w11_threshold);
                    rep.push("exponents.viscosity_threshold", &ps, e.viscosity_threshold);
                    rep.push("exponents.second_derivative_threshold", &ps, e.second_derivative_threshold);
                    rep.push("exponents.higher_integrability_threshold", &ps, e.higher_integrability_threshold);
                }
                Err(e) => fail(&mut rep, "exponents", &e),
            }
        }
    }

    let all_sols: &[ViscositySolution] = seq.as_ref().map(|s| s.solutions.as_slice()).unwrap_or_default();
    let final_sol = all_sols.last().or(plain.as_ref());
    write_outputs(cfg, rep, final_sol.map(|s| (&f, s)), Some(&gaps), all_sols)
}

fn write_outputs(
    cfg: &ExperimentConfig,
    rep: DiagnosticsReport,
    solution: Option<(&Integrand, &ViscositySolution)>,
    gaps: Option<&[GapRow]>,
    seq: &[ViscositySolution],
) -> Result<DiagnosticsReport> {
    let Some(dir) = &cfg.output_dir else { return Ok(rep) };
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), rep.to_json_string())?;
    if let Some((f, s)) = solution {
        io::write_vector_field(io::create(&dir.join("solution.csv"))?, &s.v, &solution_meta(f, s.j))?;
    }
    if let Some(g) = gaps.filter(|g| !g.is_empty()) {
        write_gap_table(&dir.join("gaps.csv"), g)?;
    }
    if !seq.is_empty() {
        write_sequence_table(&dir.join("sequence.csv"), seq)?;
    }
    Ok(rep)
}

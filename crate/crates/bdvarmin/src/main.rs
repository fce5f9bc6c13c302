use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use bdvarmin::config::{generate_u0, parse_grid, ExperimentConfig, U0_GENERATORS};
use bdvarmin::io::{self, fmt_f64};
use bdvarmin::pipeline::{self, gap_row, push_monitors, solution_meta, GapRow};
use bdvarmin::report::DiagnosticsReport;
use bdvarmin::{map_parallel, thread_cap};
use bdvarmin_core::duality::{lip_dual_norm, DualCandidate};
use bdvarmin_core::grid::{divergence, sym_gradient};
use bdvarmin_core::lp::{DenseSimplex, LinearProgram, LpSolver};
use bdvarmin_core::relaxation::{bd_measure, boundary_attainment_check, relaxed_functional, BoundaryTrace, DiscreteBDField};
use bdvarmin_core::solver::{initial_guess, newton_solve, run_viscosity_sequence, sigma_field, tau_field, Schedule, SolverOptions};
use bdvarmin_core::spaces::{self, SampledFunction};
use bdvarmin_core::{GridDomain, Integrand, Sym2, SymTensorField, VectorField};
use sha2::{Digest, Sha256};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bdvarmin", version, about = "Linear-growth variational problems in the symmetric gradient")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct ProblemArgs {
    /// `phi_mu:<mu>`, `area`, `quadratic` or `abs`.
    #[arg(long)]
    integrand: String,
    /// Node counts, e.g. `32x32`.
    #[arg(long, default_value = "16x16")]
    grid: String,
    /// Boundary datum as a field CSV.
    #[arg(long, conflicts_with = "u0_gen")]
    u0: Option<PathBuf>,
    /// Named boundary datum.
    #[arg(long, default_value = "shear")]
    u0_gen: String,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ProblemArgs {
    fn load(&self) -> Result<(Integrand, VectorField, SolverOptions)> {
        let f = Integrand::from_name(&self.integrand)?;
        let g = parse_grid(&self.grid).map_err(|m| anyhow::anyhow!("--grid: {m}"))?;
        let u0 = match &self.u0 {
            Some(p) => {
                let (u, _) = io::read_vector_field(io::open(p)?)?;
                if !u.grid.same_shape(&g) {
                    bail!("--u0 grid {}x{} differs from --grid {}", u.grid.nx(), u.grid.ny(), self.grid);
                }
                u
            }
            None => generate_u0(&self.u0_gen, g)
                .with_context(|| format!("--u0-gen: unknown generator (known: {})", U0_GENERATORS.join(", ")))?,
        };
        let opts = SolverOptions { tol: self.tol, max_iters: self.max_iters, seed: self.seed, ..Default::default() };
        Ok((f, u0, opts))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceOp {
    Gagliardo,
    Besov,
    Bmo,
    Calderon,
    Doro,
    DoroRatio,
    Logconvexity,
    W11,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimise F_j (j = 0: the unstabilised functional).
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 0)]
        j: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Viscosity sequence over a list of j values.
    Sequence {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Comma separated, strictly increasing.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64,128,256")]
        j_values: Vec<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Duality gap table for saved solutions.
    Dual {
        #[arg(long = "from-solution", required = true)]
        from_solution: Vec<PathBuf>,
        /// Overrides the integrand stored in the solution header.
        #[arg(long)]
        integrand: Option<String>,
        /// Gap CSV path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relaxed functional of a nodal field or a piecewise-constant BD field.
    Relax {
        /// Nodal vector field CSV.
        #[arg(long, conflicts_with = "cells", required_unless_present = "cells")]
        r#in: Option<PathBuf>,
        /// BD cell CSV.
        #[arg(long)]
        cells: Option<PathBuf>,
        #[arg(long)]
        integrand: String,
        /// Boundary datum field CSV (same grid).
        #[arg(long, conflicts_with = "u0_gen")]
        u0: Option<PathBuf>,
        #[arg(long, default_value = "zero")]
        u0_gen: String,
        /// Directory for the JSON report, cell CSV and face-jump CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seminorms of a sampled field, or a corpus sweep.
    Spaces {
        #[arg(long, value_enum, required_unless_present = "corpus")]
        op: Option<SpaceOp>,
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// Outer Besov exponent; `inf` for the sup form.
        #[arg(long, default_value = "inf")]
        q: String,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Second order for log-convexity.
        #[arg(long, default_value_t = 0.75)]
        t: f64,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, conflicts_with = "corpus", required_unless_present = "corpus")]
        r#in: Option<PathBuf>,
        /// Run every operation over the shipped smooth corpus at this resolution.
        #[arg(long)]
        corpus: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run experiment configs.
    Experiment {
        #[arg(long = "config", required = true)]
        configs: Vec<PathBuf>,
        /// Run configs concurrently (capped by BDVARMIN_THREADS).
        #[arg(long)]
        parallel: bool,
    },
    /// Quick consistency checks.
    Selftest,
}

/// Provenance of a direct subcommand: SHA-256 of its argument list.
fn command_hash() -> String {
    let args: Vec<String> = std::env::args().skip(1).collect();
    format!("{:x}", Sha256::digest(args.join("\0").as_bytes()))
}

fn emit(rep: &DiagnosticsReport) {
    // A closed pipe downstream is not an error.
    let _ = writeln!(std::io::stdout().lock(), "{}", rep.to_json_string());
}

fn write_report(dir: &Path, rep: &DiagnosticsReport) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), rep.to_json_string())?;
    Ok(())
}

fn cmd_solve(problem: ProblemArgs, j: u64, out: PathBuf) -> Result<bool> {
    let (f, u0, opts) = problem.load()?;
    let sol = newton_solve(&f, j, &u0, &initial_guess(&u0, &opts), &opts);
    let ok = sol.el_residual <= opts.tol;
    let mut rep = DiagnosticsReport::new(command_hash());
    let jp = [("j", j.to_string())];
    rep.push("solve.energy_fj", &jp, sol.energy_fj);
    rep.push("solve.energy_f", &jp, sol.energy_f);
    rep.push("solve.el_residual", &jp, sol.el_residual);
    rep.push("solve.eps_l1", &jp, sol.eps_l1);
    rep.push("solve.iterations", &jp, sol.iterations as f64);
    rep.push("solve.converged", &jp, ok as u8 as f64);
    let max_inc = sol.energy_trace.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    rep.push("solve.max_energy_increase", &jp, if max_inc.is_finite() { max_inc } else { 0.0 });
    rep.push("solve.max_tau", &jp, tau_field(&f, &sol.v).max_norm());
    rep.push("solve.c_inf", &[], f.recession());
    rep.push("solve.boundary_mismatch", &jp, sol.v.boundary_mismatch(&u0));
    if !ok {
        rep.failures.push(format!("solve: residual {:e} above tol {:e}", sol.el_residual, opts.tol));
    }
    std::fs::create_dir_all(&out)?;
    io::write_vector_field(io::create(&out.join("solution.csv"))?, &sol.v, &solution_meta(&f, j))?;
    io::write_sym_field(io::create(&out.join("stress.csv"))?, &sigma_field(&f, j, &sol.v))?;
    write_report(&out, &rep)?;
    emit(&rep);
    Ok(ok)
}

fn cmd_sequence(problem: ProblemArgs, j_values: Vec<u64>, out: PathBuf) -> Result<bool> {
    let (f, u0, opts) = problem.load()?;
    let schedule = Schedule::new(j_values, opts.tol, opts.max_iters)?;
    let seq = run_viscosity_sequence(&f, &schedule, &u0, &opts)?;
    let mut rep = DiagnosticsReport::new(command_hash());
    let mut gaps = Vec::new();
    for (s, sigma) in seq.solutions.iter().zip(&seq.sigmas) {
        let jp = [("j", s.j.to_string())];
        rep.push("sequence.energy_fj", &jp, s.energy_fj);
        rep.push("sequence.energy_f", &jp, s.energy_f);
        rep.push("sequence.el_residual", &jp, s.el_residual);
        rep.push("sequence.eps_l1", &jp, s.eps_l1);
        let row = gap_row(&f, &u0, s, sigma)?;
        rep.push("dual.gap", &jp, row.gap);
        gaps.push(row);
    }
    push_monitors(&mut rep, &seq);
    std::fs::create_dir_all(&out)?;
    let last = seq.solutions.last().expect("non-empty schedule");
    io::write_vector_field(io::create(&out.join("solution.csv"))?, &last.v, &solution_meta(&f, last.j))?;
    pipeline::write_sequence_table(&out.join("sequence.csv"), &seq.solutions)?;
    pipeline::write_gap_table(&out.join("gaps.csv"), &gaps)?;
    write_report(&out, &rep)?;
    emit(&rep);
    Ok(seq.monitors.all_pass())
}

fn cmd_dual(files: Vec<PathBuf>, integrand: Option<String>, out: Option<PathBuf>) -> Result<bool> {
    let mut rows: Vec<GapRow> = Vec::new();
    for path in &files {
        let (v, header) = io::read_vector_field(io::open(path)?)?;
        let name = integrand.clone().or_else(|| header.meta.get("integrand").cloned()).context("no integrand in header; pass --integrand")?;
        let f = Integrand::from_name(&name)?;
        let j: u64 = header.meta.get("j").map(|s| s.parse()).transpose()?.unwrap_or(0);
        // A solution carries its own boundary values, so it serves as `u0`.
        let sol = bdvarmin_core::solver::ViscositySolution {
            j,
            energy_f: bdvarmin_core::solver::energy_f(&f, &v),
            energy_fj: bdvarmin_core::solver::energy_fj(&f, j, &v),
            el_residual: bdvarmin_core::solver::el_residual(&v, &f, j),
            eps_l1: sym_gradient(&v).l1_norm(),
            iterations: 0,
            energy_trace: Vec::new(),
            v: v.clone(),
        };
        rows.push(gap_row(&f, &v, &sol, &sigma_field(&f, j, &v))?);
    }
    match out {
        Some(p) => pipeline::write_gap_table(&p, &rows)?,
        None => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![r.j.to_string(), fmt_f64(r.primal), fmt_f64(r.dual), fmt_f64(r.gap), fmt_f64(r.div_residual)])
                .collect();
            io::write_table(std::io::stdout().lock(), &["j", "primal", "dual", "gap", "div_residual"], &table)?;
        }
    }
    Ok(rows.iter().all(|r| r.gap >= -1e-9))
}

fn cmd_relax(
    input: Option<PathBuf>,
    cells: Option<PathBuf>,
    integrand: String,
    u0: Option<PathBuf>,
    u0_gen: String,
    out: Option<PathBuf>,
) -> Result<bool> {
    let f = Integrand::from_name(&integrand)?;
    let bd = match (input, cells) {
        (Some(p), _) => DiscreteBDField::from_smooth(&io::read_vector_field(io::open(&p)?)?.0),
        (None, Some(p)) => io::read_bd_cells(io::open(&p)?)?,
        (None, None) => bail!("pass --in or --cells"),
    };
    let g = bd.grid;
    let u0 = match u0 {
        Some(p) => io::read_vector_field(io::open(&p)?)?.0,
        None => generate_u0(&u0_gen, g).context("--u0-gen: unknown generator")?,
    };
    if !u0.grid.same_shape(&g) {
        bail!("u0 grid differs from the field grid");
    }
    let trace = BoundaryTrace::from_nodal(&u0);
    let rv = relaxed_functional(&bd, &trace, &f)?;
    let att = boundary_attainment_check(&bd, &trace, &f, 64)?;
    let m = bd_measure(&bd);
    let mut rep = DiagnosticsReport::new(command_hash());
    rep.push("relax.absolutely_continuous", &[], rv.absolutely_continuous);
    rep.push("relax.singular", &[], rv.singular);
    rep.push("relax.boundary", &[], rv.boundary);
    rep.push("relax.total", &[], rv.total());
    rep.push("relax.total_variation", &[], m.total_variation());
    rep.push("relax.attainment_margin", &[], att.margin);
    rep.push("relax.identity_defect", &[], att.identity_defect);
    if let Some(dir) = out {
        write_report(&dir, &rep)?;
        io::write_bd_cells(io::create(&dir.join("cells.csv"))?, &bd)?;
        io::write_face_jumps(io::create(&dir.join("jumps.csv"))?, &m)?;
    }
    emit(&rep);
    Ok(att.pass)
}

struct SpaceParams {
    s: f64,
    p: f64,
    q: f64,
    alpha: f64,
    t: f64,
    lambda: f64,
}

fn space_op(u: &SampledFunction, op: SpaceOp, a: &SpaceParams) -> Result<(String, f64)> {
    Ok(match op {
        SpaceOp::Gagliardo => (format!("s={};p={}", a.s, a.p), spaces::gagliardo(u, a.s, a.p)?),
        SpaceOp::Besov => (format!("alpha={};p={};q={}", a.alpha, a.p, a.q), spaces::besov_nikolskii(u, a.alpha, a.p, a.q)?),
        SpaceOp::Bmo => (String::new(), spaces::bmo_norm(u)),
        SpaceOp::Calderon => (format!("alpha={};p={}", a.alpha, a.p), spaces::calderon_seminorm(u, a.alpha, a.p)?),
        SpaceOp::Doro => (format!("s={};p={}", a.s, a.p), spaces::doro_seminorm(u, a.s, a.p)?),
        SpaceOp::DoroRatio => (format!("s={};p={}", a.s, a.p), spaces::doro_ratio(u, a.s, a.p)?),
        SpaceOp::Logconvexity => {
            (format!("s={};t={};lambda={}", a.s, a.t, a.lambda), spaces::logconvexity_check(u, a.s, a.t, a.lambda)?)
        }
        SpaceOp::W11 => (String::new(), spaces::w11_seminorm(u)),
    })
}

fn op_name(op: SpaceOp) -> String {
    op.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn read_sampled(path: &Path) -> Result<SampledFunction> {
    let (u, _) = io::read_vector_field(io::open(path)?)?;
    Ok(SampledFunction::from_vector_field(&u))
}

fn cmd_spaces(op: Option<SpaceOp>, params: SpaceParams, input: Option<PathBuf>, corpus: Option<usize>, out: Option<PathBuf>) -> Result<bool> {
    let fields: Vec<(String, SampledFunction)> = match (corpus, input) {
        (Some(n), _) => spaces::smooth_corpus(n)?,
        (None, Some(p)) => vec![(p.display().to_string(), read_sampled(&p)?)],
        (None, None) => bail!("pass --in or --corpus"),
    };
    let ops: Vec<SpaceOp> = match op {
        Some(o) => vec![o],
        None => SpaceOp::value_variants().to_vec(),
    };
    let jobs: Vec<(usize, SpaceOp)> = (0..fields.len()).flat_map(|k| ops.iter().map(move |o| (k, *o))).collect();
    let results = map_parallel(&jobs, thread_cap(), |(k, o)| space_op(&fields[*k].1, *o, &params));
    let mut rows = Vec::new();
    for ((k, o), r) in jobs.iter().zip(results) {
        let (ps, v) = r?;
        let f = &fields[*k].1;
        rows.push(vec![fields[*k].0.clone(), format!("{}x{}", f.nx, f.ny), op_name(*o), ps, fmt_f64(v)]);
    }
    let cols = ["field", "resolution", "op", "params", "value"];
    match out {
        Some(p) => io::write_table(io::create(&p)?, &cols, &rows)?,
        None => io::write_table(std::io::stdout().lock(), &cols, &rows)?,
    }
    Ok(true)
}

fn cmd_experiment(paths: Vec<PathBuf>, parallel: bool) -> Result<bool> {
    let mut configs = Vec::new();
    for p in &paths {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        configs.push(ExperimentConfig::from_json(&text).with_context(|| format!("config {}", p.display()))?);
    }
    let threads = if parallel { thread_cap() } else { 1 };
    let reports = map_parallel(&configs, threads, pipeline::run);
    let mut ok = true;
    let mut stdout = std::io::stdout().lock();
    for ((path, cfg), rep) in paths.iter().zip(&configs).zip(reports) {
        match rep {
            Ok(r) => {
                ok &= r.failures.is_empty();
                writeln!(stdout, "{} [{}] metrics={} failures={} report_hash={}", path.display(), cfg.name, r.metrics.len(), r.failures.len(), r.hash())?;
                for fl in &r.failures {
                    writeln!(stdout, "  failure: {fl}")?;
                }
            }
            Err(e) => {
                ok = false;
                writeln!(stdout, "{} [{}] error: {e:#}", path.display(), cfg.name)?;
            }
        }
    }
    Ok(ok)
}

fn check(name: &str, pass: bool, detail: String) -> bool {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn cmd_selftest() -> Result<bool> {
    let mut ok = true;
    let phi3 = bdvarmin_core::integrands::phi_mu(3.0, 1.0)?;
    ok &= check("phi_3(1) closed form", (phi3 - (2f64.sqrt() - 1.0)).abs() < 1e-12, format!("{phi3:.17}"));
    let phi2 = Integrand::phi_mu(2.0)?.recession();
    ok &= check("c_inf(phi_2) = pi/2", (phi2 - std::f64::consts::FRAC_PI_2).abs() < 1e-10, format!("{phi2:.17}"));

    let g = GridDomain::unit_square(9)?;
    // Interior-supported test field.
    let u = VectorField::from_fn(g, |x, y| {
        let b = x * (1.0 - x) * y * (1.0 - y);
        [b * (3.0 * x).sin(), b * (x - y)]
    });
    let s = SymTensorField::from_fn(g, |x, y| Sym2::new(x * y, y - x, (2.0 * x).cos()));
    let d = divergence(&s);
    let rhs = -d.dot(&u);
    let lhs = s.dot(&sym_gradient(&u));
    ok &= check("divergence is minus the adjoint of e", (lhs - rhs).abs() < 1e-12, format!("{:.3e}", (lhs - rhs).abs()));

    let mut lp = LinearProgram::new();
    let x = lp.add_var(3.0, false);
    let y = lp.add_var(5.0, false);
    lp.add_le(vec![(x, 1.0)], 4.0);
    lp.add_le(vec![(y, 2.0)], 12.0);
    lp.add_le(vec![(x, 3.0), (y, 2.0)], 18.0);
    for solver in [&DenseSimplex::default() as &dyn LpSolver, &bdvarmin::lp::ClarabelLp::default()] {
        let v = solver.maximize(&lp)?.objective;
        ok &= check(&format!("textbook LP via {}", solver.name()), (v - 36.0).abs() < 1e-7, format!("{v:.12}"));
    }

    let g8 = GridDomain::unit_square(8)?;
    let mut w = vec![[0.0; 2]; g8.num_nodes()];
    w[g8.node(2, 3)] = [1.0, 0.0];
    w[g8.node(5, 3)] = [-1.0, 0.0];
    let n = lip_dual_norm(g8, &w, &DenseSimplex::default())?;
    let want = bdvarmin_core::duality::dipole_norm(g8, (2, 3), (5, 3));
    ok &= check("dipole dual norm", (n - want).abs() < 1e-9, format!("{n:.12} vs {want:.12}"));

    let f = Integrand::quadratic();
    let u0 = generate_u0("affine", GridDomain::unit_square(8)?).expect("known");
    let sol = bdvarmin_core::solver::minimize_plain(&f, &u0, &SolverOptions::default())?;
    let chi = DualCandidate::from_stress(&tau_field(&f, &sol.v), &f)?;
    let gap = bdvarmin_core::duality::duality_gap(sol.energy_f, &chi, &u0, &f)?;
    ok &= check("quadratic duality gap", gap.abs() <= 1e-8, format!("{gap:.3e}"));

    let cfg = ExperimentConfig::from_json(r#"{"integrand":"quadratic","grid":"8x8","u0":"affine","diagnostics":["solve","dual"]}"#)?;
    let (a, b) = (pipeline::run(&cfg)?, pipeline::run(&cfg)?);
    ok &= check("report determinism", a.hash() == b.hash(), a.hash()[..16].to_string());
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Solve { problem, j, out } => cmd_solve(problem, j, out),
        Cmd::Sequence { problem, j_values, out } => cmd_sequence(problem, j_values, out),
        Cmd::Dual { from_solution, integrand, out } => cmd_dual(from_solution, integrand, out),
        Cmd::Relax { r#in, cells, integrand, u0, u0_gen, out } => cmd_relax(r#in, cells, integrand, u0, u0_gen, out),
        Cmd::Spaces { op, s, p, q, alpha, t, lambda, r#in, corpus, out } => {
            let q = if q == "inf" { Ok(f64::INFINITY) } else { q.parse::<f64>().context("--q") };
            q.and_then(|q| cmd_spaces(op, SpaceParams { s, p, q, alpha, t, lambda }, r#in, corpus, out))
        }
        Cmd::Experiment { configs, parallel } => cmd_experiment(configs, parallel),
        Cmd::Selftest => cmd_selftest(),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

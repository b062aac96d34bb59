//! The four experiment commands. Each returns structured results and, when
//! given an output directory, writes its CSV and text files atomically.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use super::build::Instance;
use super::config::{AlgorithmName, ExperimentConfig, MixingSpec, StepSpec};
use super::pg_extra::pg_extra_run;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::harness::{alg1_agents, alg2_agents, audits_to_csv, minmax_from_agents, run_synchronous, stacked_from_agents, Mode, RoundAudit, Schedule};
use crate::inclusion::{alg1_run, alg1_sequence, bound_from_lambda, check_step, messages_per_round, oracle_pdtr};
use crate::linalg::{flatten_rows, max_deviation, unflatten_rows, Matrix, Vector};
use crate::minmax::{alg2_init_variant, alg2_run, alg2_step, stack_rows, Alg2Options};
use crate::mixing::{certify_mixing, laplacian_weights, metropolis_weights, CertificationReport, Mixer, CERT_TOL};
use crate::operators::{ForwardOperator, Prox, SaddleForward, ZeroForward};
use crate::pdtr::{forb_step, frdr_step, pdhg_step, pdtr_step, solve, CondatVuRule, Method, PdtrState, PrimalDualProblem, RunOptions, StepSizes};
use crate::trace::{ConvergenceTrace, StoppingRule, Termination};

/// Process exit codes of the command-line tool.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const INVALID: i32 = 2;
    pub const NOT_CONVERGED: i32 = 3;
}

/// Exit code for an error: invalid input (configs, graphs, step sizes) is
/// distinguished from everything else.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. }
        | Error::Parse { .. }
        | Error::SelfLoop { .. }
        | Error::IndexOverflow { .. }
        | Error::Disconnected
        | Error::AlphaTooSmall { .. }
        | Error::InadmissibleStep(_)
        | Error::NonPositiveLipschitz(_)
        | Error::InvertedBox(_)
        | Error::DimensionMismatch { .. } => exit::INVALID,
        Error::NoConvergence(_) => exit::NOT_CONVERGED,
        _ => exit::FAILURE,
    }
}

/// Command-line overrides applied after loading a config.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub max_iters: Option<usize>,
    pub tol: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(s) = self.seed {
            cfg.problem.seed = s;
        }
        if let Some(m) = self.max_iters {
            cfg.run.max_iters = m;
        }
        if let Some(t) = self.tol {
            cfg.run.tol = t;
        }
    }
}

/// Result of running one algorithm on an instance.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub algorithm: AlgorithmName,
    pub tau: f64,
    pub sigma: Option<f64>,
    /// The theoretical step bound `tau` was checked against, if any.
    pub tau_bound: Option<f64>,
    pub lipschitz: f64,
    pub trace: ConvergenceTrace,
    /// Agent rows of the final iterate (one row for `forb`).
    pub x: Matrix,
    pub y: Matrix,
    /// Row means of `x` and `y`.
    pub x_star: Vector,
    pub y_star: Vector,
    pub reference: Option<(Vector, Vector)>,
    pub messages_per_round: u64,
    pub wall_seconds: f64,
    pub audit: Option<AuditSummary>,
}

#[derive(Debug, Clone)]
pub struct AuditSummary {
    pub rounds: Vec<RoundAudit>,
    /// Harness replay reproduced the solver's final state bit for bit.
    pub bit_identical: bool,
}

impl AuditSummary {
    pub fn illegal_attempts(&self) -> u64 {
        self.rounds.iter().map(|r| r.illegal_attempts).sum()
    }

    pub fn messages(&self) -> u64 {
        self.rounds.iter().map(|r| r.messages).sum()
    }
}

impl RunReport {
    pub fn converged(&self) -> bool {
        self.trace.converged()
    }

    pub fn final_residual(&self) -> f64 {
        self.trace.last().map_or(f64::NAN, |r| r.fp_residual)
    }

    pub fn status(&self) -> &'static str {
        status_name(self.trace.termination)
    }

    pub fn consensus_point(&self) -> Vector {
        Vector::from_iterator(self.x_star.len() + self.y_star.len(), self.x_star.iter().chain(self.y_star.iter()).copied())
    }

    pub fn distance_to_reference(&self) -> Option<f64> {
        self.trace.last().and_then(|r| r.distance_to_reference)
    }

    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        let last = self.trace.last();
        let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), |v| v.to_string());
        let _ = writeln!(out, "algorithm = {}", self.algorithm);
        let _ = writeln!(out, "status = {}", self.status());
        let _ = writeln!(out, "iterations = {}", self.trace.iterations);
        let _ = writeln!(out, "final_residual = {}", self.final_residual());
        let _ = writeln!(out, "consensus_gap_x = {}", last.map_or(f64::NAN, |r| r.consensus_gap_x));
        let _ = writeln!(out, "consensus_gap_y = {}", opt(last.and_then(|r| r.consensus_gap_y)));
        let _ = writeln!(out, "distance_to_reference = {}", opt(self.distance_to_reference()));
        let _ = writeln!(out, "tau = {}", self.tau);
        let _ = writeln!(out, "tau_bound = {}", opt(self.tau_bound));
        let _ = writeln!(out, "sigma = {}", opt(self.sigma));
        let _ = writeln!(out, "lipschitz = {}", self.lipschitz);
        let _ = writeln!(out, "messages_per_round = {}", self.messages_per_round);
        let _ = writeln!(out, "messages_total = {}", last.map_or(0, |r| r.messages_cum));
        let _ = writeln!(out, "wall_seconds = {}", self.wall_seconds);
        if let Some(a) = &self.audit {
            let _ = writeln!(out, "audit_rounds = {}", a.rounds.len());
            let _ = writeln!(out, "audit_messages = {}", a.messages());
            let _ = writeln!(out, "audit_illegal_attempts = {}", a.illegal_attempts());
            let _ = writeln!(out, "audit_bit_identical = {}", a.bit_identical);
        }
        out
    }

    /// `variable,index,value` rows of the consensus point.
    pub fn solution_csv(&self) -> String {
        let mut out = String::from("variable,index,value\n");
        for (name, v) in [("x", &self.x_star), ("y", &self.y_star)] {
            for (i, val) in v.iter().enumerate() {
                let _ = writeln!(out, "{name},{i},{val}");
            }
        }
        out
    }
}

pub fn status_name(t: Termination) -> &'static str {
    match t {
        Termination::Converged => "converged",
        Termination::BudgetExhausted => "budget_exhausted",
        Termination::Diverged => "diverged",
    }
}

/// Writes `contents` to `dir/name` through a temporary file in `dir`.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(dir.join(name)).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Step for the decentralized methods: `safety·bound` for `auto`, else the
/// given value checked against the bound. With `L = 0` any positive step
/// is admissible and `auto` picks one.
fn decentralized_tau(cfg: &ExperimentConfig, lambda_min: f64, lipschitz: f64) -> Result<(f64, Option<f64>)> {
    let bound = if lipschitz > 0.0 { Some(bound_from_lambda(lambda_min, lipschitz)?) } else { None };
    let tau = match (cfg.algorithm.tau, bound) {
        (StepSpec::Auto, Some(b)) => cfg.algorithm.safety * b,
        (StepSpec::Auto, None) => 1.0,
        (StepSpec::Value(t), _) => t,
    };
    check_step(lambda_min, lipschitz, tau)?;
    Ok((tau, bound))
}

/// `(τ, σ)` for the centralized primal-dual methods.
fn primal_dual_steps(cfg: &ExperimentConfig, lipschitz: f64, k_norm: f64) -> Result<StepSizes> {
    let a = &cfg.algorithm;
    match (a.tau, a.sigma) {
        (StepSpec::Auto, StepSpec::Auto) => StepSizes::auto(lipschitz, k_norm, a.safety),
        (StepSpec::Value(t), StepSpec::Auto) => Ok(StepSizes::new(t, t)),
        (StepSpec::Value(t), StepSpec::Value(s)) => Ok(StepSizes::new(t, s)),
        (StepSpec::Auto, StepSpec::Value(s)) => {
            let denom = 2.0 * lipschitz + s * k_norm * k_norm;
            let tau = if denom > 0.0 { a.safety / denom } else { 1.0 };
            Ok(StepSizes::new(tau, s))
        }
    }
}

fn split_rows(z: &Matrix, p: usize) -> (Matrix, Matrix) {
    (z.columns(0, p).into_owned(), z.columns(p, z.ncols() - p).into_owned())
}

fn row_mean(m: &Matrix) -> Vector {
    m.row_mean().transpose()
}

fn concat(a: &Vector, b: &Vector) -> Vector {
    Vector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

/// Runs the configured algorithm (or `name` when given) on a prebuilt
/// instance.
pub fn run_algorithm(cfg: &ExperimentConfig, inst: &Instance, name: AlgorithmName, audit: bool) -> Result<RunReport> {
    let started = Instant::now();
    let stop = StoppingRule::new(cfg.run.tol, cfg.run.max_iters);
    let every = cfg.run.trace_every;
    let reference = if cfg.run.reference { Some(inst.reference()?) } else { None };
    let ref_joint = reference.as_ref().map(|(rx, ry)| concat(rx, ry));
    let lipschitz = inst.lipschitz();
    let (p, d) = (inst.p(), inst.d());
    if audit && !matches!(name, AlgorithmName::Alg1 | AlgorithmName::Alg2) {
        return Err(Error::config("--audit", format!("message auditing applies to alg1 and alg2, not {name}")));
    }
    let mut report = match name {
        AlgorithmName::Alg2 => {
            let bm = inst.block_mixing()?;
            let (tau, bound) = decentralized_tau(cfg, bm.lambda_min(), lipschitz)?;
            let opts = Alg2Options { variant: cfg.algorithm.init, stop, trace_every: every };
            let out = alg2_run(&inst.problems, &bm, &inst.x0, &inst.y0, tau, opts, reference.as_ref().map(|(a, b)| (a, b)))?;
            let audit = if audit {
                let agents = alg2_agents(&inst.problems, &bm, &inst.x0, &inst.y0, tau, cfg.algorithm.init)?;
                let graphs = [&inst.g1, &inst.g2];
                let (agents, rounds) = run_synchronous(&graphs, agents, out.trace.iterations, Schedule::Parallel, Mode::Audit)?;
                let replay = minmax_from_agents(&agents);
                let bit_identical = replay.is_some_and(|s| bits(&s.x()) == bits(&out.state.x()) && bits(&s.y()) == bits(&out.state.y()));
                Some(AuditSummary { rounds, bit_identical })
            } else {
                None
            };
            RunReport {
                algorithm: name,
                tau,
                sigma: None,
                tau_bound: bound,
                lipschitz,
                x: out.state.x(),
                y: out.state.y(),
                x_star: out.x_star,
                y_star: out.y_star,
                trace: out.trace,
                reference: None,
                messages_per_round: messages_per_round(&bm),
                wall_seconds: 0.0,
                audit,
            }
        }
        AlgorithmName::Alg1 => {
            if !cfg.single_network() {
                return Err(Error::config("algorithm.name", "alg1 needs one network for both blocks (drop graph.y / mixing.y)"));
            }
            let agents = inst.stacked_agents();
            let w = &inst.w1;
            let (tau, bound) = decentralized_tau(cfg, w.lambda_min(), lipschitz)?;
            let z0 = inst.stacked_start();
            let out = alg1_run(&agents, w, &z0, tau, cfg.algorithm.init, stop, every, ref_joint.as_ref())?;
            let z = out.state.x();
            let audit = if audit {
                let programs = alg1_agents(&agents, w, &z0, tau, cfg.algorithm.init)?;
                let (programs, rounds) = run_synchronous(&[&inst.g1], programs, out.trace.iterations, Schedule::Parallel, Mode::Audit)?;
                let bit_identical = stacked_from_agents(&programs).is_some_and(|s| bits(&s.x()) == bits(&z));
                Some(AuditSummary { rounds, bit_identical })
            } else {
                None
            };
            let (x, y) = split_rows(&z, p);
            RunReport {
                algorithm: name,
                tau,
                sigma: None,
                tau_bound: bound,
                lipschitz,
                x_star: row_mean(&x),
                y_star: row_mean(&y),
                x,
                y,
                trace: out.trace,
                reference: None,
                messages_per_round: messages_per_round(w),
                wall_seconds: 0.0,
                audit,
            }
        }
        AlgorithmName::PgExtra => {
            if d != 0 {
                return Err(Error::config("algorithm.name", "pg_extra accepts only minimization configs (problem.d = 0)"));
            }
            let w = &inst.w1;
            let (tau, bound) = decentralized_tau(cfg, w.lambda_min(), lipschitz)?;
            let prox: Vec<Prox> = inst.problems.iter().map(|pr| pr.prox_f.clone()).collect();
            let grads: Vec<Arc<dyn ForwardOperator>> =
                inst.problems.iter().map(|pr| Arc::new(SaddleForward::new(pr.coupling.clone())) as Arc<dyn ForwardOperator>).collect();
            let out = pg_extra_run(&prox, &grads, w, &inst.x0, tau, cfg.algorithm.init, stop, every, ref_joint.as_ref())?;
            RunReport {
                algorithm: name,
                tau,
                sigma: None,
                tau_bound: bound,
                lipschitz,
                x_star: row_mean(&out.x),
                y_star: Vector::zeros(0),
                y: Matrix::zeros(out.x.nrows(), 0),
                x: out.x,
                trace: out.trace,
                reference: None,
                messages_per_round: messages_per_round(w),
                wall_seconds: 0.0,
                audit: None,
            }
        }
        AlgorithmName::Pdtr | AlgorithmName::Pdhg | AlgorithmName::CondatVu => {
            let problem = inst.product_problem()?;
            let steps = primal_dual_steps(cfg, problem.lipschitz(), problem.k_norm())?;
            let method = match name {
                AlgorithmName::Pdtr => Method::Pdtr,
                AlgorithmName::Pdhg => Method::Pdhg,
                _ => Method::CondatVu(CondatVuRule::default()),
            };
            let init = PdtrState::new(&problem, flatten_rows(&inst.stacked_start()), Vector::zeros(problem.dual_dim()))?;
            let opts = RunOptions {
                stop,
                trace_every: every,
                allow_inadmissible: cfg.algorithm.allow_unsafe,
                layout: Some(inst.layout()),
                reference: ref_joint.clone(),
            };
            let sol = solve(&problem, method, init, steps, &opts)?;
            let z = unflatten_rows(&sol.state.x, inst.n(), p + d);
            let (x, y) = split_rows(&z, p);
            let bound = (problem.lipschitz() > 0.0).then(|| 1.0 / (2.0 * problem.lipschitz() + steps.sigma * problem.k_norm().powi(2)));
            RunReport {
                algorithm: name,
                tau: steps.tau,
                sigma: Some(steps.sigma),
                tau_bound: bound,
                lipschitz: problem.lipschitz(),
                x_star: row_mean(&x),
                y_star: row_mean(&y),
                x,
                y,
                trace: sol.trace,
                reference: None,
                messages_per_round: 0,
                wall_seconds: 0.0,
                audit: None,
            }
        }
        AlgorithmName::Forb => {
            let summed = inst.summed()?;
            let problem = summed.as_primal_dual();
            let l = problem.lipschitz();
            let bound = (l > 0.0).then(|| 1.0 / (2.0 * l));
            let tau = match cfg.algorithm.tau {
                StepSpec::Auto => bound.map_or(1.0, |b| cfg.algorithm.safety * b),
                StepSpec::Value(t) => t,
            };
            if !cfg.algorithm.allow_unsafe && bound.is_some_and(|b| tau >= b) {
                return Err(Error::InadmissibleStep(format!("FoRB needs tau < 1/(2L): tau = {tau}, bound = {}", bound.unwrap_or(f64::INFINITY))));
            }
            let z0 = concat(&row_mean(&inst.x0), &row_mean(&inst.y0));
            let init = PdtrState::new(&problem, z0, Vector::zeros(0))?;
            let opts = RunOptions { stop, trace_every: every, reference: ref_joint.clone(), ..Default::default() };
            let sol = solve(&problem, Method::Forb, init, StepSizes::new(tau, tau), &opts)?;
            let z = unflatten_rows(&sol.state.x, 1, p + d);
            let (x, y) = split_rows(&z, p);
            RunReport {
                algorithm: name,
                tau,
                sigma: None,
                tau_bound: bound,
                lipschitz: l,
                x_star: row_mean(&x),
                y_star: row_mean(&y),
                x,
                y,
                trace: sol.trace,
                reference: None,
                messages_per_round: 0,
                wall_seconds: 0.0,
                audit: None,
            }
        }
    };
    report.reference = reference;
    report.wall_seconds = started.elapsed().as_secs_f64();
    Ok(report)
}

fn bits(m: &Matrix) -> Vec<u64> {
    m.iter().map(|v| v.to_bits()).collect()
}

/// Loads a config, applies overrides and validates it.
pub fn load_config(path: &Path, overrides: Overrides) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    overrides.apply(&mut cfg);
    cfg.validate()?;
    Ok(cfg)
}

/// `run`: trace.csv, summary.txt, solution.csv and, with auditing,
/// audit.csv. Non-convergence is not an error here; callers inspect
/// [`RunReport::converged`].
pub fn cmd_run(cfg: &ExperimentConfig, out: Option<&Path>, audit: bool) -> Result<RunReport> {
    let inst = Instance::build(cfg)?;
    let report = run_algorithm(cfg, &inst, cfg.algorithm.name, audit)?;
    if let Some(dir) = out {
        write_atomic(dir, "trace.csv", &report.trace.to_csv())?;
        write_atomic(dir, "summary.txt", &report.summary_text())?;
        write_atomic(dir, "solution.csv", &report.solution_csv())?;
        if let Some(a) = &report.audit {
            write_atomic(dir, "audit.csv", &audits_to_csv(&a.rounds))?;
        }
    }
    Ok(report)
}

/// Mixing matrix exactly as the named construction produces it, without
/// refusing bad parameters, so that certification can report them.
pub fn raw_mixing(g: &Graph, scheme: MixingSpec) -> Matrix {
    match scheme {
        MixingSpec::Metropolis => metropolis_weights(g),
        MixingSpec::Laplacian(alpha) => laplacian_weights(g, alpha),
    }
}

/// `check-mixing`: certifies the matrix of `scheme` on `g`. A disconnected
/// graph is an error.
pub fn cmd_check_mixing(g: &Graph, scheme: MixingSpec) -> Result<CertificationReport> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    certify_mixing(&raw_mixing(g, scheme), g, CERT_TOL)
}

/// One row of the verification report.
#[derive(Debug, Clone)]
pub struct VerifyRow {
    pub name: &'static str,
    pub iterations: usize,
    pub deviation: f64,
    pub tolerance: f64,
}

impl VerifyRow {
    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

pub fn format_verify(rows: &[VerifyRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let verdict = if r.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{:<32} {verdict}  max deviation {:.3e} (tol {:.0e}, {} iterations)", r.name, r.deviation, r.tolerance, r.iterations);
    }
    out
}

const VERIFY_ITERS: usize = 200;

/// `verify`: equivalence checks on the configured instance.
///
/// - agent-local recursion vs PDTR on the product space (`1e-10`);
/// - min-max recursion vs the stacked inclusion recursion (`1e-14`);
/// - PDTR with `B = 0` vs PDHG (`1e-14`);
/// - PDTR with `K = 0` vs FoRB plus proximal point (`1e-14`);
/// - PDTR with `K = I` vs FRDR with `γ = 1/σ` (`1e-12`).
pub fn cmd_verify(cfg: &ExperimentConfig) -> Result<Vec<VerifyRow>> {
    let inst = Instance::build(cfg)?;
    let agents = inst.stacked_agents();
    let z0 = inst.stacked_start();
    let lipschitz = inst.lipschitz();
    let safety = cfg.algorithm.safety;
    let mut rows = Vec::new();

    let w = &inst.w1;
    let tau = if lipschitz > 0.0 { safety * bound_from_lambda(w.lambda_min(), lipschitz)? } else { 1.0 };
    let local = alg1_sequence(&agents, w, &z0, tau, cfg.algorithm.init, VERIFY_ITERS)?;
    let oracle = oracle_pdtr(&agents, w, &z0, tau, cfg.algorithm.init, VERIFY_ITERS)?;
    let dev = local.iter().zip(&oracle).map(|(a, b)| max_deviation(a, b)).fold(0.0, f64::max);
    rows.push(VerifyRow { name: "alg1 vs product-space pdtr", iterations: VERIFY_ITERS, deviation: dev, tolerance: 1e-10 });

    let bm = inst.block_mixing()?;
    let tau = if lipschitz > 0.0 { safety * bound_from_lambda(bm.lambda_min(), lipschitz)? } else { 1.0 };
    let mut mm = alg2_init_variant(&inst.problems, &bm, &inst.x0, &inst.y0, tau, cfg.algorithm.init)?;
    let mut st = crate::inclusion::alg1_init_variant(&agents, &bm, &z0, tau, cfg.algorithm.init)?;
    let mut dev = max_deviation(&stack_rows(&mm.x(), &mm.y()), &st.x());
    for _ in 1..VERIFY_ITERS {
        mm = alg2_step(&inst.problems, &bm, &mm, tau);
        st = crate::inclusion::alg1_step(&agents, &bm, &st, tau);
        dev = dev.max(max_deviation(&stack_rows(&mm.x(), &mm.y()), &st.x()));
    }
    rows.push(VerifyRow { name: "alg2 vs stacked alg1", iterations: VERIFY_ITERS, deviation: dev, tolerance: 1e-14 });

    let product = inst.product_problem()?;
    let x0 = flatten_rows(&z0);
    rows.push(pdhg_reduction(&product, &x0, safety)?);
    rows.push(forb_reduction(&product, &x0, safety)?);
    rows.push(frdr_reduction(&product, &x0, safety)?);
    Ok(rows)
}

fn state_deviation(a: &PdtrState, b: &PdtrState) -> f64 {
    let dx = (&a.x - &b.x).amax();
    let dy = (&a.y - &b.y).amax();
    dx.max(dy)
}

fn pdhg_reduction(product: &PrimalDualProblem, x0: &Vector, safety: f64) -> Result<VerifyRow> {
    let iters = 100;
    let problem = product.with_forward(Arc::new(ZeroForward));
    let steps = StepSizes::auto(0.0, problem.k_norm(), safety)?;
    let y0 = &(problem.k() * x0) * 0.5;
    let mut a = PdtrState::new(&problem, x0.clone(), y0.clone())?;
    let mut b = a.clone();
    let mut dev: f64 = 0.0;
    for _ in 0..iters {
        a = pdtr_step(&problem, &a, steps);
        b = pdhg_step(&problem, &b, steps);
        dev = dev.max(state_deviation(&a, &b));
    }
    Ok(VerifyRow { name: "pdtr(B=0) vs pdhg", iterations: iters, deviation: dev, tolerance: 1e-14 })
}

fn forb_reduction(product: &PrimalDualProblem, x0: &Vector, safety: f64) -> Result<VerifyRow> {
    let iters = 100;
    let dim = product.primal_dim();
    let problem = product.with_k(Matrix::zeros(dim, dim));
    let steps = StepSizes::auto(problem.lipschitz(), 0.0, safety)?;
    let y0 = x0 * 0.5;
    let mut a = PdtrState::new(&problem, x0.clone(), y0.clone())?;
    let mut b = a.clone();
    let mut dev: f64 = 0.0;
    for _ in 0..iters {
        a = pdtr_step(&problem, &a, steps);
        let y = crate::pdtr::proximal_point_step(&problem, &b.y, steps.sigma);
        b = forb_step(&problem, &b, steps.tau)?;
        b.y = y;
        dev = dev.max(state_deviation(&a, &b));
    }
    Ok(VerifyRow { name: "pdtr(K=0) vs forb + prox point", iterations: iters, deviation: dev, tolerance: 1e-14 })
}

fn frdr_reduction(product: &PrimalDualProblem, x0: &Vector, safety: f64) -> Result<VerifyRow> {
    let iters = 50;
    let dim = product.primal_dim();
    let problem = product.with_k(Matrix::identity(dim, dim));
    let steps = StepSizes::auto(problem.lipschitz(), 1.0, safety)?;
    let gamma = 1.0 / steps.sigma;
    let mut a = PdtrState::new(&problem, x0.clone(), Vector::zeros(dim))?;
    let mut b = a.clone();
    let mut dev: f64 = 0.0;
    for _ in 0..iters {
        a = pdtr_step(&problem, &a, steps);
        b = frdr_step(&problem, &Prox::ZeroSet, &b, steps.tau, gamma)?.0;
        dev = dev.max((&a.x - &b.x).amax());
    }
    Ok(VerifyRow { name: "pdtr(K=I) vs frdr", iterations: iters, deviation: dev, tolerance: 1e-12 })
}

/// Per-algorithm outcome of `compare`.
#[derive(Debug, Clone)]
pub struct CompareEntry {
    pub report: RunReport,
    /// Max-norm distance of this consensus point from the first algorithm's.
    pub deviation_from_first: f64,
}

/// Residual traces side by side, one row per iteration recorded by any
/// algorithm.
pub fn aligned_csv(entries: &[CompareEntry]) -> String {
    use std::collections::BTreeMap;
    let mut table: BTreeMap<usize, Vec<Option<f64>>> = BTreeMap::new();
    for (k, e) in entries.iter().enumerate() {
        for r in e.report.trace.rows() {
            table.entry(r.iteration).or_insert_with(|| vec![None; entries.len()])[k] = Some(r.fp_residual);
        }
    }
    let mut out = String::from("iteration");
    for e in entries {
        let _ = write!(out, ",{}", e.report.algorithm);
    }
    out.push('\n');
    for (it, vals) in table {
        let _ = write!(out, "{it}");
        for v in vals {
            out.push(',');
            if let Some(v) = v {
                let _ = write!(out, "{v}");
            }
        }
        out.push('\n');
    }
    out
}

pub fn compare_summary(entries: &[CompareEntry]) -> String {
    let mut out = String::from("algorithm,status,iterations,final_residual,tau,sigma,deviation_from_first\n");
    for e in entries {
        let r = &e.report;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.algorithm,
            r.status(),
            r.trace.iterations,
            r.final_residual(),
            r.tau,
            r.sigma.map(|s| s.to_string()).unwrap_or_default(),
            e.deviation_from_first
        );
    }
    out
}

/// `compare`: runs every algorithm listed in `[compare]` on one instance.
/// Non-converged runs are flagged in the summary, not treated as errors.
pub fn cmd_compare(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Vec<CompareEntry>> {
    if cfg.compare.len() < 2 {
        return Err(Error::config("compare.algorithms", "list at least two algorithms"));
    }
    let inst = Instance::build(cfg)?;
    let mut entries: Vec<CompareEntry> = Vec::new();
    for &name in &cfg.compare {
        let report = run_algorithm(cfg, &inst, name, false)?;
        let deviation_from_first = entries.first().map_or(0.0, |first| {
            let (a, b) = (report.consensus_point(), first.report.consensus_point());
            if a.len() == b.len() { (a - b).amax() } else { f64::NAN }
        });
        entries.push(CompareEntry { report, deviation_from_first });
    }
    if let Some(dir) = out {
        for e in &entries {
            write_atomic(dir, &format!("trace_{}.csv", e.report.algorithm), &e.report.trace.to_csv())?;
        }
        write_atomic(dir, "compare.csv", &aligned_csv(&entries))?;
        write_atomic(dir, "compare_summary.txt", &compare_summary(&entries))?;
    }
    Ok(entries)
}

/// Default step of the decentralized methods for `cfg`, as `run` would
/// choose it.
pub fn resolved_decentralized_tau(cfg: &ExperimentConfig, inst: &Instance) -> Result<f64> {
    let lambda = if cfg.single_network() { inst.w1.lambda_min() } else { inst.block_mixing()?.lambda_min() };
    Ok(decentralized_tau(cfg, lambda, inst.lipschitz())?.0)
}

//! The acceptance suite: ten criteria, one PASS/FAIL line each. Exits
//! nonzero if any criterion fails.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{max_dev, monotone_matrix, random_agents, random_prox, random_topology, rng, uniform, uniform_vec};
use dminmax::experiment::{cmd_compare, pg_extra_run, AlgorithmName, ExperimentConfig, Instance};
use dminmax::harness::{alg1_agents, alg2_agents, run_synchronous, Mode, Schedule};
use dminmax::inclusion::{
    alg1_init, alg1_init_variant, alg1_run, alg1_sequence, alg1_step, max_lipschitz, oracle_pdtr, stepsize_bound,
    InitVariant,
};
use dminmax::linalg::{Matrix, Vector};
use dminmax::minmax::{alg2_init, alg2_init_variant, alg2_run, alg2_step, stack_rows, stacked_agents, stepsize_bound_minmax, AgentSaddleProblem, Alg2Options};
use dminmax::mixing::{certify_mixing, laplacian_weights, metropolis_weights, BlockMixing, MixingMatrix, CERT_TOL};
use dminmax::operators::{LinearForward, Prox, SaddleForward, SmoothCoupling, ZeroForward};
use dminmax::pdtr::{
    sample_metric_lipschitz, forb_step, frdr_step, metric_lipschitz_bound, pdhg_step, pdtr_step, proximal_point_step,
    PdtrState, PrimalDualProblem, StepSizes,
};
use dminmax::trace::StoppingRule;
use rand::RngExt;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict { passed, detail: detail.into() }
}

fn within(started: Instant, limit: Duration) -> bool {
    started.elapsed() < limit
}

fn mixing_certification() -> Verdict {
    let started = Instant::now();
    let corpus = common::graph_corpus(60, 2024);
    let mut failures = Vec::new();
    for (name, g) in &corpus {
        let lmax = g.laplacian().symmetric_eigenvalues().max();
        for (scheme, w) in [("metropolis", metropolis_weights(g)), ("laplacian", laplacian_weights(g, lmax))] {
            match certify_mixing(&w, g, CERT_TOL) {
                Ok(r) if r.all_passed() => {}
                _ => failures.push(format!("{name}/{scheme}")),
            }
        }
    }
    let mut controls = 0;
    for (_, g) in corpus.iter().take(20) {
        let n = g.n();
        let identity = certify_mixing(&Matrix::identity(n, n), g, CERT_TOL).unwrap();
        let half = g.laplacian().symmetric_eigenvalues().max() / 2.0;
        let spectral = certify_mixing(&laplacian_weights(g, half), g, CERT_TOL).unwrap();
        if !identity.kernel.passed && identity.spectral.passed && !spectral.spectral.passed && spectral.kernel.passed {
            controls += 1;
        }
    }
    let elapsed = started.elapsed();
    verdict(
        failures.is_empty() && controls == 20 && elapsed < Duration::from_secs(5),
        format!("{} graphs x 2 schemes, {} failures, 20/{controls} negative controls fail as intended, {elapsed:.2?}", corpus.len(), failures.len()),
    )
}

fn derivation_equivalence() -> Verdict {
    let started = Instant::now();
    let mut rng = rng(1);
    let mut worst = 0.0f64;
    let instances = 24;
    for k in 0..instances {
        let n = rng.random_range(2..=10);
        let h = rng.random_range(1..=5);
        let agents = random_agents(&mut rng, n, h);
        let g = random_topology(&mut rng, n);
        let w = if k % 2 == 0 {
            MixingMatrix::metropolis(&g).unwrap()
        } else {
            let lmax = g.laplacian().symmetric_eigenvalues().max();
            MixingMatrix::from_laplacian(&g, lmax * rng.random_range(0.6..1.5)).unwrap()
        };
        let tau = rng.random_range(0.1..0.99) * stepsize_bound(&w, max_lipschitz(&agents)).unwrap();
        let x0 = uniform(&mut rng, n, h);
        let variant = if k % 3 == 0 { InitVariant::Alt } else { InitVariant::Default };
        let local = alg1_sequence(&agents, &w, &x0, tau, variant, 200).unwrap();
        let oracle = oracle_pdtr(&agents, &w, &x0, tau, variant, 200).unwrap();
        for (a, b) in local.iter().zip(&oracle) {
            worst = worst.max(max_dev(a, b));
        }
    }
    let elapsed = started.elapsed();
    verdict(
        worst <= 1e-10 && elapsed < Duration::from_secs(10),
        format!("{instances} instances x 200 iterations, max deviation {worst:.3e}, {elapsed:.2?}"),
    )
}

fn random_saddle_problems(rng: &mut rand_chacha::ChaCha8Rng, n: usize, p: usize, d: usize) -> Vec<AgentSaddleProblem> {
    (0..n)
        .map(|i| {
            let m = uniform(rng, p, d);
            let coupling = if i % 2 == 0 {
                SmoothCoupling::bilinear(m, uniform_vec(rng, p), uniform_vec(rng, d)).unwrap()
            } else {
                let (fp, fr) = (uniform(rng, p, p), uniform(rng, d, d));
                let (pm, rm) = (&fp * fp.transpose(), &fr * fr.transpose());
                SmoothCoupling::new((&pm + pm.transpose()) * 0.5, m, (&rm + rm.transpose()) * 0.5, uniform_vec(rng, p), uniform_vec(rng, d)).unwrap()
            };
            AgentSaddleProblem::new(random_prox(rng, p), random_prox(rng, d), coupling)
        })
        .collect()
}

fn stacking_equivalence() -> Verdict {
    let mut rng = rng(2);
    let mut worst = 0.0f64;
    let instances = 24;
    for k in 0..instances {
        let n = rng.random_range(2..=9);
        let (p, d) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let problems = random_saddle_problems(&mut rng, n, p, d);
        let g1 = random_topology(&mut rng, n);
        let g2 = if k % 2 == 0 { g1.clone() } else { random_topology(&mut rng, n) };
        let bm = BlockMixing::new(MixingMatrix::metropolis(&g1).unwrap(), MixingMatrix::metropolis(&g2).unwrap(), p).unwrap();
        let tau = 0.9 * stepsize_bound_minmax(&bm, dminmax::minmax::max_lipschitz(&problems)).unwrap();
        let (x0, y0) = (uniform(&mut rng, n, p), uniform(&mut rng, n, d));
        let variant = if k % 3 == 0 { InitVariant::Alt } else { InitVariant::Default };
        let agents = stacked_agents(&problems);
        let mut mm = alg2_init_variant(&problems, &bm, &x0, &y0, tau, variant).unwrap();
        let mut st = alg1_init_variant(&agents, &bm, &stack_rows(&x0, &y0), tau, variant).unwrap();
        worst = worst.max(max_dev(&stack_rows(&mm.x(), &mm.y()), &st.x()));
        for _ in 1..200 {
            mm = alg2_step(&problems, &bm, &mm, tau);
            st = alg1_step(&agents, &bm, &st, tau);
            worst = worst.max(max_dev(&stack_rows(&mm.x(), &mm.y()), &st.x()));
        }
    }
    verdict(worst <= 1e-14, format!("{instances} instances x 200 iterations, max per-iteration deviation {worst:.3e}"))
}

fn random_primal_dual(rng: &mut rand_chacha::ChaCha8Rng, n: usize, m: usize) -> PrimalDualProblem {
    let b = LinearForward::new(monotone_matrix(rng, n, 0.3), uniform_vec(rng, n));
    PrimalDualProblem::new(Arc::new(random_prox(rng, n)), Arc::new(b), Arc::new(Prox::interval(-0.5, 0.5).unwrap()), uniform(rng, m, n))
}

fn state_dev(a: &PdtrState, b: &PdtrState) -> f64 {
    (&a.x - &b.x).amax().max((&a.y - &b.y).amax())
}

fn reduction_exactness() -> Verdict {
    let mut rng = rng(4);
    let (mut pdhg, mut forb, mut frdr) = (0.0f64, 0.0f64, 0.0f64);
    let instances = 20;
    for _ in 0..instances {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(1..=6);
        let base = random_primal_dual(&mut rng, n, m);
        let x0 = uniform_vec(&mut rng, n);
        let y0 = uniform_vec(&mut rng, m);

        let p = base.with_forward(Arc::new(ZeroForward));
        let steps = StepSizes::auto(0.0, p.k_norm(), 0.9).unwrap();
        let (mut a, mut b) = (PdtrState::new(&p, x0.clone(), y0.clone()).unwrap(), PdtrState::new(&p, x0.clone(), y0.clone()).unwrap());
        for _ in 0..100 {
            a = pdtr_step(&p, &a, steps);
            b = pdhg_step(&p, &b, steps);
            pdhg = pdhg.max(state_dev(&a, &b));
        }

        let p = base.with_k(Matrix::zeros(m, n));
        let steps = StepSizes::auto(p.lipschitz(), 0.0, 0.9).unwrap();
        let (mut a, mut b) = (PdtrState::new(&p, x0.clone(), y0.clone()).unwrap(), PdtrState::new(&p, x0.clone(), y0.clone()).unwrap());
        for _ in 0..100 {
            a = pdtr_step(&p, &a, steps);
            let y = proximal_point_step(&p, &b.y, steps.sigma);
            b = forb_step(&p, &b, steps.tau).unwrap();
            b.y = y;
            forb = forb.max(state_dev(&a, &b));
        }

        // C⁻¹ is the normal cone of [-1/2, 1/2]ⁿ, so C = ∂(½‖·‖₁).
        let p = base.with_k(Matrix::identity(n, n));
        let jc = Prox::l1(0.5).unwrap();
        let steps = StepSizes::auto(p.lipschitz(), 1.0, 0.9).unwrap();
        let y0 = uniform_vec(&mut rng, n);
        let (mut a, mut b) = (PdtrState::new(&p, x0.clone(), y0.clone()).unwrap(), PdtrState::new(&p, x0.clone(), y0).unwrap());
        for _ in 0..50 {
            a = pdtr_step(&p, &a, steps);
            b = frdr_step(&p, &jc, &b, steps.tau, 1.0 / steps.sigma).unwrap().0;
            frdr = frdr.max((&a.x - &b.x).amax());
        }
    }
    verdict(
        pdhg <= 1e-14 && forb <= 1e-14 && frdr <= 1e-12,
        format!("{instances} instances: B=0 vs PDHG {pdhg:.3e}, K=0 vs FoRB+prox point {forb:.3e}, K=I vs FRDR {frdr:.3e}"),
    )
}

fn metric_bound() -> Verdict {
    let mut rng = rng(5);
    let mut worst_ratio = 0.0f64;
    let instances = 12;
    for k in 0..instances {
        let (p, d) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let m = rng.random_range(1..=4);
        let coupling = if k % 2 == 0 {
            SmoothCoupling::bilinear(uniform(&mut rng, p, d), Vector::zeros(p), Vector::zeros(d)).unwrap()
        } else {
            let (fp, fr) = (uniform(&mut rng, p, p), uniform(&mut rng, d, d));
            let (pm, rm) = (&fp * fp.transpose(), &fr * fr.transpose());
            SmoothCoupling::quadratic((&pm + pm.transpose()) * 0.5, uniform(&mut rng, p, d), (&rm + rm.transpose()) * 0.5).unwrap()
        };
        let problem = PrimalDualProblem::new(
            Arc::new(Prox::Zero),
            Arc::new(SaddleForward::new(Arc::new(coupling))),
            Arc::new(Prox::Zero),
            uniform(&mut rng, m, p + d),
        );
        let (l, kn) = (problem.lipschitz(), problem.k_norm());
        // τσ‖K‖² = load, then τ from 2τL + load = safety.
        let load = rng.random_range(0.05..0.6);
        let tau = rng.random_range(0.1..0.95) * (1.0 - load) / (2.0 * l);
        let steps = StepSizes::new(tau, load / (tau * kn * kn));
        let observed = sample_metric_lipschitz(&problem, steps, 10_000, 2.0, k).unwrap();
        worst_ratio = worst_ratio.max(observed / metric_lipschitz_bound(steps, l, kn));
    }
    verdict(
        worst_ratio <= 1.0 + 1e-9,
        format!("{instances} instances x 10^4 pairs, worst observed/bound = {worst_ratio:.6}"),
    )
}

const RING5: &str = "
[problem]
agents = 5
p = 3
d = 3
f = l1:0.1
g = box:-1:1
coupling = bilinear
seed = 7
start = random

[graph]
x = ring

[mixing]
x = metropolis

[algorithm]
name = alg2
";

fn convergence() -> Verdict {
    let started = Instant::now();
    let inst = Instance::build(&ExperimentConfig::parse(RING5).unwrap()).unwrap();
    let bm = inst.block_mixing().unwrap();
    let tau = 0.9 * stepsize_bound_minmax(&bm, inst.lipschitz()).unwrap();
    let (rx, ry) = inst.reference().unwrap();
    let opts = Alg2Options { stop: StoppingRule::new(1e-11, 100_000), trace_every: 1000, ..Default::default() };
    let out = alg2_run(&inst.problems, &bm, &inst.x0, &inst.y0, tau, opts, Some((&rx, &ry))).unwrap();
    let (gx, gy) = out.consensus_gaps();
    let dist = out.trace.last().and_then(|r| r.distance_to_reference).unwrap_or(f64::INFINITY);
    let elapsed = started.elapsed();
    verdict(
        out.converged() && gx <= 1e-8 && gy <= 1e-8 && dist <= 1e-6 && within(started, Duration::from_secs(60)),
        format!("{} iterations, gaps ({gx:.2e}, {gy:.2e}), distance to FoRB reference {dist:.2e}, {elapsed:.2?}", out.trace.iterations),
    )
}

fn step_gate() -> Verdict {
    let inst = Instance::build(&ExperimentConfig::parse(RING5).unwrap()).unwrap();
    let bm = inst.block_mixing().unwrap();
    let bound = stepsize_bound_minmax(&bm, inst.lipschitz()).unwrap();
    let agents = inst.stacked_agents();
    let z0 = inst.stacked_start();
    let rejects = |tau: f64| {
        let msg = |e: dminmax::Error| e.to_string().contains("step size exceeds (1+λ_min)/(4L)");
        alg2_init(&inst.problems, &bm, &inst.x0, &inst.y0, tau).err().is_some_and(msg)
            && alg1_init(&agents, &inst.w1, &z0, tau).err().is_some_and(msg)
            && alg2_agents(&inst.problems, &bm, &inst.x0, &inst.y0, tau, InitVariant::Default).err().is_some_and(msg)
            && alg1_agents(&agents, &inst.w1, &z0, tau, InitVariant::Default).err().is_some_and(msg)
    };
    let accepts = |tau: f64| {
        alg2_init(&inst.problems, &bm, &inst.x0, &inst.y0, tau).is_ok()
            && alg1_init(&agents, &inst.w1, &z0, tau).is_ok()
            && alg2_agents(&inst.problems, &bm, &inst.x0, &inst.y0, tau, InitVariant::Default).is_ok()
            && alg1_agents(&agents, &inst.w1, &z0, tau, InitVariant::Default).is_ok()
    };
    let (at, inside) = (rejects(bound), accepts(0.999 * bound));
    verdict(at && inside, format!("bound {bound:.6}: tau = bound rejected {at}, tau = 0.999 bound accepted {inside}"))
}

fn locality_audit() -> Verdict {
    let mut rng = rng(8);
    let rounds = 40;
    let (mut runs, mut illegal, mut count_errors) = (0, 0u64, 0);
    for k in 0..30 {
        let n = rng.random_range(2..=12);
        let g1 = random_topology(&mut rng, n);
        let w1 = MixingMatrix::metropolis(&g1).unwrap();
        if k % 2 == 0 {
            let h = rng.random_range(1..=4);
            let agents = random_agents(&mut rng, n, h);
            let tau = 0.9 * stepsize_bound(&w1, max_lipschitz(&agents)).unwrap();
            let programs = alg1_agents(&agents, &w1, &uniform(&mut rng, n, h), tau, InitVariant::Default).unwrap();
            let (_, audits) = run_synchronous(&[&g1], programs, rounds, Schedule::Parallel, Mode::Audit).unwrap();
            illegal += audits.iter().map(|a| a.illegal_attempts).sum::<u64>();
            count_errors += audits.iter().filter(|a| a.messages != 2 * g1.edge_count() as u64).count();
        } else {
            let g2 = random_topology(&mut rng, n);
            let lmax = g2.laplacian().symmetric_eigenvalues().max();
            let w2 = MixingMatrix::from_laplacian(&g2, lmax).unwrap();
            let (p, d) = (rng.random_range(1..=3), rng.random_range(1..=3));
            let problems = random_saddle_problems(&mut rng, n, p, d);
            let bm = BlockMixing::new(w1, w2, p).unwrap();
            let tau = 0.9 * stepsize_bound_minmax(&bm, dminmax::minmax::max_lipschitz(&problems)).unwrap();
            let programs = alg2_agents(&problems, &bm, &uniform(&mut rng, n, p), &uniform(&mut rng, n, d), tau, InitVariant::Alt).unwrap();
            let (_, audits) = run_synchronous(&[&g1, &g2], programs, rounds, Schedule::Parallel, Mode::Audit).unwrap();
            illegal += audits.iter().map(|a| a.illegal_attempts).sum::<u64>();
            let expected = 2 * (g1.edge_count() + g2.edge_count()) as u64;
            count_errors += audits.iter().filter(|a| a.messages != expected).count();
        }
        runs += 1;
    }
    verdict(
        illegal == 0 && count_errors == 0,
        format!("{runs} audited runs x {rounds} rounds: {illegal} illegal reads, {count_errors} rounds with a message count other than 2|E| per block"),
    )
}

fn minimization_config(coupling: &str, seed: u64, topology: &str) -> ExperimentConfig {
    ExperimentConfig::parse(&format!(
        "
[problem]
agents = 6
p = 3
d = 0
f = l1:0.05
f.0 = box:-1:1
f.3 = box:-0.5:2
coupling = {coupling}
seed = {seed}
start = random

[graph]
x = {topology}

[mixing]
x = metropolis

[algorithm]
name = alg1

[run]
max_iters = 3000
tol = 1e-12
"
    ))
    .unwrap()
}

/// Max over shared rows of the residual and consensus-gap differences and
/// the final-iterate difference, plus whether both traces have equal length.
fn pg_extra_gap(cfg: &ExperimentConfig) -> (f64, bool) {
    let inst = Instance::build(cfg).unwrap();
    let agents = inst.stacked_agents();
    let tau = 0.9 * stepsize_bound(&inst.w1, inst.lipschitz()).unwrap_or(1.0 / 0.9);
    let stop = StoppingRule::new(cfg.run.tol, cfg.run.max_iters);
    let a = alg1_run(&agents, &inst.w1, &inst.x0, tau, InitVariant::Default, stop, 1, None).unwrap();
    let prox: Vec<Prox> = inst.problems.iter().map(|p| p.prox_f.clone()).collect();
    let grads: Vec<Arc<dyn dminmax::operators::ForwardOperator>> =
        inst.problems.iter().map(|p| Arc::new(SaddleForward::new(p.coupling.clone())) as _).collect();
    let b = pg_extra_run(&prox, &grads, &inst.w1, &inst.x0, tau, InitVariant::Default, stop, 1, None).unwrap();
    let mut dev = max_dev(&a.state.x(), &b.x);
    for (r, s) in a.trace.rows().iter().zip(b.trace.rows()) {
        dev = dev.max((r.fp_residual - s.fp_residual).abs()).max((r.consensus_gap_x - s.consensus_gap_x).abs());
    }
    (dev, a.trace.rows().len() == b.trace.rows().len())
}

fn pg_extra_consistency() -> Verdict {
    let mut worst = 0.0f64;
    let (mut cases, mut aligned) = (0, true);
    for (seed, topology) in [(1, "ring"), (2, "path"), (3, "star"), (4, "random:9:0.3"), (5, "complete")] {
        for coupling in ["bilinear", "none"] {
            let (dev, same_len) = pg_extra_gap(&minimization_config(coupling, seed, topology));
            worst = worst.max(dev);
            aligned &= same_len;
            cases += 1;
        }
    }
    let (curved, _) = pg_extra_gap(&minimization_config("quadratic", 1, "ring"));
    verdict(
        worst <= 1e-12 && aligned,
        format!("{cases} configs with constant or zero smooth gradient, max trace deviation {worst:.3e} (curved smooth term, informational: {curved:.3e})"),
    )
}

const SKEW: &str = "
[problem]
agents = 4
p = 2
d = 2
coupling = skew
seed = 5
start = random

[graph]
x = ring

[mixing]
x = metropolis

[algorithm]
name = pdtr

[run]
max_iters = 20000
tol = 1e-6

[compare]
algorithms = pdtr, condat_vu
";

fn condat_vu_demo() -> Verdict {
    let cfg = ExperimentConfig::parse(SKEW).unwrap();
    let entries = cmd_compare(&cfg, None).unwrap();
    let pdtr = &entries.iter().find(|e| e.report.algorithm == AlgorithmName::Pdtr).unwrap().report;
    let cv = &entries.iter().find(|e| e.report.algorithm == AlgorithmName::CondatVu).unwrap().report;
    let same_steps = pdtr.tau == cv.tau && pdtr.sigma == cv.sigma;
    verdict(
        pdtr.converged() && pdtr.final_residual() <= 1e-6 && !cv.converged() && same_steps,
        format!(
            "pdtr {} after {} iterations; condat_vu {} after {} iterations; same (tau, sigma) = {same_steps}",
            pdtr.status(),
            pdtr.trace.iterations,
            cv.status(),
            cv.trace.iterations
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("mixing certification", mixing_certification),
        ("derivation equivalence", derivation_equivalence),
        ("stacking equivalence", stacking_equivalence),
        ("reduction exactness", reduction_exactness),
        ("metric Lipschitz bound", metric_bound),
        ("convergence on 5-agent ring", convergence),
        ("step-size gate", step_gate),
        ("locality audit", locality_audit),
        ("PG-EXTRA consistency", pg_extra_consistency),
        ("Condat-Vu on skew coupling", condat_vu_demo),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let v = std::panic::catch_unwind(check).unwrap_or_else(|_| verdict(false, "panicked"));
        println!("[{}] {:>2}. {name}: {}", if v.passed { "PASS" } else { "FAIL" }, k + 1, v.detail);
        if !v.passed {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

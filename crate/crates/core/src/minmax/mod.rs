//! Decentralized solver for
//!
//! ```text
//! min_x max_y Σᵢ fᵢ(x) + φᵢ(x, y) − gᵢ(y)
//! ```
//!
//! where the `x` copies mix over one network (`W₁`) and the `y` copies over
//! another (`W₂`). Each block follows the agent-local recursion of
//! [`crate::inclusion`] with `vₓ = 2∇ₓφ(zᵏ) − ∇ₓφ(zᵏ⁻¹)` and
//! `vᵧ = −2∇ᵧφ(zᵏ) + ∇ᵧφ(zᵏ⁻¹)`.

mod reference;

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inclusion::{bound_from_lambda, consensus_gap, distance_to_point, AgentInclusion, InitVariant};
use crate::linalg::{Matrix, Vector};
use crate::mixing::{BlockMixing, Mixer, NeighborRead};
use crate::operators::{ProductResolvent, Prox, Resolvent, SaddleForward, SmoothCoupling};
use crate::trace::{ConvergenceTrace, StoppingRule, Termination, TraceRow};

pub use reference::{centralized_forb, forb_residual, kkt_bilinear, summed_problem, SummedProblem};

/// Agent `i`'s data: `fᵢ` on `R^p`, `gᵢ` on `R^d` and the coupling `φᵢ`.
#[derive(Debug, Clone)]
pub struct AgentSaddleProblem {
    pub prox_f: Prox,
    pub prox_g: Prox,
    pub coupling: Arc<SmoothCoupling>,
}

impl AgentSaddleProblem {
    pub fn new(prox_f: Prox, prox_g: Prox, coupling: SmoothCoupling) -> Self {
        AgentSaddleProblem { prox_f, prox_g, coupling: Arc::new(coupling) }
    }

    pub fn p(&self) -> usize {
        self.coupling.p()
    }

    pub fn d(&self) -> usize {
        self.coupling.d()
    }

    pub fn lipschitz(&self) -> f64 {
        self.coupling.lipschitz()
    }

    /// The same agent as an inclusion on `R^{p+d}`: `A = ∂f × ∂g`,
    /// `B = (∇ₓφ, −∇ᵧφ)`.
    pub fn as_inclusion(&self) -> AgentInclusion {
        AgentInclusion::new(
            Arc::new(ProductResolvent::new(
                Arc::new(self.prox_f.clone()),
                Arc::new(self.prox_g.clone()),
                self.p(),
                self.d(),
            )),
            Arc::new(SaddleForward::new(self.coupling.clone())),
        )
    }
}

pub fn stacked_agents(problems: &[AgentSaddleProblem]) -> Vec<AgentInclusion> {
    problems.iter().map(AgentSaddleProblem::as_inclusion).collect()
}

/// Rows `(xᵢ, yᵢ)`.
pub fn stack_rows(x: &Matrix, y: &Matrix) -> Matrix {
    let (n, p) = x.shape();
    Matrix::from_fn(n, p + y.ncols(), |i, c| if c < p { x[(i, c)] } else { y[(i, c - p)] })
}

pub fn max_lipschitz(problems: &[AgentSaddleProblem]) -> f64 {
    problems.iter().map(AgentSaddleProblem::lipschitz).fold(0.0, f64::max)
}

/// `(1 + min(λ_min(W₁), λ_min(W₂))) / (4L)`.
pub fn stepsize_bound_minmax(bm: &BlockMixing, lipschitz: f64) -> Result<f64> {
    bound_from_lambda(bm.lambda_min(), lipschitz)
}

/// One block (`x` or `y`) of one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockState {
    pub u: Vector,
    pub z: Vector,
    pub prev_z: Vector,
    pub prev_wz: Vector,
    /// Signed partial gradient at the current point.
    pub g: Vector,
    pub v: Vector,
    pub prev_v: Vector,
}

impl BlockState {
    fn init(z0: &Vector, wz0: &Vector, g0: Vector, tau: f64, variant: InitVariant, prox: &Prox) -> (Vector, Vector, Vector) {
        let u = match variant {
            InitVariant::Default => z0 - &g0 * tau,
            InitVariant::Alt => wz0 - &g0 * tau,
        };
        let z = prox.apply(tau, &u);
        (u, z, g0)
    }

    fn next_u(&self, wz: &Vector, tau: f64) -> Vector {
        wz + &self.u - (&self.prev_z + &self.prev_wz) * 0.5 - (&self.v - &self.prev_v) * tau
    }
}

/// Agent-local state of both blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSaddleState {
    pub x: BlockState,
    pub y: BlockState,
}

fn signed_grads(problem: &AgentSaddleProblem, x: &Vector, y: &Vector) -> (Vector, Vector) {
    (problem.coupling.grad_x(x, y), -problem.coupling.grad_y(x, y))
}

impl LocalSaddleState {
    pub fn init(
        problem: &AgentSaddleProblem,
        tau: f64,
        (x0, y0): (&Vector, &Vector),
        (wx0, wy0): (Vector, Vector),
        variant: InitVariant,
    ) -> Self {
        let (gx0, gy0) = signed_grads(problem, x0, y0);
        let (ux, x, vx0) = BlockState::init(x0, &wx0, gx0, tau, variant, &problem.prox_f);
        let (uy, y, vy0) = BlockState::init(y0, &wy0, gy0, tau, variant, &problem.prox_g);
        let (gx, gy) = signed_grads(problem, &x, &y);
        let vx = &gx * 2.0 - &vx0;
        let vy = &gy * 2.0 - &vy0;
        LocalSaddleState {
            x: BlockState { u: ux, z: x, prev_z: x0.clone(), prev_wz: wx0, g: gx, v: vx, prev_v: vx0 },
            y: BlockState { u: uy, z: y, prev_z: y0.clone(), prev_wz: wy0, g: gy, v: vy, prev_v: vy0 },
        }
    }

    /// One iteration given the fresh mixes `Σⱼ w¹ᵢⱼxⱼ` and `Σⱼ w²ᵢⱼyⱼ`.
    pub fn advance(&self, problem: &AgentSaddleProblem, tau: f64, wx: Vector, wy: Vector) -> Self {
        let ux = self.x.next_u(&wx, tau);
        let uy = self.y.next_u(&wy, tau);
        let x = problem.prox_f.apply(tau, &ux);
        let y = problem.prox_g.apply(tau, &uy);
        let (gx, gy) = signed_grads(problem, &x, &y);
        let vx = &gx * 2.0 - &self.x.g;
        let vy = &gy * 2.0 - &self.y.g;
        LocalSaddleState {
            x: BlockState { u: ux, z: x, prev_z: self.x.z.clone(), prev_wz: wx, g: gx, v: vx, prev_v: self.x.v.clone() },
            y: BlockState { u: uy, z: y, prev_z: self.y.z.clone(), prev_wz: wy, g: gy, v: vy, prev_v: self.y.v.clone() },
        }
    }

    /// Cached gradients agree with fresh evaluations.
    pub fn is_coherent(&self, problem: &AgentSaddleProblem) -> bool {
        let (gx, gy) = signed_grads(problem, &self.x.z, &self.y.z);
        let (px, py) = signed_grads(problem, &self.x.prev_z, &self.y.prev_z);
        gx == self.x.g && gy == self.y.g && &gx * 2.0 - px == self.x.v && &gy * 2.0 - py == self.y.v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxState {
    pub agents: Vec<LocalSaddleState>,
}

impl MinMaxState {
    fn stack(&self, field: impl Fn(&LocalSaddleState) -> &Vector) -> Matrix {
        let n = self.agents.len();
        let h = self.agents.first().map_or(0, |a| field(a).len());
        Matrix::from_fn(n, h, |i, c| field(&self.agents[i])[c])
    }

    pub fn x(&self) -> Matrix {
        self.stack(|a| &a.x.z)
    }

    pub fn y(&self) -> Matrix {
        self.stack(|a| &a.y.z)
    }

    pub fn ux(&self) -> Matrix {
        self.stack(|a| &a.x.u)
    }

    pub fn uy(&self) -> Matrix {
        self.stack(|a| &a.y.u)
    }

    pub fn prev_x(&self) -> Matrix {
        self.stack(|a| &a.x.prev_z)
    }

    pub fn prev_y(&self) -> Matrix {
        self.stack(|a| &a.y.prev_z)
    }

    pub fn is_coherent(&self, problems: &[AgentSaddleProblem]) -> bool {
        self.agents.iter().zip(problems).all(|(s, p)| s.is_coherent(p))
    }
}

fn check_inputs(problems: &[AgentSaddleProblem], bm: &BlockMixing, x0: &Matrix, y0: &Matrix) -> Result<()> {
    let n = bm.agents();
    let mismatch = |context, expected, found| Err(Error::DimensionMismatch { context, expected, found });
    if problems.len() != n {
        return mismatch("agents vs mixing matrices", n, problems.len());
    }
    if x0.nrows() != n || y0.nrows() != n {
        return mismatch("rows of the starting point", n, x0.nrows().min(y0.nrows()));
    }
    for pr in problems {
        if pr.p() != x0.ncols() {
            return mismatch("x dimension", x0.ncols(), pr.p());
        }
        if pr.p() != bm.p {
            return mismatch("x block width of the mixing", bm.p, pr.p());
        }
        if pr.d() != y0.ncols() {
            return mismatch("y dimension", y0.ncols(), pr.d());
        }
    }
    Ok(())
}

fn mix_y(bm: &BlockMixing, i: usize, y: &Matrix, on_read: &mut dyn FnMut(NeighborRead)) -> Vector {
    bm.w2.mix_row(i, y, &mut |r| on_read(NeighborRead { block: 1, ..r }))
}

pub fn alg2_init_variant(
    problems: &[AgentSaddleProblem],
    bm: &BlockMixing,
    x0: &Matrix,
    y0: &Matrix,
    tau: f64,
    variant: InitVariant,
) -> Result<MinMaxState> {
    check_inputs(problems, bm, x0, y0)?;
    crate::inclusion::check_step(bm.lambda_min(), max_lipschitz(problems), tau)?;
    let agents = problems
        .iter()
        .enumerate()
        .map(|(i, pr)| {
            let wx0 = bm.w1.mix_row(i, x0, &mut |_| {});
            let wy0 = bm.w2.mix_row(i, y0, &mut |_| {});
            LocalSaddleState::init(pr, tau, (&x0.row(i).transpose(), &y0.row(i).transpose()), (wx0, wy0), variant)
        })
        .collect();
    Ok(MinMaxState { agents })
}

/// `u¹ₓ = x⁰ − τ∇ₓφ(x⁰, y⁰)`, `u¹ᵧ = y⁰ + τ∇ᵧφ(x⁰, y⁰)`, then one prox
/// per block.
pub fn alg2_init(problems: &[AgentSaddleProblem], bm: &BlockMixing, x0: &Matrix, y0: &Matrix, tau: f64) -> Result<MinMaxState> {
    alg2_init_variant(problems, bm, x0, y0, tau, InitVariant::Default)
}

/// One iteration, agents computed in parallel.
pub fn alg2_step(problems: &[AgentSaddleProblem], bm: &BlockMixing, state: &MinMaxState, tau: f64) -> MinMaxState {
    let (x, y) = (state.x(), state.y());
    let agents = (0..problems.len())
        .into_par_iter()
        .map(|i| {
            let wx = bm.w1.mix_row(i, &x, &mut |_| {});
            let wy = bm.w2.mix_row(i, &y, &mut |_| {});
            state.agents[i].advance(&problems[i], tau, wx, wy)
        })
        .collect();
    MinMaxState { agents }
}

/// One iteration, sequential, reporting every neighbor read. `x` reads
/// are block 0, `y` reads block 1.
pub fn alg2_step_audited(
    problems: &[AgentSaddleProblem],
    bm: &BlockMixing,
    state: &MinMaxState,
    tau: f64,
    on_read: &mut dyn FnMut(NeighborRead),
) -> MinMaxState {
    let (x, y) = (state.x(), state.y());
    let agents = (0..problems.len())
        .map(|i| {
            let wx = bm.w1.mix_row(i, &x, on_read);
            let wy = mix_y(bm, i, &y, on_read);
            state.agents[i].advance(&problems[i], tau, wx, wy)
        })
        .collect();
    MinMaxState { agents }
}

#[derive(Debug, Clone)]
pub struct Alg2Outcome {
    pub state: MinMaxState,
    pub trace: ConvergenceTrace,
    /// Row means of the final iterate.
    pub x_star: Vector,
    pub y_star: Vector,
}

impl Alg2Outcome {
    pub fn converged(&self) -> bool {
        self.trace.converged()
    }

    pub fn consensus_gaps(&self) -> (f64, f64) {
        (consensus_gap(&self.state.x()), consensus_gap(&self.state.y()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alg2Options {
    pub variant: InitVariant,
    pub stop: StoppingRule,
    pub trace_every: usize,
}

impl Default for Alg2Options {
    fn default() -> Self {
        Alg2Options { variant: InitVariant::Default, stop: StoppingRule::default(), trace_every: 1 }
    }
}

fn trace_row(k: usize, state: &MinMaxState, reference: Option<(&Vector, &Vector)>, messages: u64) -> TraceRow {
    let (x, y) = (state.x(), state.y());
    let residual = ((&x - state.prev_x()).norm_squared() + (&y - state.prev_y()).norm_squared()).sqrt();
    TraceRow {
        iteration: k,
        fp_residual: residual,
        consensus_gap_x: consensus_gap(&x),
        consensus_gap_y: Some(consensus_gap(&y)),
        distance_to_reference: reference.map(|(rx, ry)| {
            let r = Vector::from_iterator(rx.len() + ry.len(), rx.iter().chain(ry.iter()).copied());
            distance_to_point(&stack_rows(&x, &y), &r)
        }),
        messages_cum: messages,
    }
}

/// Runs until `‖(x, y)ᵏ⁺¹ − (x, y)ᵏ‖_F ≤ tol` and the auxiliary `u` of both
/// blocks moves by at most `tol`, or the budget is spent.
/// Non-convergence is reported through the trace, not as an error.
pub fn alg2_run(
    problems: &[AgentSaddleProblem],
    bm: &BlockMixing,
    x0: &Matrix,
    y0: &Matrix,
    tau: f64,
    opts: Alg2Options,
    reference: Option<(&Vector, &Vector)>,
) -> Result<Alg2Outcome> {
    let per_round = crate::inclusion::messages_per_round(bm);
    let mut state = alg2_init_variant(problems, bm, x0, y0, tau, opts.variant)?;
    let mut trace = ConvergenceTrace::new(opts.trace_every);
    let mut k = 1;
    let mut last = trace_row(k, &state, reference, per_round);
    trace.offer(last);
    let mut drift = f64::INFINITY;
    let termination = loop {
        if !last.fp_residual.is_finite() {
            break Termination::Diverged;
        }
        if last.fp_residual <= opts.stop.tol && drift <= opts.stop.tol {
            break Termination::Converged;
        }
        if k >= opts.stop.max_iters {
            break Termination::BudgetExhausted;
        }
        let (prev_ux, prev_uy) = (state.ux(), state.uy());
        state = alg2_step(problems, bm, &state, tau);
        drift = ((state.ux() - prev_ux).norm_squared() + (state.uy() - prev_uy).norm_squared()).sqrt();
        k += 1;
        last = trace_row(k, &state, reference, per_round * k as u64);
        trace.offer(last);
    };
    trace.finish(Some(last), termination, k);
    let x_star = state.x().row_mean().transpose();
    let y_star = state.y().row_mean().transpose();
    Ok(Alg2Outcome { state, trace, x_star, y_star })
}

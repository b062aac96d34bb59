//! Decentralized solver for `0 ∈ Σᵢ (Aᵢ + Bᵢ)(x)`: each agent holds a
//! resolvent of `Aᵢ` and a forward evaluation of `Bᵢ` and talks only to its
//! neighbors through a mixing matrix.
//!
//! Per agent, with `vᵏ = 2B(xᵏ) − B(xᵏ⁻¹)` and `v⁰ = B(x⁰)`:
//!
//! ```text
//! u¹     = x⁰ − τv⁰                    (or Wx⁰ − τv⁰)
//! uᵏ⁺¹   = Σⱼ wᵢⱼxⱼᵏ + uᵏ − ½(xᵏ⁻¹ + Σⱼ wᵢⱼxⱼᵏ⁻¹) − τ(vᵏ − vᵏ⁻¹)
//! xᵏ⁺¹   = J_{τA}(uᵏ⁺¹)
//! ```

mod oracle;

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::mixing::{Mixer, NeighborRead};
use crate::operators::{ForwardOperator, Resolvent};
use crate::trace::{ConvergenceTrace, StoppingRule, Termination, TraceRow};

pub use oracle::{oracle_pdtr, oracle_problem, StackedForward, StackedResolvent};

/// One agent's share of the inclusion.
#[derive(Debug, Clone)]
pub struct AgentInclusion {
    pub resolvent: Arc<dyn Resolvent>,
    pub forward: Arc<dyn ForwardOperator>,
}

impl AgentInclusion {
    pub fn new(resolvent: Arc<dyn Resolvent>, forward: Arc<dyn ForwardOperator>) -> Self {
        AgentInclusion { resolvent, forward }
    }

    pub fn lipschitz(&self) -> f64 {
        self.forward.lipschitz()
    }
}

/// Largest per-agent Lipschitz constant.
pub fn max_lipschitz(agents: &[AgentInclusion]) -> f64 {
    agents.iter().map(AgentInclusion::lipschitz).fold(0.0, f64::max)
}

/// `(1 + λ_min(W)) / (4L)`.
pub fn stepsize_bound(w: &(impl Mixer + ?Sized), lipschitz: f64) -> Result<f64> {
    bound_from_lambda(w.lambda_min(), lipschitz)
}

pub fn bound_from_lambda(lambda_min: f64, lipschitz: f64) -> Result<f64> {
    if !(lipschitz > 0.0) {
        return Err(Error::NonPositiveLipschitz(lipschitz));
    }
    Ok((1.0 + lambda_min) / (4.0 * lipschitz))
}

/// Open-interval step check. With every `Bᵢ` constant (`L = 0`) any
/// positive step is admissible.
pub fn check_step(lambda_min: f64, lipschitz: f64, tau: f64) -> Result<()> {
    let bound = if lipschitz > 0.0 { bound_from_lambda(lambda_min, lipschitz)? } else { f64::INFINITY };
    if tau > 0.0 && tau < bound {
        Ok(())
    } else {
        Err(Error::InadmissibleStep(format!(
            "step size exceeds (1+λ_min)/(4L): tau = {tau}, bound = {bound} (λ_min = {lambda_min}, L = {lipschitz})"
        )))
    }
}

/// Which first step to take.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum InitVariant {
    /// `u¹ = x⁰ − τB(x⁰)`.
    #[default]
    Default,
    /// `u¹ = Wx⁰ − τB(x⁰)`.
    Alt,
}

/// What agent `i` keeps between rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalState {
    pub u: Vector,
    pub x: Vector,
    pub prev_x: Vector,
    /// `Σⱼ wᵢⱼ xⱼᵏ⁻¹`, retained from the previous exchange.
    pub prev_wx: Vector,
    /// `B(xᵏ)`.
    pub bx: Vector,
    /// `vᵏ = 2B(xᵏ) − B(xᵏ⁻¹)`.
    pub v: Vector,
    pub prev_v: Vector,
}

impl LocalState {
    /// First step from `x⁰`, given `Σⱼ wᵢⱼ xⱼ⁰`.
    pub fn init(agent: &AgentInclusion, tau: f64, x0: &Vector, wx0: Vector, variant: InitVariant) -> Self {
        let v0 = agent.forward.apply(x0);
        let u = match variant {
            InitVariant::Default => x0 - &v0 * tau,
            InitVariant::Alt => &wx0 - &v0 * tau,
        };
        let x = agent.resolvent.apply(tau, &u);
        let bx = agent.forward.apply(&x);
        let v = &bx * 2.0 - &v0;
        LocalState { u, x, prev_x: x0.clone(), prev_wx: wx0, bx, v, prev_v: v0 }
    }

    /// One iteration given the fresh neighbor mix `Σⱼ wᵢⱼ xⱼᵏ`.
    pub fn advance(&self, agent: &AgentInclusion, tau: f64, wx: Vector) -> Self {
        let u = &wx + &self.u - (&self.prev_x + &self.prev_wx) * 0.5 - (&self.v - &self.prev_v) * tau;
        let x = agent.resolvent.apply(tau, &u);
        let bx = agent.forward.apply(&x);
        let v = &bx * 2.0 - &self.bx;
        LocalState { u, x, prev_x: self.x.clone(), prev_wx: wx, bx, v, prev_v: self.v.clone() }
    }

    /// `v` and `bx` agree with fresh evaluations at `x` and `prev_x`.
    pub fn is_coherent(&self, agent: &AgentInclusion) -> bool {
        let bx = agent.forward.apply(&self.x);
        let v = &bx * 2.0 - agent.forward.apply(&self.prev_x);
        bx == self.bx && v == self.v
    }
}

/// Stacked iterate of all agents; row `i` of each matrix is agent `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedIterate {
    pub agents: Vec<LocalState>,
}

impl StackedIterate {
    fn stack(&self, field: impl Fn(&LocalState) -> &Vector) -> Matrix {
        let n = self.agents.len();
        let h = self.agents.first().map_or(0, |a| a.x.len());
        Matrix::from_fn(n, h, |i, c| field(&self.agents[i])[c])
    }

    pub fn x(&self) -> Matrix {
        self.stack(|a| &a.x)
    }

    pub fn u(&self) -> Matrix {
        self.stack(|a| &a.u)
    }

    pub fn prev_x(&self) -> Matrix {
        self.stack(|a| &a.prev_x)
    }

    pub fn v(&self) -> Matrix {
        self.stack(|a| &a.v)
    }

    pub fn prev_v(&self) -> Matrix {
        self.stack(|a| &a.prev_v)
    }

    pub fn is_coherent(&self, agents: &[AgentInclusion]) -> bool {
        self.agents.iter().zip(agents).all(|(s, a)| s.is_coherent(a))
    }
}

pub(crate) fn check_shapes(agents: &[AgentInclusion], w: &(impl Mixer + ?Sized), x0: &Matrix) -> Result<()> {
    if agents.len() != w.agents() {
        return Err(Error::DimensionMismatch { context: "agents vs mixing matrix", expected: w.agents(), found: agents.len() });
    }
    if x0.nrows() != agents.len() {
        return Err(Error::DimensionMismatch { context: "rows of x0", expected: agents.len(), found: x0.nrows() });
    }
    Ok(())
}

fn init_with(
    agents: &[AgentInclusion],
    w: &(impl Mixer + ?Sized),
    x0: &Matrix,
    tau: f64,
    variant: InitVariant,
) -> Result<StackedIterate> {
    check_shapes(agents, w, x0)?;
    check_step(w.lambda_min(), max_lipschitz(agents), tau)?;
    let states = agents
        .iter()
        .enumerate()
        .map(|(i, agent)| {
            let wx0 = w.mix_row(i, x0, &mut |_| {});
            LocalState::init(agent, tau, &x0.row(i).transpose(), wx0, variant)
        })
        .collect();
    Ok(StackedIterate { agents: states })
}

/// `u¹ = x⁰ − τB(x⁰)`, `x¹ = J_{τA}(u¹)` row-wise.
pub fn alg1_init(agents: &[AgentInclusion], w: &(impl Mixer + ?Sized), x0: &Matrix, tau: f64) -> Result<StackedIterate> {
    init_with(agents, w, x0, tau, InitVariant::Default)
}

/// `u¹ = Wx⁰ − τB(x⁰)`, `x¹ = J_{τA}(u¹)` row-wise.
pub fn alg1_init_alt(agents: &[AgentInclusion], w: &(impl Mixer + ?Sized), x0: &Matrix, tau: f64) -> Result<StackedIterate> {
    init_with(agents, w, x0, tau, InitVariant::Alt)
}

pub fn alg1_init_variant(
    agents: &[AgentInclusion],
    w: &(impl Mixer + ?Sized),
    x0: &Matrix,
    tau: f64,
    variant: InitVariant,
) -> Result<StackedIterate> {
    init_with(agents, w, x0, tau, variant)
}

/// One iteration, agents computed in parallel.
pub fn alg1_step(agents: &[AgentInclusion], w: &(impl Mixer + ?Sized), state: &StackedIterate, tau: f64) -> StackedIterate {
    let x = state.x();
    let next = (0..agents.len())
        .into_par_iter()
        .map(|i| state.agents[i].advance(&agents[i], tau, w.mix_row(i, &x, &mut |_| {})))
        .collect();
    StackedIterate { agents: next }
}

/// One iteration, sequential, reporting every neighbor row read.
pub fn alg1_step_audited(
    agents: &[AgentInclusion],
    w: &(impl Mixer + ?Sized),
    state: &StackedIterate,
    tau: f64,
    on_read: &mut dyn FnMut(NeighborRead),
) -> StackedIterate {
    let x = state.x();
    let next = (0..agents.len()).map(|i| state.agents[i].advance(&agents[i], tau, w.mix_row(i, &x, on_read))).collect();
    StackedIterate { agents: next }
}

/// `max_i ‖zᵢ − z̄‖₂` over the rows of `z`.
pub fn consensus_gap(z: &Matrix) -> f64 {
    if z.nrows() == 0 {
        return 0.0;
    }
    let mean = z.row_mean();
    z.row_iter().map(|r| (r - &mean).norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsensusReport {
    pub consensus_gap: f64,
    /// `‖xᵏ⁺¹ − xᵏ‖_F`.
    pub fp_residual: f64,
    pub distance_to_reference: Option<f64>,
}

impl ConsensusReport {
    pub fn of(state: &StackedIterate, reference: Option<&Vector>) -> Self {
        let x = state.x();
        ConsensusReport {
            consensus_gap: consensus_gap(&x),
            fp_residual: (&x - state.prev_x()).norm(),
            distance_to_reference: reference.map(|r| distance_to_point(&x, r)),
        }
    }
}

/// `max_i ‖xᵢ − r‖₂`.
pub fn distance_to_point(x: &Matrix, r: &Vector) -> f64 {
    x.row_iter().map(|row| (row.transpose() - r).norm()).fold(0.0, f64::max)
}

/// Messages per round when every block sends one vector along each edge in
/// both directions.
pub fn messages_per_round(w: &(impl Mixer + ?Sized)) -> u64 {
    w.block_graphs().iter().map(|g| 2 * g.edge_count() as u64).sum()
}

#[derive(Debug, Clone)]
pub struct Alg1Outcome {
    pub state: StackedIterate,
    pub trace: ConvergenceTrace,
    pub report: ConsensusReport,
}

impl Alg1Outcome {
    /// Row mean of the final iterate.
    pub fn consensus_point(&self) -> Vector {
        self.state.x().row_mean().transpose()
    }
}

/// Runs until `‖xᵏ⁺¹ − xᵏ‖_F ≤ tol` and `‖uᵏ⁺¹ − uᵏ‖_F ≤ tol`, or
/// `max_iters` iterations (the first step counts as iteration 1). The trace
/// records only the `x` part.
pub fn alg1_run(
    agents: &[AgentInclusion],
    w: &(impl Mixer + ?Sized),
    x0: &Matrix,
    tau: f64,
    variant: InitVariant,
    stop: StoppingRule,
    trace_every: usize,
    reference: Option<&Vector>,
) -> Result<Alg1Outcome> {
    let per_round = messages_per_round(w);
    let mut state = init_with(agents, w, x0, tau, variant)?;
    let mut trace = ConvergenceTrace::new(trace_every);
    let mut k = 1;
    let make_row = |k: usize, report: &ConsensusReport| TraceRow {
        iteration: k,
        fp_residual: report.fp_residual,
        consensus_gap_x: report.consensus_gap,
        consensus_gap_y: None,
        distance_to_reference: report.distance_to_reference,
        messages_cum: per_round * k as u64,
    };
    let mut report = ConsensusReport::of(&state, reference);
    let mut last = make_row(k, &report);
    trace.offer(last);
    let mut drift = f64::INFINITY;
    let termination = loop {
        if !report.fp_residual.is_finite() {
            break Termination::Diverged;
        }
        if report.fp_residual <= stop.tol && drift <= stop.tol {
            break Termination::Converged;
        }
        if k >= stop.max_iters {
            break Termination::BudgetExhausted;
        }
        let prev_u = state.u();
        state = alg1_step(agents, w, &state, tau);
        drift = (state.u() - prev_u).norm();
        k += 1;
        report = ConsensusReport::of(&state, reference);
        last = make_row(k, &report);
        trace.offer(last);
    };
    trace.finish(Some(last), termination, k);
    Ok(Alg1Outcome { state, trace, report })
}

/// The `x` iterates `x¹, …, x^iterations` of the agent-local recursion.
pub fn alg1_sequence(
    agents: &[AgentInclusion],
    w: &(impl Mixer + ?Sized),
    x0: &Matrix,
    tau: f64,
    variant: InitVariant,
    iterations: usize,
) -> Result<Vec<Matrix>> {
    let mut out = Vec::with_capacity(iterations);
    if iterations == 0 {
        return Ok(out);
    }
    let mut state = init_with(agents, w, x0, tau, variant)?;
    out.push(state.x());
    for _ in 1..iterations {
        state = alg1_step(agents, w, &state, tau);
        out.push(state.x());
    }
    Ok(out)
}

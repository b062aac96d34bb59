//! Explicit product-space form of the decentralized recursion: PDTR on
//! `0 ∈ (A + B)x + K N_{0}(Kx)` with `K = ((I − W)/2)^{½} ⊗ I_h` and
//! `σ = 1/τ`. Only used to check the agent-local form.

use std::sync::Arc;

use super::{AgentInclusion, InitVariant};
use crate::error::{Error, Result};
use crate::linalg::{kron_identity, psd_sqrt, unflatten_rows, flatten_rows, Matrix, Vector};
use crate::mixing::MixingMatrix;
use crate::operators::{ForwardOperator, Prox, Resolvent};
use crate::pdtr::{pdtr_step, PdtrState, PrimalDualProblem, StepSizes};

/// Agent resolvents applied block-wise to a row-major stacked vector.
#[derive(Debug, Clone)]
pub struct StackedResolvent {
    pub parts: Vec<Arc<dyn Resolvent>>,
    pub h: usize,
}

impl Resolvent for StackedResolvent {
    fn apply(&self, tau: f64, point: &Vector) -> Vector {
        let mut out = Vector::zeros(point.len());
        for (i, part) in self.parts.iter().enumerate() {
            let block = point.rows(i * self.h, self.h).into_owned();
            out.rows_mut(i * self.h, self.h).copy_from(&part.apply(tau, &block));
        }
        out
    }
}

/// Agent forward operators applied block-wise.
#[derive(Debug, Clone)]
pub struct StackedForward {
    pub parts: Vec<Arc<dyn ForwardOperator>>,
    pub h: usize,
}

impl ForwardOperator for StackedForward {
    fn apply(&self, z: &Vector) -> Vector {
        let mut out = Vector::zeros(z.len());
        for (i, part) in self.parts.iter().enumerate() {
            let block = z.rows(i * self.h, self.h).into_owned();
            out.rows_mut(i * self.h, self.h).copy_from(&part.apply(&block));
        }
        out
    }

    fn lipschitz(&self) -> f64 {
        self.parts.iter().map(|p| p.lipschitz()).fold(0.0, f64::max)
    }
}

/// The product-space problem and its `K`.
pub fn oracle_problem(agents: &[AgentInclusion], w: &MixingMatrix, h: usize) -> Result<PrimalDualProblem> {
    let n = w.n();
    if agents.len() != n {
        return Err(Error::DimensionMismatch { context: "agents vs mixing matrix", expected: n, found: agents.len() });
    }
    let half_gap = (Matrix::identity(n, n) - w.matrix()) * 0.5;
    let root = psd_sqrt(&half_gap, 1e-10).ok_or(Error::NotPositiveSemidefinite)?;
    let k = kron_identity(&root, h);
    Ok(PrimalDualProblem::new(
        Arc::new(StackedResolvent { parts: agents.iter().map(|a| a.resolvent.clone()).collect(), h }),
        Arc::new(StackedForward { parts: agents.iter().map(|a| a.forward.clone()).collect(), h }),
        // C = N_{0}, so C⁻¹ = 0 and its resolvent is the identity.
        Arc::new(Prox::Zero),
        k,
    ))
}

/// `x¹, …, x^iterations` of PDTR on the product space, started from
/// `y⁰ = 0` (default) or `y⁰ = 2τ⁻¹Kx⁰` (alternative).
pub fn oracle_pdtr(
    agents: &[AgentInclusion],
    w: &MixingMatrix,
    x0: &Matrix,
    tau: f64,
    variant: InitVariant,
    iterations: usize,
) -> Result<Vec<Matrix>> {
    let (n, h) = x0.shape();
    super::check_shapes(agents, w, x0)?;
    super::check_step(crate::mixing::Mixer::lambda_min(w), super::max_lipschitz(agents), tau)?;
    let problem = oracle_problem(agents, w, h)?;
    let x_flat = flatten_rows(x0);
    let y0 = match variant {
        InitVariant::Default => Vector::zeros(n * h),
        InitVariant::Alt => problem.k() * &x_flat * (2.0 / tau),
    };
    let steps = StepSizes::new(tau, 1.0 / tau);
    let mut state = PdtrState::new(&problem, x_flat, y0)?;
    let mut out = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        state = pdtr_step(&problem, &state, steps);
        out.push(unflatten_rows(&state.x, n, h));
    }
    Ok(out)
}

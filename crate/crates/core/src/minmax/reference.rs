//! Centralized references for checking decentralized limits.

use std::sync::Arc;

use super::AgentSaddleProblem;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::operators::{sum_prox, ProductResolvent, Prox, SaddleForward, SmoothCoupling};
use crate::pdtr::{solve, Method, PdtrState, PrimalDualProblem, RunOptions, StepSizes};
use crate::trace::{ConvergenceTrace, StoppingRule};

/// `min_x max_y (Σfᵢ)(x) + (Σφᵢ)(x, y) − (Σgᵢ)(y)`.
#[derive(Debug, Clone)]
pub struct SummedProblem {
    pub prox_f: Prox,
    pub prox_g: Prox,
    pub coupling: Arc<SmoothCoupling>,
}

impl SummedProblem {
    pub fn p(&self) -> usize {
        self.coupling.p()
    }

    pub fn d(&self) -> usize {
        self.coupling.d()
    }

    /// The inclusion `0 ∈ (∂f × ∂g)(z) + B(z)` as a primal-dual problem
    /// with an empty dual space.
    pub fn as_primal_dual(&self) -> PrimalDualProblem {
        let (p, d) = (self.p(), self.d());
        PrimalDualProblem::new(
            Arc::new(ProductResolvent::new(Arc::new(self.prox_f.clone()), Arc::new(self.prox_g.clone()), p, d)),
            Arc::new(SaddleForward::new(self.coupling.clone())),
            Arc::new(Prox::Zero),
            Matrix::zeros(0, p + d),
        )
    }
}

pub fn summed_problem(problems: &[AgentSaddleProblem]) -> Result<SummedProblem> {
    let fs: Vec<Prox> = problems.iter().map(|p| p.prox_f.clone()).collect();
    let gs: Vec<Prox> = problems.iter().map(|p| p.prox_g.clone()).collect();
    Ok(SummedProblem {
        prox_f: sum_prox(&fs)?,
        prox_g: sum_prox(&gs)?,
        coupling: Arc::new(SmoothCoupling::sum(problems.iter().map(|p| p.coupling.as_ref()))?),
    })
}

fn join(x: &Vector, y: &Vector) -> Vector {
    Vector::from_iterator(x.len() + y.len(), x.iter().chain(y.iter()).copied())
}

/// Forward-reflected-backward on the summed problem with
/// `τ = safety / (2L)` (or `τ = 1` when `L = 0`).
pub fn centralized_forb(
    summed: &SummedProblem,
    x0: &Vector,
    y0: &Vector,
    safety: f64,
    stop: StoppingRule,
) -> Result<(Vector, Vector, ConvergenceTrace)> {
    let problem = summed.as_primal_dual();
    let steps = StepSizes::auto(problem.lipschitz(), 0.0, safety)?;
    let init = PdtrState::new(&problem, join(x0, y0), Vector::zeros(0))?;
    let sol = solve(&problem, Method::Forb, init, steps, &RunOptions::with_stop(stop))?;
    let p = summed.p();
    let x = sol.state.x.rows(0, p).into_owned();
    let y = sol.state.x.rows(p, summed.d()).into_owned();
    Ok((x, y, sol.trace))
}

/// `‖J_{τA}(z − τB(z)) − z‖₂`: zero exactly at saddle points.
pub fn forb_residual(summed: &SummedProblem, x: &Vector, y: &Vector, tau: f64) -> f64 {
    let problem = summed.as_primal_dual();
    let z = join(x, y);
    let step = problem.resolvent_a.apply(tau, &(&z - problem.forward_b.apply(&z) * tau));
    (step - z).norm()
}

/// Saddle point of a sum of bilinear couplings with `f = g = 0`, from the
/// stationarity system `Σ(Mᵢy + aᵢ) = 0`, `Σ(Mᵢᵀx − bᵢ) = 0`.
pub fn kkt_bilinear(problems: &[AgentSaddleProblem]) -> Result<(Vector, Vector)> {
    let unsupported = |msg: &str| Error::Unsupported(format!("KKT solve: {msg}"));
    for pr in problems {
        if pr.prox_f != Prox::Zero || pr.prox_g != Prox::Zero {
            return Err(unsupported("needs f = g = 0"));
        }
        let (pm, rm) = pr.coupling.curvature();
        if pm.amax() != 0.0 || rm.amax() != 0.0 {
            return Err(unsupported("needs bilinear couplings"));
        }
    }
    let total = SmoothCoupling::sum(problems.iter().map(|p| p.coupling.as_ref()))?;
    let m = total.coupling_matrix();
    let (a, b) = total.linear_terms();
    let y = m.clone().svd(true, true).solve(&(-a), 1e-12).map_err(|e| unsupported(e))?;
    let x = m.transpose().svd(true, true).solve(b, 1e-12).map_err(|e| unsupported(e))?;
    let scale = 1.0 + m.amax();
    if (m * &y + a).amax() > 1e-9 * scale || (m.tr_mul(&x) - b).amax() > 1e-9 * scale {
        return Err(unsupported("stationarity system has no solution"));
    }
    Ok((x, y))
}

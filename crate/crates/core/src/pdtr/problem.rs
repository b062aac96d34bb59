use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, Matrix, Vector};
use crate::operators::{ForwardOperator, Resolvent};

/// Primal-dual inclusion data. `C` enters only through `J_{σC⁻¹}`; wrap a
/// resolvent of `C` in [`crate::operators::InverseResolvent`] if that is
/// what is available.
#[derive(Debug, Clone)]
pub struct PrimalDualProblem {
    pub resolvent_a: Arc<dyn Resolvent>,
    pub forward_b: Arc<dyn ForwardOperator>,
    pub resolvent_c_inv: Arc<dyn Resolvent>,
    k: Matrix,
    k_norm: f64,
}

impl PrimalDualProblem {
    pub fn new(
        resolvent_a: Arc<dyn Resolvent>,
        forward_b: Arc<dyn ForwardOperator>,
        resolvent_c_inv: Arc<dyn Resolvent>,
        k: Matrix,
    ) -> Self {
        let k_norm = spectral_norm(&k);
        PrimalDualProblem { resolvent_a, forward_b, resolvent_c_inv, k, k_norm }
    }

    pub fn k(&self) -> &Matrix {
        &self.k
    }

    pub fn k_norm(&self) -> f64 {
        self.k_norm
    }

    pub fn lipschitz(&self) -> f64 {
        self.forward_b.lipschitz()
    }

    pub fn primal_dim(&self) -> usize {
        self.k.ncols()
    }

    pub fn dual_dim(&self) -> usize {
        self.k.nrows()
    }

    /// Same problem with `B` replaced.
    pub fn with_forward(&self, forward_b: Arc<dyn ForwardOperator>) -> Self {
        PrimalDualProblem { forward_b, ..self.clone() }
    }

    /// Same problem with `K` replaced.
    pub fn with_k(&self, k: Matrix) -> Self {
        Self::new(self.resolvent_a.clone(), self.forward_b.clone(), self.resolvent_c_inv.clone(), k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSizes {
    pub tau: f64,
    pub sigma: f64,
}

impl StepSizes {
    pub fn new(tau: f64, sigma: f64) -> Self {
        StepSizes { tau, sigma }
    }

    /// `2τL + τσ‖K‖²`; the method converges when this is below one.
    pub fn pdtr_load(&self, lipschitz: f64, k_norm: f64) -> f64 {
        2.0 * self.tau * lipschitz + self.tau * self.sigma * k_norm * k_norm
    }

    pub fn is_pdtr_admissible(&self, lipschitz: f64, k_norm: f64) -> bool {
        self.tau > 0.0 && self.sigma > 0.0 && self.pdtr_load(lipschitz, k_norm) < 1.0
    }

    pub fn check_pdtr(&self, lipschitz: f64, k_norm: f64) -> Result<()> {
        if self.is_pdtr_admissible(lipschitz, k_norm) {
            Ok(())
        } else {
            Err(Error::InadmissibleStep(format!(
                "2*tau*L + tau*sigma*|K|^2 = {} must be < 1 (tau = {}, sigma = {})",
                self.pdtr_load(lipschitz, k_norm),
                self.tau,
                self.sigma
            )))
        }
    }

    /// Deterministic default with `τ = σ` and `2τL + τ²‖K‖² = safety`.
    ///
    /// With `K = 0` this is `τ = safety / (2L)`; with `L = 0 = ‖K‖` both
    /// steps are one.
    pub fn auto(lipschitz: f64, k_norm: f64, safety: f64) -> Result<Self> {
        if !(safety > 0.0 && safety < 1.0) {
            return Err(Error::InadmissibleStep(format!("safety factor {safety} must lie in (0, 1)")));
        }
        let k2 = k_norm * k_norm;
        let tau = if k2 == 0.0 {
            if lipschitz > 0.0 {
                safety / (2.0 * lipschitz)
            } else {
                1.0
            }
        } else {
            (-lipschitz + (lipschitz * lipschitz + safety * k2).sqrt()) / k2
        };
        Ok(StepSizes { tau, sigma: tau })
    }
}

/// Iterate of the primal-dual methods with the one-step history needed by
/// the reflected forward term.
#[derive(Debug, Clone, PartialEq)]
pub struct PdtrState {
    pub x: Vector,
    pub y: Vector,
    pub prev_x: Vector,
    /// `B(prev_x)`.
    pub prev_bx: Vector,
}

impl PdtrState {
    /// Starts from `x⁻¹ = x⁰`.
    pub fn new(problem: &PrimalDualProblem, x0: Vector, y0: Vector) -> Result<Self> {
        if x0.len() != problem.primal_dim() {
            return Err(Error::DimensionMismatch { context: "primal start", expected: problem.primal_dim(), found: x0.len() });
        }
        if y0.len() != problem.dual_dim() {
            return Err(Error::DimensionMismatch { context: "dual start", expected: problem.dual_dim(), found: y0.len() });
        }
        let prev_bx = problem.forward_b.apply(&x0);
        Ok(PdtrState { prev_x: x0.clone(), x: x0, y: y0, prev_bx })
    }

    /// `max(‖x − x'‖∞, ‖y − y'‖∞, ‖x⁻ − x'⁻‖∞)`. The reflected term makes
    /// `x⁻` part of the iterate: two equal consecutive `(x, y)` are not a
    /// fixed point unless `x⁻` also agrees.
    pub fn distance_inf(&self, other: &PdtrState) -> f64 {
        (&self.x - &other.x).amax().max((&self.y - &other.y).amax()).max((&self.prev_x - &other.prev_x).amax())
    }
}

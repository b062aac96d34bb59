use nalgebra::Cholesky;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PrimalDualProblem, StepSizes};
use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, Matrix, Vector};

/// Inner product `⟨z, z̄⟩_M` with `M = [[I/τ, −Kᵀ], [−K, I/σ]]` on
/// `H × H'`, positive definite when `τσ‖K‖² < 1`.
#[derive(Debug, Clone)]
pub struct MMetric {
    m: Matrix,
    chol: Cholesky<f64, nalgebra::Dyn>,
}

impl MMetric {
    pub fn new(steps: StepSizes, k: &Matrix) -> Result<Self> {
        let load = steps.tau * steps.sigma * spectral_norm(k).powi(2);
        if !(steps.tau > 0.0 && steps.sigma > 0.0 && load < 1.0) {
            return Err(Error::MetricNotPositiveDefinite(load));
        }
        let (h2, h) = k.shape();
        let mut m = Matrix::zeros(h + h2, h + h2);
        m.view_mut((0, 0), (h, h)).fill_with_identity();
        m.view_mut((0, 0), (h, h)).scale_mut(1.0 / steps.tau);
        m.view_mut((h, h), (h2, h2)).fill_with_identity();
        m.view_mut((h, h), (h2, h2)).scale_mut(1.0 / steps.sigma);
        m.view_mut((0, h), (h, h2)).copy_from(&(-k.transpose()));
        m.view_mut((h, 0), (h2, h)).copy_from(&(-k));
        let chol = Cholesky::new(m.clone()).ok_or(Error::MetricNotPositiveDefinite(load))?;
        Ok(MMetric { m, chol })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn inner(&self, z: &Vector, zb: &Vector) -> f64 {
        z.dot(&(&self.m * zb))
    }

    pub fn norm(&self, z: &Vector) -> f64 {
        self.inner(z, z).max(0.0).sqrt()
    }

    /// `M⁻¹ r`.
    pub fn solve(&self, r: &Vector) -> Vector {
        self.chol.solve(r)
    }
}

/// `τL / (1 − τσ‖K‖²)`: Lipschitz constant of `M⁻¹F` in the `M`-norm,
/// where `F(x, y) = (B(x), 0)`.
pub fn metric_lipschitz_bound(steps: StepSizes, lipschitz: f64, k_norm: f64) -> f64 {
    steps.tau * lipschitz / (1.0 - steps.tau * steps.sigma * k_norm * k_norm)
}

/// Largest observed `‖M⁻¹F(z) − M⁻¹F(z̄)‖_M / ‖z − z̄‖_M` over `samples`
/// random pairs drawn uniformly from `[-scale, scale]`.
pub fn sample_metric_lipschitz(
    problem: &PrimalDualProblem,
    steps: StepSizes,
    samples: usize,
    scale: f64,
    seed: u64,
) -> Result<f64> {
    steps.check_pdtr(problem.lipschitz(), problem.k_norm())?;
    let metric = MMetric::new(steps, problem.k())?;
    let (h, h2) = (problem.primal_dim(), problem.dual_dim());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |len: usize| Vector::from_fn(len, |_, _| rng.random_range(-scale..scale));
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let (x, y, xb, yb) = (draw(h), draw(h2), draw(h), draw(h2));
        let mut diff_f = Vector::zeros(h + h2);
        diff_f.rows_mut(0, h).copy_from(&(problem.forward_b.apply(&x) - problem.forward_b.apply(&xb)));
        let mut dz = Vector::zeros(h + h2);
        dz.rows_mut(0, h).copy_from(&(&x - &xb));
        dz.rows_mut(h, h2).copy_from(&(&y - &yb));
        let denom = metric.norm(&dz);
        if denom == 0.0 {
            continue;
        }
        // ‖M⁻¹d‖_M² = dᵀM⁻¹d
        let num = diff_f.dot(&metric.solve(&diff_f)).max(0.0).sqrt();
        worst = worst.max(num / denom);
    }
    Ok(worst)
}

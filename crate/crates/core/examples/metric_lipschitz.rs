//! Sample the Lipschitz ratio of M⁻¹F in the M-metric and compare it with
//! τL/(1 − τσ‖K‖²).

use std::sync::Arc;

use dminmax::linalg::{spectral_norm, Matrix, Vector};
use dminmax::operators::{Prox, SaddleForward, SmoothCoupling};
use dminmax::pdtr::{sample_metric_lipschitz, metric_lipschitz_bound, PrimalDualProblem, StepSizes};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> dminmax::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for trial in 0..5 {
        let (p, d, m) = (3, 2, 4);
        let coupling = SmoothCoupling::bilinear(
            Matrix::from_fn(p, d, |_, _| rng.random_range(-1.0..1.0)),
            Vector::zeros(p),
            Vector::zeros(d),
        )?;
        let k = Matrix::from_fn(m, p + d, |_, _| rng.random_range(-1.0..1.0));
        let problem = PrimalDualProblem::new(Arc::new(Prox::Zero), Arc::new(SaddleForward::new(Arc::new(coupling))), Arc::new(Prox::Zero), k);
        let steps = StepSizes::auto(problem.lipschitz(), spectral_norm(problem.k()), 0.9)?;
        let observed = sample_metric_lipschitz(&problem, steps, 10_000, 1.0, trial)?;
        let bound = metric_lipschitz_bound(steps, problem.lipschitz(), problem.k_norm());
        println!("instance {trial}: observed {observed:.6}  bound {bound:.6}  ratio {:.4}", observed / bound);
    }
    Ok(())
}

//! The twice-reflected primal-dual method next to the methods it reduces
//! to: PDHG when B = 0, FoRB when K = 0 and FRDR when K = I.

use std::sync::Arc;

use dminmax::linalg::{Matrix, Vector};
use dminmax::operators::{LinearForward, Prox, ZeroForward};
use dminmax::pdtr::{forb_step, frdr_step, pdhg_step, pdtr_step, PdtrState, PrimalDualProblem, StepSizes};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> dminmax::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 4;
    let skew = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let b = LinearForward::new(&skew - skew.transpose(), Vector::zeros(n));
    let k = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let x0 = Vector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let base = PrimalDualProblem::new(Arc::new(Prox::l1(0.1)?), Arc::new(b), Arc::new(Prox::interval(-1.0, 1.0)?), k);

    let p = base.with_forward(Arc::new(ZeroForward));
    let steps = StepSizes::auto(0.0, p.k_norm(), 0.9)?;
    let (mut a, mut c) = (PdtrState::new(&p, x0.clone(), Vector::zeros(n))?, PdtrState::new(&p, x0.clone(), Vector::zeros(n))?);
    let mut dev: f64 = 0.0;
    for _ in 0..100 {
        a = pdtr_step(&p, &a, steps);
        c = pdhg_step(&p, &c, steps);
        dev = dev.max((&a.x - &c.x).amax()).max((&a.y - &c.y).amax());
    }
    println!("B = 0: pdtr vs pdhg, max deviation over 100 iterations = {dev:e}");

    let p = base.with_k(Matrix::zeros(n, n));
    let steps = StepSizes::auto(p.lipschitz(), 0.0, 0.9)?;
    let (mut a, mut c) = (PdtrState::new(&p, x0.clone(), Vector::zeros(n))?, PdtrState::new(&p, x0.clone(), Vector::zeros(n))?);
    let mut dev: f64 = 0.0;
    for _ in 0..100 {
        a = pdtr_step(&p, &a, steps);
        c = forb_step(&p, &c, steps.tau)?;
        dev = dev.max((&a.x - &c.x).amax());
    }
    println!("K = 0: pdtr vs forb,  max deviation over 100 iterations = {dev:e}");

    let p = base.with_k(Matrix::identity(n, n));
    let steps = StepSizes::auto(p.lipschitz(), 1.0, 0.9)?;
    // C⁻¹ is the normal cone of the unit box, so C = ∂‖·‖₁.
    let jc = Prox::l1(1.0)?;
    let (mut a, mut c) = (PdtrState::new(&p, x0.clone(), Vector::zeros(n))?, PdtrState::new(&p, x0, Vector::zeros(n))?);
    let mut dev: f64 = 0.0;
    for _ in 0..50 {
        a = pdtr_step(&p, &a, steps);
        c = frdr_step(&p, &jc, &c, steps.tau, 1.0 / steps.sigma)?.0;
        dev = dev.max((&a.x - &c.x).amax());
    }
    println!("K = I: pdtr vs frdr,  max deviation over 50 iterations  = {dev:e}");
    Ok(())
}

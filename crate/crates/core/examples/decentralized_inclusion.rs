//! Agent-local solver for 0 ∈ Σᵢ (Aᵢ + Bᵢ)(x): each agent holds a box
//! constraint and an affine monotone operator. The iterates are checked
//! against the product-space oracle, then run to consensus.

use std::sync::Arc;

use dminmax::graph::Graph;
use dminmax::inclusion::{alg1_run, alg1_sequence, max_lipschitz, oracle_pdtr, stepsize_bound, AgentInclusion, InitVariant};
use dminmax::linalg::{max_deviation, Matrix, Vector};
use dminmax::mixing::MixingMatrix;
use dminmax::operators::{LinearForward, Prox};
use dminmax::trace::StoppingRule;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> dminmax::Result<()> {
    let (n, h) = (6, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let agents: Vec<AgentInclusion> = (0..n)
        .map(|_| {
            // PSD part plus skew part: monotone, not a gradient.
            let f = Matrix::from_fn(h, h, |_, _| rng.random_range(-1.0..1.0));
            let s = Matrix::from_fn(h, h, |_, _| rng.random_range(-1.0..1.0));
            let m = &f * f.transpose() * 0.2 + (&s - s.transpose());
            let c = Vector::from_fn(h, |_, _| rng.random_range(-1.0..1.0));
            AgentInclusion::new(Arc::new(Prox::interval(-2.0, 2.0).unwrap()), Arc::new(LinearForward::new(m, c)))
        })
        .collect();
    let g = Graph::random_connected(n, 0.3, 4);
    let w = MixingMatrix::metropolis(&g)?;
    let tau = 0.9 * stepsize_bound(&w, max_lipschitz(&agents))?;
    let x0 = Matrix::zeros(n, h);

    let local = alg1_sequence(&agents, &w, &x0, tau, InitVariant::Default, 200)?;
    let oracle = oracle_pdtr(&agents, &w, &x0, tau, InitVariant::Default, 200)?;
    let dev = local.iter().zip(&oracle).map(|(a, b)| max_deviation(a, b)).fold(0.0, f64::max);
    println!("tau = {tau:.4}; agent-local vs product-space oracle over 200 iterations: {dev:e}");

    let out = alg1_run(&agents, &w, &x0, tau, InitVariant::Default, StoppingRule::new(1e-10, 200_000), 1000, None)?;
    println!("{:?} after {} iterations, consensus gap {:e}", out.trace.termination, out.trace.iterations, out.report.consensus_gap);
    println!("consensus point: {:?}", out.consensus_point().as_slice());
    Ok(())
}

//! Turning a configuration into graphs, mixing matrices, agent problems and
//! a starting point.
//!
//! Random data come from `ChaCha8Rng::seed_from_u64(problem.seed)`, drawn
//! uniformly from `[-scale, scale]` in this order: for each agent, `Mᵢ`
//! (row-major), then for `quadratic` the factors of `Pᵢ` and `Rᵢ`, then
//! `aᵢ` and `bᵢ` (not for `skew`); finally the starting rows `x⁰` and `y⁰`
//! from `[-1, 1]`.

use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{CouplingKind, ExperimentConfig, MixingSpec, StartPoint, TopologySpec};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::inclusion::AgentInclusion;
use crate::linalg::{psd_sqrt, Matrix, Vector};
use crate::minmax::{self, stack_rows, AgentSaddleProblem, SummedProblem};
use crate::mixing::{BlockMixing, MixingMatrix};
use crate::operators::{Prox, SmoothCoupling};
use crate::pdtr::{ConsensusLayout, PrimalDualProblem};
use crate::trace::StoppingRule;

pub fn build_graph(spec: &TopologySpec, n: usize, field: &str) -> Result<Graph> {
    let g = match spec {
        TopologySpec::Path => Graph::path(n),
        TopologySpec::Ring => Graph::ring(n),
        TopologySpec::Star => Graph::star(n),
        TopologySpec::Complete => Graph::complete(n),
        TopologySpec::Random { seed, density } => Graph::random_connected(n, *density, *seed),
        TopologySpec::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::config(field, format!("cannot read {}: {e}", path.display())))?;
            Graph::parse_edge_list(&text)?
        }
    };
    if g.n() != n {
        return Err(Error::config(field, format!("graph has {} vertices but problem.agents = {n}", g.n())));
    }
    Ok(g)
}

pub fn build_mixing(spec: MixingSpec, g: &Graph) -> Result<MixingMatrix> {
    match spec {
        MixingSpec::Metropolis => MixingMatrix::metropolis(g),
        MixingSpec::Laplacian(alpha) => MixingMatrix::from_laplacian(g, alpha),
    }
}

/// Everything a solver needs, built from one configuration.
#[derive(Debug, Clone)]
pub struct Instance {
    pub problems: Vec<AgentSaddleProblem>,
    pub g1: Graph,
    pub g2: Graph,
    pub w1: MixingMatrix,
    pub w2: MixingMatrix,
    pub x0: Matrix,
    pub y0: Matrix,
}

fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = if scale > 0.0 { rng.random_range(-scale..=scale) } else { 0.0 };
        }
    }
    m
}

fn uniform_vector(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> Vector {
    uniform_matrix(rng, len, 1, scale).column(0).into_owned()
}

/// `F Fᵀ / k`, symmetrized exactly.
fn gram(rng: &mut ChaCha8Rng, k: usize, scale: f64) -> Matrix {
    let f = uniform_matrix(rng, k, k, scale);
    let g = &f * f.transpose() / (k.max(1) as f64);
    (&g + g.transpose()) * 0.5
}

impl Instance {
    pub fn build(cfg: &ExperimentConfig) -> Result<Self> {
        let pr = &cfg.problem;
        let (n, p, d) = (pr.agents, pr.p, pr.d);
        let g1 = build_graph(&cfg.graph.x, n, "graph.x")?;
        let g2 = build_graph(cfg.y_topology(), n, "graph.y")?;
        let w1 = build_mixing(cfg.mixing.x, &g1)?;
        let w2 = build_mixing(cfg.y_mixing(), &g2)?;

        let mut rng = ChaCha8Rng::seed_from_u64(pr.seed);
        let s = pr.scale;
        let mut problems = Vec::with_capacity(n);
        for i in 0..n {
            let coupling = match pr.coupling {
                CouplingKind::None => SmoothCoupling::zero(p, d),
                CouplingKind::Skew => {
                    let m = uniform_matrix(&mut rng, p, d, s);
                    SmoothCoupling::bilinear(m, Vector::zeros(p), Vector::zeros(d))?
                }
                CouplingKind::Bilinear => {
                    let m = uniform_matrix(&mut rng, p, d, s);
                    let a = uniform_vector(&mut rng, p, s);
                    let b = uniform_vector(&mut rng, d, s);
                    SmoothCoupling::bilinear(m, a, b)?
                }
                CouplingKind::Quadratic => {
                    let m = uniform_matrix(&mut rng, p, d, s);
                    let pm = gram(&mut rng, p, s);
                    let rm = gram(&mut rng, d, s);
                    let a = uniform_vector(&mut rng, p, s);
                    let b = uniform_vector(&mut rng, d, s);
                    SmoothCoupling::new(pm, m, rm, a, b)?
                }
                CouplingKind::Explicit => {
                    let e = &pr.explicit[&i];
                    let m = e.m.clone().expect("validated");
                    if m.shape() != (p, d) {
                        return Err(Error::config(format!("problem.m.{i}"), format!("expected a {p}x{d} matrix, got {}x{}", m.nrows(), m.ncols())));
                    }
                    SmoothCoupling::new(
                        e.p_mat.clone().unwrap_or_else(|| Matrix::zeros(p, p)),
                        m,
                        e.r_mat.clone().unwrap_or_else(|| Matrix::zeros(d, d)),
                        e.a.clone().unwrap_or_else(|| Vector::zeros(p)),
                        e.b.clone().unwrap_or_else(|| Vector::zeros(d)),
                    )
                    .map_err(|err| Error::config(format!("problem.m.{i}"), err.to_string()))?
                }
            };
            let f = pr.f_overrides.get(&i).unwrap_or(&pr.f).build()?;
            let g = pr.g_overrides.get(&i).unwrap_or(&pr.g).build()?;
            problems.push(AgentSaddleProblem::new(f, g, coupling));
        }
        let (x0, y0) = match pr.start {
            StartPoint::Zero => (Matrix::zeros(n, p), Matrix::zeros(n, d)),
            StartPoint::Random => (uniform_matrix(&mut rng, n, p, 1.0), uniform_matrix(&mut rng, n, d, 1.0)),
        };
        Ok(Instance { problems, g1, g2, w1, w2, x0, y0 })
    }

    pub fn n(&self) -> usize {
        self.problems.len()
    }

    pub fn p(&self) -> usize {
        self.x0.ncols()
    }

    pub fn d(&self) -> usize {
        self.y0.ncols()
    }

    pub fn lipschitz(&self) -> f64 {
        minmax::max_lipschitz(&self.problems)
    }

    pub fn block_mixing(&self) -> Result<BlockMixing> {
        BlockMixing::new(self.w1.clone(), self.w2.clone(), self.p())
    }

    pub fn stacked_agents(&self) -> Vec<AgentInclusion> {
        minmax::stacked_agents(&self.problems)
    }

    /// Rows `(x⁰ᵢ, y⁰ᵢ)`.
    pub fn stacked_start(&self) -> Matrix {
        stack_rows(&self.x0, &self.y0)
    }

    pub fn layout(&self) -> ConsensusLayout {
        ConsensusLayout { agents: self.n(), p: self.p(), d: self.d() }
    }

    pub fn summed(&self) -> Result<SummedProblem> {
        minmax::summed_problem(&self.problems)
    }

    /// `0 ∈ (A + B)z + Kᵀ N_{0}(Kz)` on the stacked rows, with
    /// `K = ((I − W₁)/2)^{½}` on the `x` columns and `((I − W₂)/2)^{½}` on
    /// the `y` columns.
    pub fn product_problem(&self) -> Result<PrimalDualProblem> {
        let (n, p, h) = (self.n(), self.p(), self.p() + self.d());
        let root = |w: &MixingMatrix| {
            psd_sqrt(&((Matrix::identity(n, n) - w.matrix()) * 0.5), 1e-10).ok_or(Error::NotPositiveSemidefinite)
        };
        let (k1, k2) = (root(&self.w1)?, root(&self.w2)?);
        let mut k = Matrix::zeros(n * h, n * h);
        for i in 0..n {
            for j in 0..n {
                for c in 0..h {
                    k[(i * h + c, j * h + c)] = if c < p { k1[(i, j)] } else { k2[(i, j)] };
                }
            }
        }
        let agents = self.stacked_agents();
        Ok(PrimalDualProblem::new(
            Arc::new(crate::inclusion::StackedResolvent { parts: agents.iter().map(|a| a.resolvent.clone()).collect(), h }),
            Arc::new(crate::inclusion::StackedForward { parts: agents.iter().map(|a| a.forward.clone()).collect(), h }),
            Arc::new(Prox::Zero),
            k,
        ))
    }

    /// High-accuracy saddle point of the summed problem (FoRB to `1e-12`).
    pub fn reference(&self) -> Result<(Vector, Vector)> {
        let summed = self.summed()?;
        let (x, y, trace) = minmax::centralized_forb(
            &summed,
            &Vector::zeros(self.p()),
            &Vector::zeros(self.d()),
            0.9,
            StoppingRule::new(1e-12, 10_000_000),
        )?;
        if !trace.converged() {
            return Err(Error::NoConvergence(trace.iterations));
        }
        Ok((x, y))
    }
}

#![allow(dead_code)]

use std::sync::Arc;

use dminmax::graph::Graph;
use dminmax::inclusion::AgentInclusion;
use dminmax::linalg::{Matrix, Vector};
use dminmax::operators::{LinearForward, Prox};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, len: usize) -> Vector {
    Vector::from_fn(len, |_, _| rng.random_range(-1.0..1.0))
}

/// `F Fᵀ · psd + (S − Sᵀ)`: monotone, generally neither symmetric nor skew.
pub fn monotone_matrix(rng: &mut ChaCha8Rng, h: usize, psd: f64) -> Matrix {
    let f = uniform(rng, h, h);
    let s = uniform(rng, h, h);
    &f * f.transpose() * psd + (&s - s.transpose())
}

pub fn random_prox(rng: &mut ChaCha8Rng, h: usize) -> Prox {
    match rng.random_range(0..4) {
        0 => Prox::Zero,
        1 => Prox::l1(rng.random_range(0.0..0.5)).unwrap(),
        2 => {
            let lo = rng.random_range(-2.0..-0.1);
            Prox::interval(lo, rng.random_range(0.1..2.0)).unwrap()
        }
        _ => {
            let f = uniform(rng, h, h);
            let q = &f * f.transpose();
            Prox::quadratic((&q + q.transpose()) * 0.5, uniform_vec(rng, h)).unwrap()
        }
    }
}

/// Random agents on `R^h`: a prox from the library and an affine monotone
/// forward operator.
pub fn random_agents(rng: &mut ChaCha8Rng, n: usize, h: usize) -> Vec<AgentInclusion> {
    (0..n)
        .map(|_| {
            let prox = random_prox(rng, h);
            let m = monotone_matrix(rng, h, 0.3);
            let c = uniform_vec(rng, h);
            AgentInclusion::new(Arc::new(prox), Arc::new(LinearForward::new(m, c)))
        })
        .collect()
}

/// Paths, rings, stars, complete and random graphs with `3 ≤ n ≤ 20`.
pub fn graph_corpus(count: usize, seed: u64) -> Vec<(String, Graph)> {
    let mut rng = rng(seed);
    (0..count)
        .map(|k| {
            let n = rng.random_range(3..=20);
            match k % 5 {
                0 => (format!("path-{n}"), Graph::path(n)),
                1 => (format!("ring-{n}"), Graph::ring(n)),
                2 => (format!("star-{n}"), Graph::star(n)),
                3 => (format!("complete-{n}"), Graph::complete(n)),
                _ => {
                    let density = rng.random_range(0.0..0.5);
                    let s = rng.random_range(0..u64::MAX);
                    (format!("random-{n}-{s}"), Graph::random_connected(n, density, s))
                }
            }
        })
        .collect()
}

/// Any connected topology on exactly `n` vertices.
pub fn random_topology(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    match rng.random_range(0..5) {
        0 => Graph::path(n),
        1 => Graph::ring(n),
        2 => Graph::star(n),
        3 => Graph::complete(n),
        _ => Graph::random_connected(n, rng.random_range(0.0..0.6), rng.random_range(0..u64::MAX)),
    }
}

pub fn max_dev(a: &Matrix, b: &Matrix) -> f64 {
    dminmax::linalg::max_deviation(a, b)
}

//! PG-EXTRA for `min_x Σᵢ gᵢ(x) + hᵢ(x)`, written directly from its
//! stacked matrix form with dense products:
//!
//! ```text
//! Uᵏ⁺¹ = W Xᵏ + Uᵏ − ½(I + W)Xᵏ⁻¹ − τ(∇h(Xᵏ) − ∇h(Xᵏ⁻¹))
//! Xᵏ⁺¹ = prox_{τg}(Uᵏ⁺¹)
//! ```
//!
//! It shares no code with [`crate::inclusion`] beyond the prox maps, so it
//! serves as an independent baseline.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::inclusion::{consensus_gap, distance_to_point, InitVariant};
use crate::linalg::{Matrix, Vector};
use crate::mixing::MixingMatrix;
use crate::operators::{ForwardOperator, Prox, Resolvent};
use crate::trace::{ConvergenceTrace, StoppingRule, Termination, TraceRow};

#[derive(Debug, Clone)]
pub struct PgExtraOutcome {
    pub x: Matrix,
    pub trace: ConvergenceTrace,
}

fn rowwise(x: &Matrix, f: impl Fn(usize, &Vector) -> Vector) -> Matrix {
    let mut out = Matrix::zeros(x.nrows(), x.ncols());
    for i in 0..x.nrows() {
        let row = f(i, &x.row(i).transpose());
        out.set_row(i, &row.transpose());
    }
    out
}

/// The mixing matrix is used as a dense product; its graph only feeds the
/// message column of the trace.
#[allow(clippy::too_many_arguments)]
pub fn pg_extra_run(
    prox: &[Prox],
    gradients: &[Arc<dyn ForwardOperator>],
    mixing: &MixingMatrix,
    x0: &Matrix,
    tau: f64,
    variant: InitVariant,
    stop: StoppingRule,
    trace_every: usize,
    reference: Option<&Vector>,
) -> Result<PgExtraOutcome> {
    let w = mixing.matrix();
    let n = x0.nrows();
    if prox.len() != n || gradients.len() != n || w.shape() != (n, n) {
        return Err(Error::DimensionMismatch { context: "PG-EXTRA agents", expected: n, found: prox.len() });
    }
    if !(tau > 0.0) {
        return Err(Error::InadmissibleStep(format!("tau = {tau} must be positive")));
    }
    let grad = |x: &Matrix| rowwise(x, |i, r| gradients[i].apply(r));
    let prox_rows = |u: &Matrix| rowwise(u, |i, r| prox[i].apply(tau, r));

    let mut prev_x = x0.clone();
    let mut prev_grad = grad(&prev_x);
    let mut u = match variant {
        InitVariant::Default => &prev_x - &prev_grad * tau,
        InitVariant::Alt => w * &prev_x - &prev_grad * tau,
    };
    let mut x = prox_rows(&u);
    let mut k = 1;
    let per_round = 2 * mixing.graph().edge_count() as u64;
    let row = |k: usize, x: &Matrix, prev: &Matrix| TraceRow {
        iteration: k,
        fp_residual: (x - prev).norm(),
        consensus_gap_x: consensus_gap(x),
        consensus_gap_y: None,
        distance_to_reference: reference.map(|r| distance_to_point(x, r)),
        messages_cum: per_round * k as u64,
    };
    let mut trace = ConvergenceTrace::new(trace_every);
    let mut last = row(k, &x, &prev_x);
    trace.offer(last);
    let mut drift = f64::INFINITY;
    let termination = loop {
        if !last.fp_residual.is_finite() {
            break Termination::Diverged;
        }
        if last.fp_residual <= stop.tol && drift <= stop.tol {
            break Termination::Converged;
        }
        if k >= stop.max_iters {
            break Termination::BudgetExhausted;
        }
        let g = grad(&x);
        let next_u = w * &x + &u - (&prev_x + w * &prev_x) * 0.5 - (&g - &prev_grad) * tau;
        let next_x = prox_rows(&next_u);
        prev_x = std::mem::replace(&mut x, next_x);
        prev_grad = g;
        drift = (&next_u - &u).norm();
        u = next_u;
        k += 1;
        last = row(k, &x, &prev_x);
        trace.offer(last);
    };
    trace.finish(Some(last), termination, k);
    Ok(PgExtraOutcome { x, trace })
}

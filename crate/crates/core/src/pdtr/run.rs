use super::methods::{condat_vu_step, forb_step, pdhg_step, pdtr_step, CondatVuRule};
use super::{PdtrState, PrimalDualProblem, StepSizes};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::trace::{ConvergenceTrace, StoppingRule, Termination, TraceRow};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Pdtr,
    Pdhg,
    CondatVu(CondatVuRule),
    Forb,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Pdtr => "pdtr",
            Method::Pdhg => "pdhg",
            Method::CondatVu(_) => "condat_vu",
            Method::Forb => "forb",
        }
    }
}

/// How the primal vector decomposes into agent rows `(x_i, y_i)`, for
/// product-space problems. Used only for trace columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConsensusLayout {
    pub agents: usize,
    pub p: usize,
    pub d: usize,
}

impl ConsensusLayout {
    fn rows(&self, x: &Vector) -> Matrix {
        crate::linalg::unflatten_rows(x, self.agents, self.p + self.d)
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub stop: StoppingRule,
    pub trace_every: usize,
    /// Skip the step-size admissibility check (divergence demonstrations).
    pub allow_inadmissible: bool,
    pub layout: Option<ConsensusLayout>,
    /// Reference primal point (per agent row when `layout` is set).
    pub reference: Option<Vector>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            stop: StoppingRule::default(),
            trace_every: 1,
            allow_inadmissible: false,
            layout: None,
            reference: None,
        }
    }
}

impl RunOptions {
    pub fn with_stop(stop: StoppingRule) -> Self {
        RunOptions { stop, ..Default::default() }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub state: PdtrState,
    pub trace: ConvergenceTrace,
}

fn check_steps(problem: &PrimalDualProblem, method: Method, steps: StepSizes) -> Result<()> {
    match method {
        Method::Pdtr => steps.check_pdtr(problem.lipschitz(), problem.k_norm()),
        Method::Pdhg => {
            let load = steps.tau * steps.sigma * problem.k_norm().powi(2);
            if steps.tau > 0.0 && steps.sigma > 0.0 && load < 1.0 {
                Ok(())
            } else {
                Err(Error::InadmissibleStep(format!("PDHG needs tau*sigma*|K|^2 < 1, got {load}")))
            }
        }
        Method::Forb | Method::CondatVu(_) => Ok(()),
    }
}

fn row(k: usize, residual: f64, state: &PdtrState, opts: &RunOptions) -> TraceRow {
    let (gap_x, gap_y, distance) = match opts.layout {
        Some(layout) => {
            let rows = layout.rows(&state.x);
            let gx = crate::inclusion::consensus_gap(&rows.columns(0, layout.p).into_owned());
            let gy = (layout.d > 0).then(|| crate::inclusion::consensus_gap(&rows.columns(layout.p, layout.d).into_owned()));
            let dist = opts.reference.as_ref().map(|r| {
                rows.row_iter().map(|zi| (zi.transpose() - r).norm()).fold(0.0, f64::max)
            });
            (gx, gy, dist)
        }
        None => (0.0, None, opts.reference.as_ref().map(|r| (&state.x - r).norm())),
    };
    TraceRow {
        iteration: k,
        fp_residual: residual,
        consensus_gap_x: gap_x,
        consensus_gap_y: gap_y,
        distance_to_reference: distance,
        messages_cum: 0,
    }
}

/// Iterates `method` until `‖z^{k+1} − z^k‖∞ ≤ tol` or the budget runs out.
///
/// With `tol = ∞` the initial state is returned after zero iterations.
pub fn solve(
    problem: &PrimalDualProblem,
    method: Method,
    init: PdtrState,
    steps: StepSizes,
    opts: &RunOptions,
) -> Result<Solution> {
    if !opts.allow_inadmissible {
        check_steps(problem, method, steps)?;
    }
    let mut trace = ConvergenceTrace::new(opts.trace_every);
    let mut state = init;
    let mut residual = f64::INFINITY;
    let mut k = 0;
    let mut last = None;
    let termination = loop {
        if residual <= opts.stop.tol {
            break Termination::Converged;
        }
        if k >= opts.stop.max_iters {
            break Termination::BudgetExhausted;
        }
        let next = match method {
            Method::Pdtr => pdtr_step(problem, &state, steps),
            Method::Pdhg => pdhg_step(problem, &state, steps),
            Method::CondatVu(rule) => condat_vu_step(problem, &state, steps, rule)?,
            Method::Forb => forb_step(problem, &state, steps.tau)?,
        };
        residual = next.distance_inf(&state);
        state = next;
        k += 1;
        let r = row(k, residual, &state, opts);
        trace.offer(r);
        last = Some(r);
        if !residual.is_finite() {
            break Termination::Diverged;
        }
    };
    trace.finish(last, termination, k);
    Ok(Solution { state, trace })
}

pub fn pdtr_run(problem: &PrimalDualProblem, init: PdtrState, steps: StepSizes, opts: &RunOptions) -> Result<Solution> {
    solve(problem, Method::Pdtr, init, steps, opts)
}

pub fn pdhg_run(problem: &PrimalDualProblem, init: PdtrState, steps: StepSizes, opts: &RunOptions) -> Result<Solution> {
    solve(problem, Method::Pdhg, init, steps, opts)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::operators::{Prox, SaddleForward, SmoothCoupling, ZeroForward};

    fn skew_problem() -> PrimalDualProblem {
        // min_x max_y xy as the inclusion 0 ∈ B(z), K = 0 with a 1-d dual
        let c = SmoothCoupling::bilinear(Matrix::identity(1, 1), Vector::zeros(1), Vector::zeros(1)).unwrap();
        PrimalDualProblem::new(
            Arc::new(Prox::Zero),
            Arc::new(SaddleForward::new(Arc::new(c))),
            Arc::new(Prox::Zero),
            Matrix::zeros(1, 2),
        )
    }

    #[test]
    fn pdtr_finds_origin_of_bilinear_saddle() {
        let p = skew_problem();
        let init = PdtrState::new(&p, Vector::from_column_slice(&[1.0, -2.0]), Vector::zeros(1)).unwrap();
        let sol = pdtr_run(&p, init, StepSizes::new(0.4, 0.4), &RunOptions::default()).unwrap();
        assert!(sol.trace.converged());
        assert!(sol.state.x.amax() < 1e-8);
    }

    #[test]
    fn infinite_tolerance_returns_init() {
        let p = skew_problem();
        let init = PdtrState::new(&p, Vector::from_column_slice(&[1.0, -2.0]), Vector::zeros(1)).unwrap();
        let opts = RunOptions::with_stop(StoppingRule::new(f64::INFINITY, 100));
        let sol = pdtr_run(&p, init.clone(), StepSizes::new(0.4, 0.4), &opts).unwrap();
        assert_eq!(sol.state, init);
        assert_eq!(sol.trace.iterations, 0);
        assert!(sol.trace.rows().is_empty());
    }

    #[test]
    fn inadmissible_steps_are_rejected_unless_overridden() {
        let p = skew_problem();
        let init = PdtrState::new(&p, Vector::from_column_slice(&[1.0, -2.0]), Vector::zeros(1)).unwrap();
        assert!(pdtr_run(&p, init.clone(), StepSizes::new(0.5, 0.5), &RunOptions::default()).is_err());
        let opts = RunOptions { allow_inadmissible: true, stop: StoppingRule::new(1e-10, 50), ..Default::default() };
        let sol = pdtr_run(&p, init, StepSizes::new(0.5, 0.5), &opts).unwrap();
        assert_eq!(sol.trace.iterations, 50);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let p = skew_problem();
        let init = PdtrState::new(&p, Vector::from_column_slice(&[1.0, -2.0]), Vector::zeros(1)).unwrap();
        let opts = RunOptions::with_stop(StoppingRule::new(1e-14, 5));
        let sol = pdtr_run(&p, init, StepSizes::new(0.1, 0.1), &opts).unwrap();
        assert_eq!(sol.trace.termination, Termination::BudgetExhausted);
        assert_eq!(sol.trace.rows().len(), 5);
    }

    #[test]
    fn condat_vu_diverges_on_skew_operator() {
        let p = skew_problem();
        let init = PdtrState::new(&p, Vector::from_column_slice(&[1.0, -2.0]), Vector::zeros(1)).unwrap();
        let opts = RunOptions::with_stop(StoppingRule::new(1e-6, 20_000));
        let sol = solve(&p, Method::CondatVu(CondatVuRule::default()), init, StepSizes::new(0.4, 0.4), &opts).unwrap();
        assert!(!sol.trace.converged());
    }

    #[test]
    fn returned_point_is_a_fixed_point() {
        let k = Matrix::from_row_slice(1, 2, &[0.5, -0.3]);
        let p = skew_problem().with_k(k);
        let steps = StepSizes::auto(p.lipschitz(), p.k_norm(), 0.9).unwrap();
        let init = PdtrState::new(&p, Vector::from_column_slice(&[1.0, -2.0]), Vector::from_element(1, 0.7)).unwrap();
        let tol = 1e-10;
        let sol = pdtr_run(&p, init, steps, &RunOptions::with_stop(StoppingRule::new(tol, 1_000_000))).unwrap();
        let again = pdtr_step(&p, &sol.state, steps);
        assert!(again.distance_inf(&sol.state) <= 10.0 * tol);
    }

    #[test]
    fn zero_forward_pdtr_and_pdhg_share_the_trace() {
        let p = PrimalDualProblem::new(
            Arc::new(Prox::l1(0.2).unwrap()),
            Arc::new(ZeroForward),
            Arc::new(Prox::interval(-1.0, 1.0).unwrap()),
            Matrix::from_row_slice(1, 2, &[1.0, 2.0]),
        );
        let init = PdtrState::new(&p, Vector::from_column_slice(&[3.0, -1.0]), Vector::zeros(1)).unwrap();
        let steps = StepSizes::new(0.3, 0.3);
        let a = pdtr_run(&p, init.clone(), steps, &RunOptions::default()).unwrap();
        let b = pdhg_run(&p, init, steps, &RunOptions::default()).unwrap();
        assert_eq!(a.trace.iterations, b.trace.iterations);
        assert_eq!(a.state, b.state);
    }
}

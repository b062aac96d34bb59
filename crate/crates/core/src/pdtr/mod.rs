//! Centralized primal-dual solvers for `0 ∈ (A + B)x + Kᵀ C(Kx)`.
//!
//! The twice-reflected method ([`pdtr_step`]) and the baselines it
//! specializes to: PDHG (`B = 0`), forward-reflected-backward (`K = 0`),
//! forward-reflected Douglas–Rachford (`K = I`), plus Condat–Vũ for
//! comparison.

mod methods;
mod metric;
mod problem;
mod run;

pub use methods::{
    condat_vu_step, forb_step, frdr_step, pdhg_step, pdtr_step, proximal_point_step, CondatVuRule,
};
pub use metric::{sample_metric_lipschitz, metric_lipschitz_bound, MMetric};
pub use problem::{PdtrState, PrimalDualProblem, StepSizes};
pub use run::{pdhg_run, pdtr_run, solve, ConsensusLayout, Method, RunOptions, Solution};

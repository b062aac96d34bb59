use super::{PdtrState, PrimalDualProblem, StepSizes};
use crate::error::{Error, Result};
use crate::linalg::Vector;
use crate::operators::Resolvent;

/// Dual update `J_{σC⁻¹}(y + σK(2x⁺ − x))` shared by every method here.
fn dual_update(problem: &PrimalDualProblem, y: &Vector, x_new: &Vector, x: &Vector, sigma: f64) -> Vector {
    let extrapolated = x_new * 2.0 - x;
    let arg = y + problem.k() * extrapolated * sigma;
    problem.resolvent_c_inv.apply(sigma, &arg)
}

/// One twice-reflected step:
///
/// ```text
/// x⁺ = J_{τA}(x − τKᵀy − 2τB(x) + τB(x⁻))
/// y⁺ = J_{σC⁻¹}(y + σK(2x⁺ − x))
/// ```
pub fn pdtr_step(problem: &PrimalDualProblem, state: &PdtrState, steps: StepSizes) -> PdtrState {
    let tau = steps.tau;
    let bx = problem.forward_b.apply(&state.x);
    let arg = &state.x - problem.k().tr_mul(&state.y) * tau - &bx * (2.0 * tau) + &state.prev_bx * tau;
    let x_new = problem.resolvent_a.apply(tau, &arg);
    let y_new = dual_update(problem, &state.y, &x_new, &state.x, steps.sigma);
    PdtrState { x: x_new, y: y_new, prev_x: state.x.clone(), prev_bx: bx }
}

/// PDHG: the forward operator is ignored entirely.
pub fn pdhg_step(problem: &PrimalDualProblem, state: &PdtrState, steps: StepSizes) -> PdtrState {
    let tau = steps.tau;
    let arg = &state.x - problem.k().tr_mul(&state.y) * tau;
    let x_new = problem.resolvent_a.apply(tau, &arg);
    let y_new = dual_update(problem, &state.y, &x_new, &state.x, steps.sigma);
    let bx = problem.forward_b.apply(&state.x);
    PdtrState { x: x_new, y: y_new, prev_x: state.x.clone(), prev_bx: bx }
}

/// Step-size rule for Condat–Vũ. The method is only guaranteed to converge
/// when `B` is `β`-cocoercive and `1/τ − σ‖K‖² > 1/(2β)`; without a
/// cocoercivity constant no check is made and the method may diverge (it
/// does on skew `B`).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CondatVuRule {
    pub cocoercivity: Option<f64>,
}

/// Condat–Vũ step: a plain (unreflected) forward evaluation of `B`.
pub fn condat_vu_step(
    problem: &PrimalDualProblem,
    state: &PdtrState,
    steps: StepSizes,
    rule: CondatVuRule,
) -> Result<PdtrState> {
    if let Some(beta) = rule.cocoercivity {
        let lhs = 1.0 / steps.tau - steps.sigma * problem.k_norm().powi(2);
        if !(beta > 0.0 && lhs > 1.0 / (2.0 * beta)) {
            return Err(Error::InadmissibleStep(format!(
                "Condat-Vu needs 1/tau - sigma*|K|^2 > 1/(2*beta); got {lhs} vs {}",
                1.0 / (2.0 * beta)
            )));
        }
    }
    let tau = steps.tau;
    let bx = problem.forward_b.apply(&state.x);
    let arg = &state.x - problem.k().tr_mul(&state.y) * tau - &bx * tau;
    let x_new = problem.resolvent_a.apply(tau, &arg);
    let y_new = dual_update(problem, &state.y, &x_new, &state.x, steps.sigma);
    Ok(PdtrState { x: x_new, y: y_new, prev_x: state.x.clone(), prev_bx: bx })
}

/// Forward-reflected-backward on `A + B`, ignoring `K` and leaving `y`
/// untouched. Requires `τ < 1/(2L)`.
pub fn forb_step(problem: &PrimalDualProblem, state: &PdtrState, tau: f64) -> Result<PdtrState> {
    let lipschitz = problem.lipschitz();
    if !(tau > 0.0 && 2.0 * tau * lipschitz < 1.0) {
        return Err(Error::InadmissibleStep(format!("FoRB needs tau < 1/(2L); tau = {tau}, L = {lipschitz}")));
    }
    let bx = problem.forward_b.apply(&state.x);
    let arg = &state.x - &bx * (2.0 * tau) + &state.prev_bx * tau;
    let x_new = problem.resolvent_a.apply(tau, &arg);
    Ok(PdtrState { x: x_new, y: state.y.clone(), prev_x: state.x.clone(), prev_bx: bx })
}

/// Proximal point step `y⁺ = J_{σC⁻¹}(y)`.
pub fn proximal_point_step(problem: &PrimalDualProblem, y: &Vector, sigma: f64) -> Vector {
    problem.resolvent_c_inv.apply(sigma, y)
}

/// Forward-reflected Douglas–Rachford for `K = I`, with `γ` playing the
/// role of `1/σ`:
///
/// ```text
/// x⁺ = J_{τA}(x − τy − 2τB(x) + τB(x⁻))
/// u⁺ = J_{γC}(2x⁺ − x + γy)
/// y⁺ = y + (2x⁺ − x − u⁺)/γ
/// ```
///
/// `resolvent_c` evaluates `J_{γC}`. Returns the new state and `u⁺`.
pub fn frdr_step(
    problem: &PrimalDualProblem,
    resolvent_c: &dyn Resolvent,
    state: &PdtrState,
    tau: f64,
    gamma: f64,
) -> Result<(PdtrState, Vector)> {
    let k = problem.k();
    if !k.is_square() || *k != crate::linalg::Matrix::identity(k.nrows(), k.ncols()) {
        return Err(Error::NotIdentity);
    }
    let lipschitz = problem.lipschitz();
    if !(tau > 0.0 && gamma > 0.0 && tau < gamma / (1.0 + 2.0 * gamma * lipschitz)) {
        return Err(Error::InadmissibleStep(format!("FRDR needs tau < gamma/(1 + 2 gamma L); tau = {tau}, gamma = {gamma}")));
    }
    let bx = problem.forward_b.apply(&state.x);
    let arg = &state.x - &state.y * tau - &bx * (2.0 * tau) + &state.prev_bx * tau;
    let x_new = problem.resolvent_a.apply(tau, &arg);
    let reflected = &x_new * 2.0 - &state.x;
    let u = resolvent_c.apply(gamma, &(&reflected + &state.y * gamma));
    let y_new = &state.y + (reflected - &u) / gamma;
    Ok((PdtrState { x: x_new, y: y_new, prev_x: state.x.clone(), prev_bx: bx }, u))
}

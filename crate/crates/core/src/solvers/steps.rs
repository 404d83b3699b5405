use super::{AccelSchedule, FixedParams, IterateState, LinearRateParams, PrimalDualProblem};
use crate::vecops::axpy;

/// `J_{step·A}[x − step·(Σ L_i* v_i + C x − z)]`
fn primal_update(problem: &PrimalDualProblem, x: &[f64], v: &[Vec<f64>], step: f64) -> Vec<f64> {
    let dim = x.len();
    let mut dir = problem.forward_c.evaluate(x);
    let mut tmp = vec![0.0; dim];
    for (block, vi) in problem.blocks.iter().zip(v) {
        block.op.adjoint_into(vi, &mut tmp);
        axpy(1.0, &tmp, &mut dir);
    }
    axpy(-1.0, &problem.z, &mut dir);
    let mut u = x.to_vec();
    axpy(-step, &dir, &mut u);
    problem.resolvent_a.evaluate(&u, step)
}

/// `J_{σ B⁻¹}[v + σ(L y − D⁻¹ v − r)]` for every block, optionally skipping `D⁻¹`.
fn dual_update(
    problem: &PrimalDualProblem,
    y: &[f64],
    v: &[Vec<f64>],
    sigma: &[f64],
    with_dinv: bool,
) -> Vec<Vec<f64>> {
    problem
        .blocks
        .iter()
        .zip(v)
        .zip(sigma)
        .map(|((block, vi), &s)| {
            let mut arg = block.op.apply(y);
            if with_dinv && !block.forward_dinv.is_zero() {
                let d = block.forward_dinv.evaluate(vi);
                axpy(-1.0, &d, &mut arg);
            }
            axpy(-1.0, &block.shift, &mut arg);
            let mut w = vi.clone();
            axpy(s, &arg, &mut w);
            block.resolvent_bconj.evaluate(&w, s)
        })
        .collect()
}

fn extrapolate(x_new: &[f64], x_old: &[f64], theta: f64) -> Vec<f64> {
    x_new
        .iter()
        .zip(x_old)
        .map(|(a, b)| a + theta * (a - b))
        .collect()
}

/// One baseline iteration with fixed `τ`, `σ_i` and `y_n = 2x_{n+1} − x_n`.
pub fn vu_step(
    state: &IterateState,
    problem: &PrimalDualProblem,
    params: &FixedParams,
) -> IterateState {
    let x_next = primal_update(problem, &state.x, &state.v, params.tau);
    let y = extrapolate(&x_next, &state.x, 1.0);
    let v = dual_update(problem, &y, &state.v, &params.sigma, true);
    IterateState {
        x: x_next,
        x_prev: state.x.clone(),
        v,
        y,
    }
}

/// One accelerated iteration. The primal step is `τ_n/λ`, the extrapolation weight
/// is `θ_n`, the dual steps are `σ_{i,n}` (no `D_i⁻¹` term), then the schedule
/// advances. When `C ≡ 0` the `θ` rule uses `η = 0`.
pub fn accel_step(
    state: &IterateState,
    schedule: &AccelSchedule,
    problem: &PrimalDualProblem,
) -> (IterateState, AccelSchedule) {
    let eta = if problem.forward_c.is_zero() {
        0.0
    } else {
        schedule.eta
    };
    let theta = schedule.theta_for(schedule.tau, eta);
    let x_next = primal_update(problem, &state.x, &state.v, schedule.tau / schedule.lambda);
    let y = extrapolate(&x_next, &state.x, theta);
    let v = dual_update(problem, &y, &state.v, &schedule.sigma, false);

    let mut next = schedule.clone();
    next.theta = theta;
    next.advance(eta);
    (
        IterateState {
            x: x_next,
            x_prev: state.x.clone(),
            v,
            y,
        },
        next,
    )
}

/// One fixed-step iteration of the linear-rate method.
pub fn linear_rate_step(
    state: &IterateState,
    problem: &PrimalDualProblem,
    params: &LinearRateParams,
) -> IterateState {
    let x_next = primal_update(problem, &state.x, &state.v, params.tau);
    let y = extrapolate(&x_next, &state.x, params.theta);
    let v = dual_update(problem, &y, &state.v, &params.sigma, true);
    IterateState {
        x: x_next,
        x_prev: state.x.clone(),
        v,
        y,
    }
}

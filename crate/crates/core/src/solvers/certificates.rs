//! Runtime-checkable convergence inequalities against a known primal-dual solution.

use super::{
    AccelSchedule, IterateState, LinearRateParams, PrimalDualProblem, StrongMonotonicityCert,
};
use crate::error::{Error, Result};
use crate::vecops::{dist_sq, dot, sub};

/// `(x̄, v̄_1, …, v̄_m)` satisfying `z − Σ L_i* v̄_i ∈ (A + C) x̄` and `v̄_i ∈ (B_i □ D_i)(L_i x̄ − r_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualSolution {
    pub x: Vec<f64>,
    pub v: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertValue {
    pub lhs: f64,
    pub rhs: f64,
}

impl CertValue {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }
}

/// `Σ_i ⟨L_i(x₁ − x₀), v_{i,0} − v̄_i⟩`
fn coupling(
    problem: &PrimalDualProblem,
    x0: &[f64],
    x1: &[f64],
    v0: &[Vec<f64>],
    vbar: &[Vec<f64>],
) -> f64 {
    let dx = sub(x1, x0);
    problem
        .blocks
        .iter()
        .zip(v0.iter().zip(vbar))
        .map(|(b, (v, vb))| dot(&b.op.apply(&dx), &sub(v, vb)))
        .sum()
}

/// The global inequality of the accelerated method,
///
/// ```text
/// λ‖x_{n+1} − x̄‖²/τ²_{n+1} + (1 − τ₁Σσ_{i,0}‖L_i‖²) Σ‖v_{i,n} − v̄_i‖²/(τ₁σ_{i,0})
///   ≤ λ‖x₁ − x̄‖²/τ₁² + Σ‖v_{i,0} − v̄_i‖²/(τ₁σ_{i,0}) + ‖x₁ − x₀‖²/τ₀² + (2/τ₀)Σ⟨L_i(x₁ − x₀), v_{i,0} − v̄_i⟩,
/// ```
///
/// whose right-hand side depends only on the first step.
#[derive(Debug, Clone)]
pub struct FejerCertificate {
    solution: PrimalDualSolution,
    lambda: f64,
    tau1: f64,
    sigma0: Vec<f64>,
    dual_weight: f64,
    rhs: f64,
}

impl FejerCertificate {
    /// `first` is `(x₀, v_0)` and `second` the state after one step (holding `x₁`);
    /// `schedule0` is the schedule used for that first step.
    pub fn new(
        problem: &PrimalDualProblem,
        schedule0: &AccelSchedule,
        first: &IterateState,
        second: &IterateState,
        solution: PrimalDualSolution,
    ) -> Self {
        let tau0 = schedule0.tau0;
        let tau1 = schedule0.tau1();
        let lambda = schedule0.lambda;
        let sigma0 = schedule0.sigma0.clone();
        let weighted: f64 = sigma0
            .iter()
            .zip(&schedule0.norms_sq)
            .map(|(s, n)| s * n)
            .sum();
        let dual0: f64 = first
            .v
            .iter()
            .zip(&solution.v)
            .zip(&sigma0)
            .map(|((v, vb), s)| dist_sq(v, vb) / (tau1 * s))
            .sum();
        let rhs = lambda * dist_sq(&second.x, &solution.x) / (tau1 * tau1)
            + dual0
            + dist_sq(&second.x, &first.x) / (tau0 * tau0)
            + 2.0 / tau0 * coupling(problem, &first.x, &second.x, &first.v, &solution.v);
        Self {
            lambda,
            tau1,
            dual_weight: 1.0 - tau1 * weighted,
            sigma0,
            rhs,
            solution,
        }
    }

    pub fn rhs(&self) -> f64 {
        self.rhs
    }

    /// `prev` holds `v_{i,n}`, `next` holds `x_{n+1}`, `schedule_next` holds `τ_{n+1}`.
    pub fn evaluate(
        &self,
        prev: &IterateState,
        next: &IterateState,
        schedule_next: &AccelSchedule,
    ) -> CertValue {
        let t = schedule_next.tau;
        let dual: f64 = prev
            .v
            .iter()
            .zip(&self.solution.v)
            .zip(&self.sigma0)
            .map(|((v, vb), s)| dist_sq(v, vb) / (self.tau1 * s))
            .sum();
        let lhs =
            self.lambda * dist_sq(&next.x, &self.solution.x) / (t * t) + self.dual_weight * dual;
        CertValue { lhs, rhs: self.rhs }
    }
}

/// Both sides of the accelerated method's inequality at step `n`.
/// `states` is `(x₀/v₀ state, x₁ state, state at n, state at n+1)`.
pub fn fejer_certificate_accel(
    problem: &PrimalDualProblem,
    states: (&IterateState, &IterateState, &IterateState, &IterateState),
    schedule0: &AccelSchedule,
    schedule_next: &AccelSchedule,
    reference: &PrimalDualSolution,
) -> CertValue {
    let (s0, s1, prev, next) = states;
    FejerCertificate::new(problem, schedule0, s0, s1, reference.clone()).evaluate(
        prev,
        next,
        schedule_next,
    )
}

/// The geometric bound of the linear-rate method,
///
/// ```text
/// γ‖x_{n+1} − x̄‖² + (1 − ω)Σδ_i‖v_{i,n} − v̄_i‖²
///   ≤ ωⁿ (γ‖x₁ − x̄‖² + Σδ_i‖v_{i,0} − v̄_i‖² + (γ/2)ω‖x₁ − x₀‖² + μωΣ⟨L_i(x₁ − x₀), v_{i,0} − v̄_i⟩).
/// ```
#[derive(Debug, Clone)]
pub struct GeometricCertificate {
    solution: PrimalDualSolution,
    gamma: f64,
    delta: Vec<f64>,
    omega: f64,
    constant: f64,
}

impl GeometricCertificate {
    pub fn new(
        problem: &PrimalDualProblem,
        params: &LinearRateParams,
        cert: &StrongMonotonicityCert,
        first: &IterateState,
        second: &IterateState,
        solution: PrimalDualSolution,
    ) -> Result<Self> {
        let delta = cert
            .delta
            .clone()
            .ok_or_else(|| Error::Config("geometric certificate needs delta_i".into()))?;
        let gamma = cert.gamma;
        let omega = params.omega;
        let dual0: f64 = first
            .v
            .iter()
            .zip(&solution.v)
            .zip(&delta)
            .map(|((v, vb), d)| d * dist_sq(v, vb))
            .sum();
        let constant = gamma * dist_sq(&second.x, &solution.x)
            + dual0
            + 0.5 * gamma * omega * dist_sq(&second.x, &first.x)
            + params.mu * omega * coupling(problem, &first.x, &second.x, &first.v, &solution.v);
        Ok(Self {
            solution,
            gamma,
            delta,
            omega,
            constant,
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// The constant multiplying `ωⁿ`.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// `prev` holds `v_{i,n}`, `next` holds `x_{n+1}`.
    pub fn evaluate(&self, n: usize, prev: &IterateState, next: &IterateState) -> CertValue {
        let dual: f64 = prev
            .v
            .iter()
            .zip(&self.solution.v)
            .zip(&self.delta)
            .map(|((v, vb), d)| d * dist_sq(v, vb))
            .sum();
        let lhs = self.gamma * dist_sq(&next.x, &self.solution.x) + (1.0 - self.omega) * dual;
        let rhs = self.omega.powi(n as i32) * self.constant;
        CertValue { lhs, rhs }
    }
}

/// Both sides of the geometric bound at step `n`.
/// `states` is `(x₀/v₀ state, x₁ state, state at n, state at n+1)`.
pub fn geometric_certificate(
    problem: &PrimalDualProblem,
    states: (&IterateState, &IterateState, &IterateState, &IterateState),
    n: usize,
    params: &LinearRateParams,
    cert: &StrongMonotonicityCert,
    reference: &PrimalDualSolution,
) -> Result<CertValue> {
    let (s0, s1, prev, next) = states;
    Ok(
        GeometricCertificate::new(problem, params, cert, s0, s1, reference.clone())?
            .evaluate(n, prev, next),
    )
}

//! Primal-dual iterations for
//!
//! ```text
//! find x  with  z ∈ A x + Σ_i L_i*((B_i □ D_i)(L_i x − r_i)) + C x
//! ```
//!
//! * [`vu_step`]: the fixed-step forward-backward baseline.
//! * [`accel_step`]: variable steps for `A + C` strongly monotone, `O(1/n)` on the primal iterates.
//! * [`linear_rate_step`]: fixed steps for `A + C` and every `B_i⁻¹ + D_i⁻¹` strongly monotone,
//!   geometric convergence.

mod certificates;
mod params;
mod run;
mod steps;

pub use certificates::{
    fejer_certificate_accel, geometric_certificate, CertValue, FejerCertificate,
    GeometricCertificate, PrimalDualSolution,
};
pub use params::{
    accel_feasibility, accel_init, default_tau0, linear_rate_feasibility, linear_rate_init,
    validate_vu_params, vu_init, AccelSchedule, ConstraintCheck, FixedParams, LinearRateParams,
    StrongMonotonicityCert, VuFeasibility, VU_CONDITION,
};
pub use run::{
    run, Algorithm, DiagnosticRecord, DistanceMetric, Method, RunDiagnostics, RunHooks, RunOutcome,
    StopRule,
};
pub use steps::{accel_step, linear_rate_step, vu_step};

use crate::error::{check_dim, Error, Result};
use crate::operators::{estimate_norm, LinearMap, LipschitzOp, ProxMap, ZeroOp};

/// One dual block `(B_i, D_i, L_i, r_i)`, carried as the resolvent of `B_i⁻¹`
/// (or `prox_{σ g_i*}`), the forward operator `D_i⁻¹` (or `∇l_i*`), the coupling
/// `L_i` and the shift `r_i`.
pub struct DualBlock {
    pub resolvent_bconj: Box<dyn ProxMap>,
    pub forward_dinv: Box<dyn LipschitzOp>,
    pub op: Box<dyn LinearMap>,
    pub shift: Vec<f64>,
}

impl DualBlock {
    /// Block with `D_i⁻¹ ≡ 0` and `r_i = 0`.
    pub fn new(resolvent_bconj: impl ProxMap + 'static, op: impl LinearMap + 'static) -> Self {
        let dim = op.codomain_dim();
        Self {
            resolvent_bconj: Box::new(resolvent_bconj),
            forward_dinv: Box::new(ZeroOp),
            op: Box::new(op),
            shift: vec![0.0; dim],
        }
    }

    pub fn with_dinv(mut self, dinv: impl LipschitzOp + 'static) -> Self {
        self.forward_dinv = Box::new(dinv);
        self
    }

    pub fn with_shift(mut self, r: Vec<f64>) -> Self {
        self.shift = r;
        self
    }

    pub fn dual_dim(&self) -> usize {
        self.op.codomain_dim()
    }
}

/// The data of the primal-dual pair. `resolvent_a` holds `J_{τA}`
/// (or `prox_{τf}`); `forward_c` holds `C` (or `∇h`) with its Lipschitz constant.
pub struct PrimalDualProblem {
    pub z: Vec<f64>,
    pub resolvent_a: Box<dyn ProxMap>,
    pub forward_c: Box<dyn LipschitzOp>,
    pub blocks: Vec<DualBlock>,
}

impl PrimalDualProblem {
    pub fn new(dim: usize, resolvent_a: impl ProxMap + 'static) -> Self {
        Self {
            z: vec![0.0; dim],
            resolvent_a: Box::new(resolvent_a),
            forward_c: Box::new(ZeroOp),
            blocks: Vec::new(),
        }
    }

    pub fn with_forward(mut self, c: impl LipschitzOp + 'static) -> Self {
        self.forward_c = Box::new(c);
        self
    }

    pub fn with_z(mut self, z: Vec<f64>) -> Self {
        self.z = z;
        self
    }

    pub fn with_block(mut self, block: DualBlock) -> Self {
        self.blocks.push(block);
        self
    }

    pub fn primal_dim(&self) -> usize {
        self.z.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Lipschitz constant `η` of `C`.
    pub fn eta(&self) -> f64 {
        self.forward_c.lipschitz_const()
    }

    /// Lipschitz constants `ν_i` of the `D_i⁻¹`.
    pub fn nu(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .map(|b| b.forward_dinv.lipschitz_const())
            .collect()
    }

    /// Constants for the baseline condition: the cocoercivity `1/η` of `C` and
    /// the strong monotonicity `1/ν_i` of the `D_i` (Baillon–Haddad), `∞` for absent terms.
    pub fn vu_constants(&self) -> (f64, Vec<f64>) {
        let inv = |l: f64| if l > 0.0 { 1.0 / l } else { f64::INFINITY };
        (inv(self.eta()), self.nu().into_iter().map(inv).collect())
    }

    /// `‖L_i‖²` per block: the operator's declared bound when it has one,
    /// otherwise a power-iteration estimate.
    pub fn norms_sq(&self, seed: u64) -> Result<Vec<f64>> {
        self.blocks
            .iter()
            .map(|b| match b.op.norm_bound() {
                Some(n) => Ok(n * n),
                None => estimate_norm(b.op.as_ref(), 500, 1e-10, seed).map(|n| n * n),
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::Config(
                "problem needs at least one dual block".into(),
            ));
        }
        for b in &self.blocks {
            check_dim(self.primal_dim(), b.op.domain_dim())?;
            check_dim(b.op.codomain_dim(), b.shift.len())?;
        }
        Ok(())
    }
}

/// `(x_n, x_{n−1}, v_{1,n}, …, v_{m,n})` plus the extrapolated point `y` of the last step.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub x: Vec<f64>,
    pub x_prev: Vec<f64>,
    pub v: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl IterateState {
    pub fn new(x0: Vec<f64>, v0: Vec<Vec<f64>>) -> Self {
        Self {
            x_prev: x0.clone(),
            y: x0.clone(),
            x: x0,
            v: v0,
        }
    }

    pub fn zeros(problem: &PrimalDualProblem) -> Self {
        let v = problem
            .blocks
            .iter()
            .map(|b| vec![0.0; b.dual_dim()])
            .collect();
        Self::new(vec![0.0; problem.primal_dim()], v)
    }

    pub fn check_shapes(&self, problem: &PrimalDualProblem) -> Result<()> {
        check_dim(problem.primal_dim(), self.x.len())?;
        check_dim(problem.num_blocks(), self.v.len())?;
        for (b, v) in problem.blocks.iter().zip(&self.v) {
            check_dim(b.dual_dim(), v.len())?;
        }
        Ok(())
    }
}

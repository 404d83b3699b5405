//! Small strongly monotone problems with closed-form primal-dual solutions,
//! used to exercise the convergence inequalities.
//!
//! On `ℝ^dim` with `L = Id`, `r = 0` and `B = ∂(½‖·‖²)` (so `B⁻¹ = Id`):
//!
//! * `Quadratic`: `A = ∂(½‖·‖²)`, `C ≡ 0`  (γ = 1, η = 0)
//! * `Forward`:   `A = 0`, `C = Id`        (γ = 1, η = 1)
//!
//! optionally with `D⁻¹ = ν Id`. The solution is `v̄ = z/(2+ν)`, `x̄ = (1+ν) v̄`.

use crate::error::Result;
use crate::operators::ScaledIdentity;
use crate::proxlib::{HalfSquaredNorm, QuadraticConjGradient, ZeroFunction};
use crate::solvers::{
    DualBlock, IterateState, PrimalDualProblem, PrimalDualSolution, StrongMonotonicityCert,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToyKind {
    Quadratic,
    Forward,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Toy {
    pub kind: ToyKind,
    pub dim: usize,
    pub z: f64,
    pub nu: f64,
}

impl Toy {
    pub fn scalar(kind: ToyKind) -> Self {
        Self {
            kind,
            dim: 1,
            z: 0.0,
            nu: 0.0,
        }
    }

    /// The toy whose forward constant matches `eta` (0 or positive).
    pub fn for_eta(eta: f64) -> Self {
        Self::scalar(if eta > 0.0 {
            ToyKind::Forward
        } else {
            ToyKind::Quadratic
        })
    }

    pub fn with_z(mut self, z: f64) -> Self {
        self.z = z;
        self
    }

    pub fn with_dinv(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    pub fn problem(&self) -> PrimalDualProblem {
        let mut block = DualBlock::new(HalfSquaredNorm, ScaledIdentity::identity(self.dim));
        if self.nu > 0.0 {
            block = block.with_dinv(QuadraticConjGradient { nu: self.nu });
        }
        let p = match self.kind {
            ToyKind::Quadratic => PrimalDualProblem::new(self.dim, HalfSquaredNorm),
            ToyKind::Forward => PrimalDualProblem::new(self.dim, ZeroFunction)
                .with_forward(ScaledIdentity::identity(self.dim)),
        };
        p.with_z(vec![self.z; self.dim]).with_block(block)
    }

    pub fn eta(&self) -> f64 {
        match self.kind {
            ToyKind::Quadratic => 0.0,
            ToyKind::Forward => 1.0,
        }
    }

    pub fn solution(&self) -> PrimalDualSolution {
        let v = self.z / (2.0 + self.nu);
        PrimalDualSolution {
            x: vec![(1.0 + self.nu) * v; self.dim],
            v: vec![vec![v; self.dim]],
        }
    }

    /// `γ = 1` and `δ = 1 + ν`.
    pub fn cert(&self) -> Result<StrongMonotonicityCert> {
        StrongMonotonicityCert::new(1.0)?.with_delta(vec![1.0 + self.nu])
    }

    pub fn norms_sq(&self) -> Vec<f64> {
        vec![1.0]
    }

    /// Start at `x = 1`, `v = 0`.
    pub fn start(&self) -> IterateState {
        IterateState::new(vec![1.0; self.dim], vec![vec![0.0; self.dim]])
    }
}

//! Operator abstractions shared by every solver.
//!
//! Set-valued operators never appear directly: a maximally monotone `A` is
//! carried by its resolvent `J_{γA}` (a [`ProxMap`]), single-valued Lipschitz
//! pieces by [`LipschitzOp`], and the couplings by [`LinearMap`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::vecops::{dot, norm};

/// A bounded linear operator between flat `f64` spaces together with its adjoint.
pub trait LinearMap: Send + Sync {
    fn domain_dim(&self) -> usize;
    fn codomain_dim(&self) -> usize;

    /// Writes `L x` into `out` (length `codomain_dim`).
    fn apply_into(&self, x: &[f64], out: &mut [f64]);

    /// Writes `L* y` into `out` (length `domain_dim`).
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]);

    /// A known upper bound on the operator norm, if one is available.
    fn norm_bound(&self) -> Option<f64> {
        None
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.codomain_dim()];
        self.apply_into(x, &mut out);
        out
    }

    fn adjoint_apply(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.domain_dim()];
        self.adjoint_into(y, &mut out);
        out
    }
}

/// Resolvent of a maximally monotone operator: `evaluate(x, γ) = J_{γA}(x)`.
///
/// When `A = ∂f` this is `prox_{γf}`.
pub trait ProxMap: Send + Sync {
    fn evaluate(&self, x: &[f64], step: f64) -> Vec<f64>;

    fn descriptor(&self) -> String;
}

/// A single-valued monotone Lipschitz operator (`C`, `∇h`, `D_i⁻¹`, `∇l_i*`).
pub trait LipschitzOp: Send + Sync {
    fn evaluate_into(&self, x: &[f64], out: &mut [f64]);

    fn lipschitz_const(&self) -> f64;

    fn is_zero(&self) -> bool {
        false
    }

    fn evaluate(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        self.evaluate_into(x, &mut out);
        out
    }
}

/// The identically zero operator. Its Lipschitz constant is 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroOp;

impl LipschitzOp for ZeroOp {
    fn evaluate_into(&self, _x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }

    fn lipschitz_const(&self) -> f64 {
        0.0
    }

    fn is_zero(&self) -> bool {
        true
    }
}

/// `x ↦ c·x` on `ℝ^dim`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledIdentity {
    pub dim: usize,
    pub scale: f64,
}

impl ScaledIdentity {
    pub fn new(dim: usize, scale: f64) -> Self {
        Self { dim, scale }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, 1.0)
    }
}

impl LinearMap for ScaledIdentity {
    fn domain_dim(&self) -> usize {
        self.dim
    }

    fn codomain_dim(&self) -> usize {
        self.dim
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, xi) in out.iter_mut().zip(x) {
            *o = self.scale * xi;
        }
    }

    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        self.apply_into(y, out);
    }

    fn norm_bound(&self) -> Option<f64> {
        Some(self.scale.abs())
    }
}

impl LipschitzOp for ScaledIdentity {
    fn evaluate_into(&self, x: &[f64], out: &mut [f64]) {
        self.apply_into(x, out);
    }

    fn lipschitz_const(&self) -> f64 {
        self.scale.abs()
    }

    fn is_zero(&self) -> bool {
        self.scale == 0.0
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::param("matrix dimensions must be positive"));
        }
        crate::error::check_dim(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `vᵀ M v` for square matrices.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        dot(v, &self.apply(v))
    }
}

impl LinearMap for DenseMatrix {
    fn domain_dim(&self) -> usize {
        self.cols
    }

    fn codomain_dim(&self) -> usize {
        self.rows
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (i, yi) in y.iter().enumerate() {
            crate::vecops::axpy(*yi, self.row(i), out);
        }
    }
}

/// A linear operator used as a forward (explicit) monotone term, e.g. `∇h(c) = Kc`
/// for a positive semidefinite `K`.
pub struct LinearForward<M> {
    pub map: M,
    pub lipschitz: f64,
}

impl<M: LinearMap> LipschitzOp for LinearForward<M> {
    fn evaluate_into(&self, x: &[f64], out: &mut [f64]) {
        self.map.apply_into(x, out);
    }

    fn lipschitz_const(&self) -> f64 {
        self.lipschitz
    }
}

impl<M: LinearMap> LinearMap for std::sync::Arc<M> {
    fn domain_dim(&self) -> usize {
        (**self).domain_dim()
    }
    fn codomain_dim(&self) -> usize {
        (**self).codomain_dim()
    }
    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).apply_into(x, out)
    }
    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        (**self).adjoint_into(y, out)
    }
    fn norm_bound(&self) -> Option<f64> {
        (**self).norm_bound()
    }
}

fn check_step(step: f64) -> Result<()> {
    if step > 0.0 && step.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!(
            "step must be positive and finite, got {step}"
        )))
    }
}

/// `prox_{γf*}(x)` from a prox of `f` via Moreau's decomposition:
/// `x − γ·prox_{f/γ}(x/γ)`.
pub fn conjugate_prox(p: &dyn ProxMap, x: &[f64], gamma: f64) -> Result<Vec<f64>> {
    check_step(gamma)?;
    let scaled: Vec<f64> = x.iter().map(|v| v / gamma).collect();
    let inner = p.evaluate(&scaled, 1.0 / gamma);
    Ok(x.iter()
        .zip(&inner)
        .map(|(xi, pi)| xi - gamma * pi)
        .collect())
}

/// `J_{γ⁻¹A⁻¹}(x)` from the resolvent of `A`, arranged so that
/// `J_{γA}(u) + γ·J_{γ⁻¹A⁻¹}(u/γ) = u` for every `u`.
pub fn resolvent_of_inverse(j: &dyn ProxMap, x: &[f64], gamma: f64) -> Result<Vec<f64>> {
    check_step(gamma)?;
    let u: Vec<f64> = x.iter().map(|v| v * gamma).collect();
    let ju = j.evaluate(&u, gamma);
    Ok(u.iter()
        .zip(&ju)
        .map(|(ui, ji)| (ui - ji) / gamma)
        .collect())
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Power iteration on `L*L` from a seeded random start. Returns an estimate of
/// `‖L‖` (never above the true norm, up to rounding).
pub fn estimate_norm(l: &dyn LinearMap, max_iters: usize, tol: f64, seed: u64) -> Result<f64> {
    if max_iters == 0 {
        return Err(Error::param("max_iters must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = random_vector(&mut rng, l.domain_dim());
    let n0 = norm(&v);
    if n0 == 0.0 {
        return Ok(0.0);
    }
    v.iter_mut().for_each(|x| *x /= n0);

    let mut lv = vec![0.0; l.codomain_dim()];
    let mut w = vec![0.0; l.domain_dim()];
    let mut estimate = 0.0_f64;
    for _ in 0..max_iters {
        l.apply_into(&v, &mut lv);
        l.adjoint_into(&lv, &mut w);
        // ‖L v‖² = ⟨L*L v, v⟩ is a lower bound on ‖L‖² for unit v.
        let rayleigh = dot(&lv, &lv);
        let wn = norm(&w);
        if wn == 0.0 {
            return Ok(0.0);
        }
        let next = rayleigh.sqrt();
        let converged = estimate > 0.0 && ((next - estimate).abs() / next) <= tol;
        estimate = estimate.max(next);
        if converged {
            break;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / wn;
        }
    }
    Ok(estimate)
}

/// Largest `|⟨Lx, y⟩ − ⟨x, L*y⟩|` over `trials` seeded random pairs.
pub fn check_adjoint(l: &dyn LinearMap, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..trials.max(1) {
        let x = random_vector(&mut rng, l.domain_dim());
        let y = random_vector(&mut rng, l.codomain_dim());
        let lhs = dot(&l.apply(&x), &y);
        let rhs = dot(&x, &l.adjoint_apply(&y));
        worst = worst.max((lhs - rhs).abs());
    }
    worst
}

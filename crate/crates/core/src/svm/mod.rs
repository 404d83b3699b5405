//! Kernel SVM without bias, trained through the accelerated primal-dual method:
//!
//! ```text
//! min_c ½ cᵀKc + C Σ_i max{1 − Y_i (Kc)_i, 0}
//! ```
//!
//! `h(c) = ½cᵀKc` is the forward term (gradient `Kc`, Lipschitz `‖K‖`, strongly
//! convex with `λ_min(K)`); the `n` hinge terms share `L_i = K` and are fused
//! into one block with a separable conjugate prox.

mod io;

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::index::sample;

pub use io::{load_dataset, read_model_csv, write_model_csv, DatasetFormat, LabelMapping};

use crate::error::{check_dim, Error, Result};
use crate::operators::{estimate_norm, DenseMatrix, LinearForward, LinearMap};
use crate::proxlib::{HingeConjugate, ZeroFunction};
use crate::solvers::{
    accel_init, run, DualBlock, IterateState, Method, PrimalDualProblem, RunHooks, RunOutcome,
    StopRule, StrongMonotonicityCert,
};
use crate::vecops::dist_sq;

/// Smallest eigenvalue accepted as a strong-convexity constant.
pub const LAMBDA_MIN_TOL: f64 = 1e-8;

/// `n` labelled samples; features are an `n × d` row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: DenseMatrix,
    labels: Vec<f64>,
}

impl Dataset {
    pub fn new(features: DenseMatrix, labels: Vec<f64>) -> Result<Self> {
        check_dim(features.rows(), labels.len())?;
        if let Some(y) = labels.iter().find(|y| **y != 1.0 && **y != -1.0) {
            return Err(Error::param(format!("labels must be +1 or -1, got {y}")));
        }
        Ok(Self { features, labels })
    }

    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<f64>) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::param("ragged feature rows"));
        }
        Self::new(
            DenseMatrix::from_row_major(rows.len(), d, rows.concat())?,
            labels,
        )
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        self.features.row(i)
    }

    /// `(1/n Σ‖X_i‖²)^{-1/2}`, the factor that makes the mean squared norm 1.
    pub fn normalization_scale(&self) -> Result<f64> {
        let ms = self.features.as_slice().iter().map(|v| v * v).sum::<f64>() / self.len() as f64;
        if !(ms > 0.0) {
            return Err(Error::param("all feature vectors are zero"));
        }
        Ok(1.0 / ms.sqrt())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let data = self
            .features
            .as_slice()
            .iter()
            .map(|v| v * factor)
            .collect();
        Self {
            features: DenseMatrix::from_row_major(self.len(), self.dim(), data)
                .expect("same shape"),
            labels: self.labels.clone(),
        }
    }

    pub fn select(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.dim());
        for &i in idx {
            data.extend_from_slice(self.sample(i));
        }
        Self {
            features: DenseMatrix::from_row_major(idx.len(), self.dim(), data)
                .expect("nonempty selection"),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// `k` distinct samples chosen uniformly with a seeded generator, in index order.
    pub fn subsample(&self, k: usize, seed: u64) -> Result<Self> {
        if k == 0 || k > self.len() {
            return Err(Error::param(format!(
                "cannot draw {k} of {} samples",
                self.len()
            )));
        }
        let mut idx = sample(&mut crate::random::rng(seed), self.len(), k).into_vec();
        idx.sort_unstable();
        Ok(self.select(&idx))
    }
}

/// Two Gaussian clouds with unit covariance centred at `±separation/2` along
/// every axis; samples alternate `+1`, `−1`.
pub fn synthetic_blobs(n: usize, d: usize, separation: f64, seed: u64) -> Result<Dataset> {
    if n == 0 || d == 0 {
        return Err(Error::param("need at least one sample and one feature"));
    }
    let z = crate::random::standard_normals(&mut crate::random::rng(seed), n * d);
    let half = separation / (2.0 * (d as f64).sqrt());
    let labels: Vec<f64> = (0..n)
        .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    let data = z
        .iter()
        .enumerate()
        .map(|(p, e)| e + labels[p / d] * half)
        .collect();
    Dataset::new(DenseMatrix::from_row_major(n, d, data)?, labels)
}

/// `κ(x, y) = exp(−‖x − y‖²/(2σ²))`.
pub fn gaussian_kernel(x: &[f64], y: &[f64], sigma: f64) -> f64 {
    (-dist_sq(x, y) / (2.0 * sigma * sigma)).exp()
}

/// `K_{ij} = κ(X_i, X_j)`, each unordered pair evaluated once.
pub fn gram_matrix(x: &DenseMatrix, sigma: f64) -> Result<DenseMatrix> {
    if !(sigma > 0.0) {
        return Err(Error::param("kernel sigma must be positive"));
    }
    let n = x.rows();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        k[i * n + i] = 1.0;
        for j in 0..i {
            let v = gaussian_kernel(x.row(i), x.row(j), sigma);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    DenseMatrix::from_row_major(n, n, k)
}

/// Smallest eigenvalue of a symmetric matrix (dense symmetric eigensolver).
pub fn min_eigenvalue(k: &DenseMatrix) -> Result<f64> {
    if !k.is_symmetric() {
        return Err(Error::param("matrix is not symmetric"));
    }
    let m = DMatrix::from_row_slice(k.rows(), k.cols(), k.as_slice());
    let eig = SymmetricEigen::new(m);
    Ok(eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig {
    pub c: f64,
    pub kernel_sigma: f64,
    pub iterations: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            kernel_sigma: 0.5,
            iterations: 1500,
        }
    }
}

impl SvmConfig {
    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.kernel_sigma > 0.0) {
            return Err(Error::param("C and kernel sigma must be positive"));
        }
        Ok(())
    }
}

/// The assembled training problem with the constants its step sizes need.
pub struct SvmProblem {
    pub problem: PrimalDualProblem,
    pub cert: StrongMonotonicityCert,
    /// `‖K‖`, the Lipschitz constant of `∇h`.
    pub k_norm: f64,
    pub gram: Arc<DenseMatrix>,
}

impl SvmProblem {
    /// `τ₀ = 0.99·2γ/‖K‖`, `λ = ‖K‖ + 1`,
    /// `σ₀ = √(1 + τ₀(2γ − ‖K‖τ₀)/λ)/(n τ₀ ‖K‖²)`.
    ///
    /// The `1/n` comes from splitting the hinge sum into `n` blocks with the
    /// same `L_i = K`; with one fused block that `σ` reproduces those iterates.
    pub fn default_init(&self) -> (f64, f64, f64) {
        let (g, k) = (self.cert.gamma, self.k_norm);
        let n = self.gram.rows() as f64;
        let tau0 = 0.99 * 2.0 * g / k;
        let lambda = k + 1.0;
        let sigma0 = (1.0 + tau0 * (2.0 * g - k * tau0) / lambda).sqrt() / (n * tau0 * k * k);
        (tau0, sigma0, lambda)
    }

    pub fn accel_method(&self) -> Result<Method> {
        let (tau0, sigma0, lambda) = self.default_init();
        let norms_sq = [self.k_norm * self.k_norm];
        Ok(Method::Accel(accel_init(
            tau0,
            &[sigma0],
            lambda,
            &self.cert,
            self.k_norm,
            &norms_sq,
        )?))
    }
}

/// `f ≡ 0`, `C c = Kc`, one fused hinge block with `L = K`.
pub fn build_svm_problem(k: &DenseMatrix, labels: &[f64], cfg: &SvmConfig) -> Result<SvmProblem> {
    cfg.validate()?;
    check_dim(k.rows(), labels.len())?;
    let lambda_min = min_eigenvalue(k)?;
    if lambda_min <= LAMBDA_MIN_TOL {
        return Err(Error::NotStronglyConvex { lambda_min });
    }
    let gram = Arc::new(k.clone());
    let k_norm = estimate_norm(gram.as_ref(), 10_000, 1e-13, 0)?;
    let problem = PrimalDualProblem::new(k.rows(), ZeroFunction)
        .with_forward(LinearForward {
            map: Arc::clone(&gram),
            lipschitz: k_norm,
        })
        .with_block(DualBlock::new(
            HingeConjugate::new(labels.to_vec(), cfg.c)?,
            Arc::clone(&gram),
        ));
    Ok(SvmProblem {
        problem,
        cert: StrongMonotonicityCert::new(lambda_min)?,
        k_norm,
        gram,
    })
}

/// `½cᵀKc + C Σ max{1 − Y_i(Kc)_i, 0}`.
pub fn svm_objective(k: &DenseMatrix, labels: &[f64], c_reg: f64, c: &[f64]) -> f64 {
    let kc = k.apply(c);
    let hinge: f64 = kc
        .iter()
        .zip(labels)
        .map(|(v, y)| (1.0 - y * v).max(0.0))
        .sum();
    0.5 * crate::vecops::dot(c, &kc) + c_reg * hinge
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelModel {
    pub coefficients: Vec<f64>,
    /// Training features after normalization.
    pub support_features: DenseMatrix,
    pub kernel_sigma: f64,
    pub c: f64,
    /// Multiplier applied to new inputs so they match the normalized training data.
    pub feature_scale: f64,
}

impl KernelModel {
    pub fn decision_value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.support_features.cols(), x.len())?;
        let xs: Vec<f64> = x.iter().map(|v| v * self.feature_scale).collect();
        Ok(self
            .coefficients
            .iter()
            .enumerate()
            .map(|(j, c)| c * gaussian_kernel(&xs, self.support_features.row(j), self.kernel_sigma))
            .sum())
    }

    /// Sign of the decision value; exactly zero maps to `+1`.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(if self.decision_value(x)? >= 0.0 {
            1.0
        } else {
            -1.0
        })
    }
}

/// Percentage of samples whose predicted class differs from the label.
pub fn misclassification_rate(model: &KernelModel, data: &Dataset) -> Result<f64> {
    let mut wrong = 0usize;
    for i in 0..data.len() {
        if model.predict(data.sample(i))? != data.labels()[i] {
            wrong += 1;
        }
    }
    Ok(100.0 * wrong as f64 / data.len() as f64)
}

pub struct TrainReport {
    pub model: KernelModel,
    pub outcome: RunOutcome,
    pub lambda_min: f64,
    pub k_norm: f64,
}

/// Normalizes features, builds `K` and runs the accelerated method from zero
/// for `cfg.iterations` steps. With `trace_objective` the diagnostics carry
/// the training objective of every iterate.
pub fn train_detailed(
    data: &Dataset,
    cfg: &SvmConfig,
    trace_objective: bool,
) -> Result<TrainReport> {
    cfg.validate()?;
    let scale = data.normalization_scale()?;
    let normalized = data.scaled(scale);
    let k = gram_matrix(normalized.features(), cfg.kernel_sigma)?;
    let svm = build_svm_problem(&k, data.labels(), cfg)?;
    let objective = |c: &[f64]| svm_objective(&k, data.labels(), cfg.c, c);
    let hooks = RunHooks {
        objective: if trace_objective {
            Some(&objective)
        } else {
            None
        },
        ..RunHooks::default()
    };
    let outcome = run(
        &svm.problem,
        svm.accel_method()?,
        IterateState::zeros(&svm.problem),
        &StopRule::iterations(cfg.iterations),
        hooks,
    )?;
    let model = KernelModel {
        coefficients: outcome.state.x.clone(),
        support_features: normalized.features().clone(),
        kernel_sigma: cfg.kernel_sigma,
        c: cfg.c,
        feature_scale: scale,
    };
    Ok(TrainReport {
        model,
        outcome,
        lambda_min: svm.cert.gamma,
        k_norm: svm.k_norm,
    })
}

pub fn train(data: &Dataset, cfg: &SvmConfig) -> Result<KernelModel> {
    train_detailed(data, cfg, false).map(|r| r.model)
}

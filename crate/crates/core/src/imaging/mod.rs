//! Image denoising with a total-variation and a Haar-wavelet penalty:
//!
//! ```text
//! min_x ½‖x − b‖² + δ_{[0,1]^k}(x) + λ₁ TV(x) + λ₂ ‖W x‖₁
//! ```
//!
//! solved as a two-block primal-dual problem with `L₁ = ∇` and `L₂ = W`.

mod gradient;
mod haar;
mod pgm;

use std::fmt::Write as _;

pub use gradient::{grad_adjoint, grad_apply, Gradient};
pub use haar::{haar_forward, haar_inverse, Haar};
pub use pgm::{decode_pgm, encode_pgm, read_pgm, write_pgm};

use crate::error::{check_dim, Error, Result};
use crate::operators::LinearMap;
use crate::proxlib::{BoxProjection, PixelwiseBall, QuadBoxProx};
use crate::solvers::{
    accel_init, run, vu_init, Algorithm, DistanceMetric, DualBlock, IterateState, Method,
    PrimalDualProblem, RunHooks, RunOutcome, StopRule, StrongMonotonicityCert,
};

/// Greyscale image, row-major, `data[i*cols + j]` is pixel `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::param("image dimensions must be positive"));
        }
        check_dim(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::param("ragged rows"));
        }
        Self::from_vec(rows.len(), cols, rows.concat())
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self::from_vec(rows, cols, vec![value; rows * cols]).expect("positive dimensions")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Same dimensions, new pixel values.
    pub fn with_data(&self, data: Vec<f64>) -> Result<Self> {
        Self::from_vec(self.rows, self.cols, data)
    }

    pub fn clipped(&self) -> Self {
        Self {
            data: self.data.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
            ..*self
        }
    }
}

/// Vertical (`u`) and horizontal (`v`) forward differences.
#[derive(Debug, Clone, PartialEq)]
pub struct GradField {
    pub rows: usize,
    pub cols: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl GradField {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            u: vec![0.0; rows * cols],
            v: vec![0.0; rows * cols],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TvVariant {
    Isotropic,
    Anisotropic,
}

impl std::str::FromStr for TvVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iso" | "isotropic" => Ok(TvVariant::Isotropic),
            "aniso" | "anisotropic" => Ok(TvVariant::Anisotropic),
            other => Err(Error::Config(format!("unknown TV variant '{other}'"))),
        }
    }
}

impl std::fmt::Display for TvVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TvVariant::Isotropic => "iso",
            TvVariant::Anisotropic => "aniso",
        })
    }
}

/// Sum over pixels of the ℓ₂ (isotropic) or ℓ₁ (anisotropic) norm of the
/// forward differences. The last row and column contribute only the
/// difference along the other axis.
pub fn tv_value(x: &Image, variant: TvVariant) -> f64 {
    let g = grad_apply(x);
    g.u.iter()
        .zip(&g.v)
        .map(|(a, b)| match variant {
            TvVariant::Isotropic => a.hypot(*b),
            TvVariant::Anisotropic => a.abs() + b.abs(),
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenoiseConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    pub variant: TvVariant,
    pub wavelet_levels: usize,
}

impl DenoiseConfig {
    pub fn new(lambda1: f64, lambda2: f64, variant: TvVariant) -> Self {
        Self {
            lambda1,
            lambda2,
            variant,
            wavelet_levels: 4,
        }
    }

    /// Regularization weights used for the two noise levels 0.06 and 0.12;
    /// other levels get the weights of the nearer one.
    pub fn for_noise_level(sigma: f64, variant: TvVariant) -> Self {
        let lambda1 = if sigma <= 0.09 { 0.035 } else { 0.07 };
        Self::new(lambda1, 0.01, variant)
    }

    fn validate(&self, rows: usize, cols: usize) -> Result<()> {
        if !(self.lambda1 > 0.0 && self.lambda2 > 0.0) {
            return Err(Error::param("lambda1 and lambda2 must be positive"));
        }
        Haar::new(rows, cols, self.wavelet_levels).map(|_| ())
    }
}

/// Builds the two-block problem for noisy data `b`. `C ≡ 0`; the quadratic
/// data term sits in the primal prox, which makes it 1-strongly monotone.
pub fn build_denoise_problem(
    b: &Image,
    cfg: &DenoiseConfig,
) -> Result<(PrimalDualProblem, StrongMonotonicityCert)> {
    cfg.validate(b.rows(), b.cols())?;
    let grad = Gradient::for_image(b);
    let tv_block = match cfg.variant {
        TvVariant::Isotropic => DualBlock::new(
            PixelwiseBall {
                radius: cfg.lambda1,
            },
            grad,
        ),
        TvVariant::Anisotropic => DualBlock::new(BoxProjection::symmetric(cfg.lambda1), grad),
    };
    let haar = Haar::new(b.rows(), b.cols(), cfg.wavelet_levels)?;
    let problem = PrimalDualProblem::new(
        b.len(),
        QuadBoxProx {
            b: b.as_slice().to_vec(),
        },
    )
    .with_block(tv_block)
    .with_block(DualBlock::new(BoxProjection::symmetric(cfg.lambda2), haar));
    Ok((problem, StrongMonotonicityCert::new(1.0)?))
}

/// `½‖x − b‖² + λ₁TV(x) + λ₂‖Wx‖₁` (the box constraint is not evaluated).
pub fn denoise_objective(x: &Image, b: &Image, cfg: &DenoiseConfig) -> Result<f64> {
    check_dim(b.len(), x.len())?;
    let fid = 0.5 * crate::vecops::dist_sq(x.as_slice(), b.as_slice());
    let w = Haar::new(x.rows(), x.cols(), cfg.wavelet_levels)?;
    let l1: f64 = w.apply(x.as_slice()).iter().map(|c| c.abs()).sum();
    Ok(fid + cfg.lambda1 * tv_value(x, cfg.variant) + cfg.lambda2 * l1)
}

/// Step sizes for the denoising runs. The defaults satisfy the accelerated
/// initialization with `‖∇‖² ≤ 8`, `‖W‖ = 1` (`50·(8·0.0241 + 0.008) ≈ 10.04 ≤ √101`)
/// and the baseline condition (`0.35·(8·0.2 + 0.01) = 0.5635 < 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenoiseSteps {
    pub tau0: f64,
    pub sigma0: [f64; 2],
    pub lambda: f64,
    pub vu_tau: f64,
    pub vu_sigma: [f64; 2],
}

impl Default for DenoiseSteps {
    fn default() -> Self {
        Self {
            tau0: 50.0,
            sigma0: [0.0241, 0.008],
            lambda: 1.0,
            vu_tau: 0.35,
            vu_sigma: [0.2, 0.01],
        }
    }
}

impl DenoiseSteps {
    /// Validated method for `problem`; the linear-rate method does not apply
    /// because the dual functions are indicators (not strongly convex conjugates).
    pub fn method(
        &self,
        algorithm: Algorithm,
        problem: &PrimalDualProblem,
        cert: &StrongMonotonicityCert,
    ) -> Result<Method> {
        let norms_sq = problem.norms_sq(0)?;
        match algorithm {
            Algorithm::Accel => Ok(Method::Accel(accel_init(
                self.tau0,
                &self.sigma0,
                self.lambda,
                cert,
                problem.eta(),
                &norms_sq,
            )?)),
            Algorithm::Vu => {
                let (beta, nu) = problem.vu_constants();
                Ok(Method::Vu(vu_init(self.vu_tau, &self.vu_sigma, beta, &nu, &norms_sq)?))
            }
            Algorithm::Linear => Err(Error::Config(
                "the linear-rate method needs strongly monotone dual operators, which denoising lacks".into(),
            )),
        }
    }
}

/// Start point: the clipped data and zero duals.
pub fn denoise_start(b: &Image, problem: &PrimalDualProblem) -> IterateState {
    let mut s = IterateState::zeros(problem);
    s.x = b.clipped().into_vec();
    s.x_prev = s.x.clone();
    s
}

/// Runs `algorithm` on the denoising problem for `b`. With a reference the
/// distance column is the RMSE to it and the run stops once it is `≤ tol`.
pub fn denoise(
    b: &Image,
    cfg: &DenoiseConfig,
    steps: &DenoiseSteps,
    algorithm: Algorithm,
    max_iters: usize,
    reference: Option<(&Image, Option<f64>)>,
) -> Result<(Image, RunOutcome)> {
    let (problem, cert) = build_denoise_problem(b, cfg)?;
    let method = steps.method(algorithm, &problem, &cert)?;
    let stop = StopRule {
        max_iters,
        reference: reference.map(|(r, _)| r.as_slice().to_vec()),
        tol: reference.and_then(|(_, t)| t),
        metric: DistanceMetric::Rmse,
    };
    if let Some((r, _)) = reference {
        check_dim(b.len(), r.len())?;
    }
    let outcome = run(
        &problem,
        method,
        denoise_start(b, &problem),
        &stop,
        RunHooks::default(),
    )?;
    let img = b.with_data(outcome.state.x.clone())?;
    Ok((img, outcome))
}

/// High-accuracy solution by `iters` accelerated iterations (used as the RMSE reference).
pub fn reference_solution(b: &Image, cfg: &DenoiseConfig, iters: usize) -> Result<Image> {
    denoise(
        b,
        cfg,
        &DenoiseSteps::default(),
        Algorithm::Accel,
        iters,
        None,
    )
    .map(|(x, _)| x)
}

/// `(n, rmse)` rows from a run whose distance column is an RMSE.
pub fn rmse_csv(outcome: &RunOutcome) -> String {
    let mut out = String::from("n,rmse\n");
    for r in &outcome.diagnostics.records {
        if let Some(d) = r.dist_to_ref {
            let _ = writeln!(out, "{},{d:.16e}", r.n);
        }
    }
    out
}

pub fn add_gaussian_noise(x: &Image, sigma: f64, seed: u64) -> Image {
    let noise = crate::random::standard_normals(&mut crate::random::rng(seed), x.len());
    let data = x
        .as_slice()
        .iter()
        .zip(&noise)
        .map(|(v, z)| v + sigma * z)
        .collect();
    x.with_data(data).expect("same shape")
}

pub fn rmse(x: &Image, reference: &Image) -> Result<f64> {
    check_dim(reference.len(), x.len())?;
    Ok(DistanceMetric::Rmse.eval(x.as_slice(), reference.as_slice()))
}

/// Piecewise-constant test image: a background with a rectangle, a disc,
/// a bright square and a dark bar, all with sharp edges.
pub fn synthetic_phantom(rows: usize, cols: usize) -> Image {
    let mut data = vec![0.2; rows * cols];
    let (r, c) = (rows as f64, cols as f64);
    for i in 0..rows {
        for j in 0..cols {
            let (y, x) = ((i as f64 + 0.5) / r, (j as f64 + 0.5) / c);
            let mut v = 0.2;
            if (0.15..0.55).contains(&y) && (0.1..0.45).contains(&x) {
                v = 0.7;
            }
            if (y - 0.62).powi(2) + (x - 0.65).powi(2) < 0.06 {
                v = 0.5;
            }
            if (0.2..0.35).contains(&y) && (0.65..0.8).contains(&x) {
                v = 1.0;
            }
            if (0.78..0.88).contains(&y) && (0.1..0.5).contains(&x) {
                v = 0.0;
            }
            data[i * cols + j] = v;
        }
    }
    Image::from_vec(rows, cols, data).expect("positive dimensions")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_two_by_two() {
        let x = Image::from_rows(&[vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(tv_value(&x, TvVariant::Isotropic), 2.0);
        assert_eq!(tv_value(&x, TvVariant::Anisotropic), 2.0);
        let c = Image::filled(5, 4, 0.3);
        assert_eq!(tv_value(&c, TvVariant::Isotropic), 0.0);
        assert_eq!(tv_value(&c, TvVariant::Anisotropic), 0.0);
    }

    /// Literal transcription of the displayed sums with 1-based indices.
    fn tv_by_formula(x: &Image, iso: bool) -> f64 {
        let (m, n) = (x.rows(), x.cols());
        let p = |i: usize, j: usize| x.get(i - 1, j - 1);
        let mut s = 0.0;
        for i in 1..m {
            for j in 1..n {
                let (a, b) = (p(i + 1, j) - p(i, j), p(i, j + 1) - p(i, j));
                s += if iso { a.hypot(b) } else { a.abs() + b.abs() };
            }
        }
        for i in 1..m {
            s += (p(i + 1, n) - p(i, n)).abs();
        }
        for j in 1..n {
            s += (p(m, j + 1) - p(m, j)).abs();
        }
        s
    }

    #[test]
    fn tv_matches_displayed_sums() {
        let x = add_gaussian_noise(&Image::filled(7, 5, 0.5), 0.3, 11);
        for iso in [true, false] {
            let v = if iso {
                TvVariant::Isotropic
            } else {
                TvVariant::Anisotropic
            };
            assert!((tv_value(&x, v) - tv_by_formula(&x, iso)).abs() < 1e-12);
        }
        assert!(tv_value(&x, TvVariant::Anisotropic) >= tv_value(&x, TvVariant::Isotropic));
    }

    #[test]
    fn rmse_examples() {
        let a = Image::from_vec(1, 2, vec![0.0, 0.0]).unwrap();
        let b = Image::from_vec(1, 2, vec![0.3, 0.4]).unwrap();
        assert!((rmse(&b, &a).unwrap() - 0.125f64.sqrt()).abs() < 1e-15);
        assert_eq!(rmse(&a, &a).unwrap(), 0.0);
        let c = Image::filled(3, 3, 0.1);
        assert!((rmse(&c, &Image::filled(3, 3, 0.0)).unwrap() - 0.1).abs() < 1e-15);
        assert!(rmse(&a, &c).is_err());
    }

    #[test]
    fn noise_is_seeded_and_scaled() {
        let x = Image::filled(256, 256, 0.5);
        assert_eq!(add_gaussian_noise(&x, 0.0, 1), x);
        let y = add_gaussian_noise(&x, 0.06, 7);
        assert_eq!(y, add_gaussian_noise(&x, 0.06, 7));
        assert_ne!(y, add_gaussian_noise(&x, 0.06, 8));
        let d: Vec<f64> = y.as_slice().iter().map(|v| v - 0.5).collect();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        let var = d.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (d.len() - 1) as f64;
        assert!((var.sqrt() / 0.06 - 1.0).abs() < 0.05);
    }

    #[test]
    fn problem_shape_and_constants() {
        let b = synthetic_phantom(32, 32);
        let (p, cert) =
            build_denoise_problem(&b, &DenoiseConfig::new(0.035, 0.01, TvVariant::Isotropic))
                .unwrap();
        assert_eq!(cert.gamma, 1.0);
        assert_eq!(p.num_blocks(), 2);
        assert_eq!(p.eta(), 0.0);
        let n = p.norms_sq(0).unwrap();
        assert!(n[0] <= 8.0 + 1e-12 && (n[1] - 1.0).abs() < 1e-12);
        assert!(build_denoise_problem(
            &synthetic_phantom(24, 32),
            &DenoiseConfig::new(0.1, 0.1, TvVariant::Isotropic)
        )
        .is_err());
    }

    #[test]
    fn default_steps_are_feasible() {
        let b = synthetic_phantom(16, 16);
        let (p, cert) =
            build_denoise_problem(&b, &DenoiseConfig::new(0.035, 0.01, TvVariant::Anisotropic))
                .unwrap();
        let s = DenoiseSteps::default();
        assert!(s.method(Algorithm::Accel, &p, &cert).is_ok());
        assert!(s.method(Algorithm::Vu, &p, &cert).is_ok());
        assert!(matches!(
            s.method(Algorithm::Linear, &p, &cert),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn vanishing_weights_return_clipped_data() {
        let b = add_gaussian_noise(&synthetic_phantom(16, 16), 0.12, 3);
        let cfg = DenoiseConfig::new(1e-8, 1e-8, TvVariant::Isotropic);
        let (x, _) = denoise(
            &b,
            &cfg,
            &DenoiseSteps::default(),
            Algorithm::Accel,
            500,
            None,
        )
        .unwrap();
        let clip = b.clipped();
        assert!(x
            .as_slice()
            .iter()
            .zip(clip.as_slice())
            .all(|(a, c)| (a - c).abs() < 1e-6));
    }

    #[test]
    fn solver_improves_on_clipped_data() {
        let b = add_gaussian_noise(&synthetic_phantom(32, 32), 0.06, 5);
        for variant in [TvVariant::Isotropic, TvVariant::Anisotropic] {
            let cfg = DenoiseConfig::for_noise_level(0.06, variant);
            let (x, _) = denoise(
                &b,
                &cfg,
                &DenoiseSteps::default(),
                Algorithm::Accel,
                300,
                None,
            )
            .unwrap();
            let f_x = denoise_objective(&x, &b, &cfg).unwrap();
            let f_clip = denoise_objective(&b.clipped(), &b, &cfg).unwrap();
            assert!(f_x <= f_clip, "{variant}: {f_x} > {f_clip}");
        }
    }

    #[test]
    fn noise_level_regularization_weights() {
        let lo = DenoiseConfig::for_noise_level(0.06, TvVariant::Isotropic);
        let hi = DenoiseConfig::for_noise_level(0.12, TvVariant::Isotropic);
        assert_eq!(
            (lo.lambda1, lo.lambda2, lo.wavelet_levels),
            (0.035, 0.01, 4)
        );
        assert_eq!((hi.lambda1, hi.lambda2), (0.07, 0.01));
    }
}

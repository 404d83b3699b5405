//! Concrete proximal maps and projections for the denoising and SVM problems.
//!
//! Every prox here has a partner type implementing the prox of the convex
//! conjugate in closed form ([`BoxSupport`], [`QuadBoxConjugate`],
//! [`GroupSoftThreshold`], [`HingeLoss`], ...). The pairs are derived
//! independently so that Moreau's decomposition is a real check, not a tautology.

use crate::error::{check_dim, Error, Result};
use crate::operators::{LipschitzOp, ProxMap};

/// Coordinatewise interval `[lo, hi]` in `ℝ^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSpec {
    pub lo: f64,
    pub hi: f64,
    pub dim: usize,
}

impl BoxSpec {
    pub fn new(lo: f64, hi: f64, dim: usize) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::param(format!(
                "box bounds must satisfy lo <= hi, got [{lo}, {hi}]"
            )));
        }
        if dim == 0 {
            return Err(Error::param("box dimension must be positive"));
        }
        Ok(Self { lo, hi, dim })
    }

    /// The symmetric box `[-r, r]^dim`.
    pub fn symmetric(radius: f64, dim: usize) -> Result<Self> {
        Self::new(-radius, radius, dim)
    }
}

pub fn project_box(x: &[f64], bx: &BoxSpec) -> Vec<f64> {
    x.iter().map(|v| v.clamp(bx.lo, bx.hi)).collect()
}

/// `prox_{σf}(p)` for `f(x) = ½‖x − b‖² + δ_{[0,1]^k}(x)`:
/// `P_{[0,1]^k}((p + σb)/(1 + σ))`.
pub fn prox_quad_box(p: &[f64], sigma: f64, b: &[f64]) -> Result<Vec<f64>> {
    check_dim(b.len(), p.len())?;
    if !(sigma > 0.0) {
        return Err(Error::param("sigma must be positive"));
    }
    Ok(quad_box(p, sigma, b))
}

fn quad_box(p: &[f64], sigma: f64, b: &[f64]) -> Vec<f64> {
    let inv = 1.0 / (1.0 + sigma);
    p.iter()
        .zip(b)
        .map(|(pi, bi)| ((pi + sigma * bi) * inv).clamp(0.0, 1.0))
        .collect()
}

/// Per-pixel projection of `(p, q)` onto the ℓ₂ ball of radius `lambda1`.
pub fn project_pixelwise_ball(p: &[f64], q: &[f64], lambda1: f64) -> (Vec<f64>, Vec<f64>) {
    let mut po = p.to_vec();
    let mut qo = q.to_vec();
    for (pi, qi) in po.iter_mut().zip(qo.iter_mut()) {
        let n = pi.hypot(*qi);
        if n > lambda1 {
            let s = lambda1 / n;
            *pi *= s;
            *qi *= s;
        }
    }
    (po, qo)
}

fn check_label(y: f64) -> Result<()> {
    if y == 1.0 || y == -1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("label must be +1 or -1, got {y}")))
    }
}

/// Projection onto `Y[−C, 0]`, i.e. `[−C, 0]` for `Y = +1` and `[0, C]` for `Y = −1`.
fn hinge_interval(value: f64, label: f64, c: f64) -> f64 {
    if label > 0.0 {
        value.clamp(-c, 0.0)
    } else {
        value.clamp(0.0, c)
    }
}

/// Prox of `μ g_i*` for the single-coordinate hinge term `g_i(w) = C·max{1 − Y_i w_i, 0}`:
/// zero except at coordinate `i`, where it is `P_{Y_i[−C,0]}(v_i − μY_i)`.
pub fn prox_hinge_conj(v: &[f64], i: usize, mu: f64, label: f64, c: f64) -> Result<Vec<f64>> {
    check_label(label)?;
    if i >= v.len() {
        return Err(Error::param(format!(
            "coordinate {i} out of range for length {}",
            v.len()
        )));
    }
    if !(mu >= 0.0) || !(c > 0.0) {
        return Err(Error::param("mu must be nonnegative and C positive"));
    }
    let mut out = vec![0.0; v.len()];
    out[i] = hinge_interval(v[i] - mu * label, label, c);
    Ok(out)
}

/// All coordinates of [`prox_hinge_conj`] at once, which is the prox of the
/// conjugate of the separable sum `Σ_i C·max{1 − Y_i w_i, 0}`.
pub fn prox_separable_hinge_conj(v: &[f64], mu: f64, labels: &[f64], c: f64) -> Result<Vec<f64>> {
    check_dim(labels.len(), v.len())?;
    for &y in labels {
        check_label(y)?;
    }
    Ok(separable_hinge(v, mu, labels, c))
}

fn separable_hinge(v: &[f64], mu: f64, labels: &[f64], c: f64) -> Vec<f64> {
    v.iter()
        .zip(labels)
        .map(|(vi, &y)| hinge_interval(vi - mu * y, y, c))
        .collect()
}

/// `∇l*(v) = ν v` for `l = ‖·‖²/(2ν)`.
pub fn grad_quadratic_conj(v: &[f64], nu: f64) -> Vec<f64> {
    v.iter().map(|x| nu * x).collect()
}

// ---------------------------------------------------------------------------
// ProxMap implementations
// ---------------------------------------------------------------------------

/// `f ≡ 0`; the resolvent is the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroFunction;

impl ProxMap for ZeroFunction {
    fn evaluate(&self, x: &[f64], _step: f64) -> Vec<f64> {
        x.to_vec()
    }
    fn descriptor(&self) -> String {
        "zero".into()
    }
}

/// `δ_{0}`, the conjugate of `f ≡ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct OriginIndicator;

impl ProxMap for OriginIndicator {
    fn evaluate(&self, x: &[f64], _step: f64) -> Vec<f64> {
        vec![0.0; x.len()]
    }
    fn descriptor(&self) -> String {
        "indicator of the origin".into()
    }
}

/// `f = ½‖·‖²`, self-conjugate; `prox_{γf}(u) = u/(1+γ)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HalfSquaredNorm;

impl ProxMap for HalfSquaredNorm {
    fn evaluate(&self, x: &[f64], step: f64) -> Vec<f64> {
        x.iter().map(|v| v / (1.0 + step)).collect()
    }
    fn descriptor(&self) -> String {
        "half squared norm".into()
    }
}

/// Indicator of `[lo, hi]^k`; the prox is the projection for every step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxProjection {
    pub lo: f64,
    pub hi: f64,
}

impl BoxProjection {
    pub fn uniform(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "box bounds must satisfy lo <= hi");
        Self { lo, hi }
    }

    pub fn symmetric(radius: f64) -> Self {
        Self::uniform(-radius, radius)
    }
}

impl ProxMap for BoxProjection {
    fn evaluate(&self, x: &[f64], _step: f64) -> Vec<f64> {
        x.iter().map(|v| v.clamp(self.lo, self.hi)).collect()
    }
    fn descriptor(&self) -> String {
        format!("projection onto [{}, {}]^k", self.lo, self.hi)
    }
}

/// Support function of `[lo, hi]^k`, `σ(s) = Σ max{lo·s_j, hi·s_j}`
/// (for a symmetric box this is `r‖·‖₁`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxSupport {
    pub lo: f64,
    pub hi: f64,
}

impl ProxMap for BoxSupport {
    fn evaluate(&self, x: &[f64], step: f64) -> Vec<f64> {
        x.iter()
            .map(|&y| {
                if y > step * self.hi {
                    y - step * self.hi
                } else if y < step * self.lo {
                    y - step * self.lo
                } else {
                    0.0
                }
            })
            .collect()
    }
    fn descriptor(&self) -> String {
        format!("support function of [{}, {}]^k", self.lo, self.hi)
    }
}

/// `f(x) = ½‖x − b‖² + δ_{[0,1]^k}(x)`, 1-strongly convex.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadBoxProx {
    pub b: Vec<f64>,
}

impl ProxMap for QuadBoxProx {
    fn evaluate(&self, x: &[f64], step: f64) -> Vec<f64> {
        quad_box(x, step, &self.b)
    }
    fn descriptor(&self) -> String {
        "half squared distance to data on [0,1]^k".into()
    }
}

/// Conjugate of [`QuadBoxProx`]. Per coordinate, `f*'(s) = clamp(b + s, 0, 1)`,
/// so the prox solves `s + t·clamp(b + s, 0, 1) = u` piecewise.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadBoxConjugate {
    pub b: Vec<f64>,
}

impl ProxMap for QuadBoxConjugate {
    fn evaluate(&self, x: &[f64], step: f64) -> Vec<f64> {
        x.iter()
            .zip(&self.b)
            .map(|(&u, &b)| {
                let mid = (u - step * b) / (1.0 + step);
                if b + mid < 0.0 {
                    u
                } else if b + mid > 1.0 {
                    u - step
                } else {
                    mid
                }
            })
            .collect()
    }
    fn descriptor(&self) -> String {
        "conjugate of half squared distance on [0,1]^k".into()
    }
}

/// Projection onto `{(p, q) : √(p²+q²) ≤ λ per pixel}`. The input is the two
/// planes concatenated, `p` first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelwiseBall {
    pub radius: f64,
}

impl ProxMap for PixelwiseBall {
    fn evaluate(&self, x: &[f64], _step: f64) -> Vec<f64> {
        let k = x.len() / 2;
        let (p, q) = project_pixelwise_ball(&x[..k], &x[k..], self.radius);
        let mut out = p;
        out.extend(q);
        out
    }
    fn descriptor(&self) -> String {
        format!("pixelwise l2 ball of radius {}", self.radius)
    }
}

/// `λ Σ_pixels ‖(p, q)‖₂`, the conjugate of [`PixelwiseBall`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupSoftThreshold {
    pub weight: f64,
}

impl ProxMap for GroupSoftThreshold {
    fn evaluate(&self, x: &[f64], step: f64) -> Vec<f64> {
        let k = x.len() / 2;
        let mut out = x.to_vec();
        let thresh = step * self.weight;
        for j in 0..k {
            let n = x[j].hypot(x[k + j]);
            let s = if n > thresh { 1.0 - thresh / n } else { 0.0 };
            out[j] *= s;
            out[k + j] *= s;
        }
        out
    }
    fn descriptor(&self) -> String {
        format!("group l2 norm weighted by {}", self.weight)
    }
}

/// Prox of the conjugate of the fused hinge loss `Σ_i C·max{1 − Y_i w_i, 0}`,
/// i.e. the conjugate `Σ_i (Y_i s_i + δ_{Y_i[−C,0]}(s_i))`.
#[derive(Debug, Clone, PartialEq)]
pub struct HingeConjugate {
    labels: Vec<f64>,
    c: f64,
}

impl HingeConjugate {
    pub fn new(labels: Vec<f64>, c: f64) -> Result<Self> {
        for &y in &labels {
            check_label(y)?;
        }
        if !(c > 0.0) {
            return Err(Error::param("C must be positive"));
        }
        Ok(Self { labels, c })
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

impl ProxMap for HingeConjugate {
    fn evaluate(&self, x: &[f64], step: f64) -> Vec<f64> {
        separable_hinge(x, step, &self.labels, self.c)
    }
    fn descriptor(&self) -> String {
        format!("conjugate hinge loss (C = {})", self.c)
    }
}

/// The primal hinge loss `g(w) = Σ_i C·max{1 − Y_i w_i, 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HingeLoss {
    labels: Vec<f64>,
    c: f64,
}

impl HingeLoss {
    pub fn new(labels: Vec<f64>, c: f64) -> Result<Self> {
        let conj = HingeConjugate::new(labels, c)?;
        Ok(Self {
            labels: conj.labels,
            c,
        })
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        w.iter()
            .zip(&self.labels)
            .map(|(wi, y)| self.c * (1.0 - y * wi).max(0.0))
            .sum()
    }
}

impl ProxMap for HingeLoss {
    fn evaluate(&self, x: &[f64], step: f64) -> Vec<f64> {
        x.iter()
            .zip(&self.labels)
            .map(|(&u, &y)| {
                // In the margin coordinate m = y·u the loss is C·max{1 − m, 0}.
                let m = y * u;
                let tc = step * self.c;
                let pm = if m < 1.0 - tc {
                    m + tc
                } else if m > 1.0 {
                    m
                } else {
                    1.0
                };
                y * pm
            })
            .collect()
    }
    fn descriptor(&self) -> String {
        format!("hinge loss (C = {})", self.c)
    }
}

/// `∇l*(v) = ν v` as a forward operator with Lipschitz constant `ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticConjGradient {
    pub nu: f64,
}

impl LipschitzOp for QuadraticConjGradient {
    fn evaluate_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, v) in out.iter_mut().zip(x) {
            *o = self.nu * v;
        }
    }
    fn lipschitz_const(&self) -> f64 {
        self.nu
    }
    fn is_zero(&self) -> bool {
        self.nu == 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_projection_examples() {
        let unit = BoxSpec::new(0.0, 1.0, 2).unwrap();
        assert_eq!(project_box(&[0.3, 0.7], &unit), vec![0.3, 0.7]);
        assert_eq!(project_box(&[-3.0, 2.0], &unit), vec![0.0, 1.0]);
        let small = BoxSpec::symmetric(0.01, 1).unwrap();
        assert_eq!(project_box(&[-0.5], &small), vec![-0.01]);
        assert!(BoxSpec::new(1.0, 0.0, 1).is_err());
    }

    #[test]
    fn quad_box_examples() {
        let b = [0.2, 0.9, 0.5];
        let fixed = prox_quad_box(&b, 0.7, &b).unwrap();
        assert!(fixed.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-15));
        assert_eq!(prox_quad_box(&[1.5], 1.0, &[0.5]).unwrap(), vec![1.0]);
        assert_eq!(prox_quad_box(&[-3.0], 1.0, &[0.0]).unwrap(), vec![0.0]);
        assert!(matches!(
            prox_quad_box(&[1.0, 2.0], 1.0, &[0.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn pixelwise_ball_examples() {
        let (p, q) = project_pixelwise_ball(&[3.0], &[4.0], 1.0);
        assert!((p[0] - 0.6).abs() < 1e-15 && (q[0] - 0.8).abs() < 1e-15);
        assert_eq!(
            project_pixelwise_ball(&[0.3], &[0.4], 1.0),
            (vec![0.3], vec![0.4])
        );
        assert_eq!(
            project_pixelwise_ball(&[0.0], &[0.0], 1.0),
            (vec![0.0], vec![0.0])
        );
    }

    #[test]
    fn hinge_conj_examples() {
        let r = prox_hinge_conj(&[0.2, 5.0], 0, 0.5, 1.0, 1.0).unwrap();
        assert!((r[0] + 0.3).abs() < 1e-15);
        assert_eq!(r[1], 0.0);
        let r = prox_hinge_conj(&[0.2], 0, 0.5, -1.0, 1.0).unwrap();
        assert!((r[0] - 0.7).abs() < 1e-15);
        let r = prox_hinge_conj(&[-5.0], 0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(r[0], -1.0);
        assert!(prox_hinge_conj(&[0.0], 0, 0.5, 0.5, 1.0).is_err());
    }

    #[test]
    fn separable_hinge_examples() {
        let r = prox_separable_hinge_conj(&[0.2, 0.2], 0.5, &[1.0, -1.0], 1.0).unwrap();
        assert!((r[0] + 0.3).abs() < 1e-15 && (r[1] - 0.7).abs() < 1e-15);
        assert_eq!(
            prox_separable_hinge_conj(&[0.0; 3], 0.0, &[1.0, -1.0, 1.0], 1.0).unwrap(),
            vec![0.0; 3]
        );
        // shift-then-identity when the shifted point is inside the interval
        let r = prox_separable_hinge_conj(&[0.1, -0.1], 0.3, &[1.0, -1.0], 1.0).unwrap();
        assert!((r[0] + 0.2).abs() < 1e-15 && (r[1] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn quadratic_conj_gradient_examples() {
        assert_eq!(grad_quadratic_conj(&[1.0, 2.0], 1.0), vec![1.0, 2.0]);
        assert_eq!(grad_quadratic_conj(&[2.0, -4.0], 0.5), vec![1.0, -2.0]);
        assert_eq!(grad_quadratic_conj(&[0.0], 3.0), vec![0.0]);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn fused_block_matches_per_coordinate_formula() {
        let v = [0.4, -1.3, 0.05, 2.2];
        let labels = [1.0, -1.0, -1.0, 1.0];
        let fused = prox_separable_hinge_conj(&v, 0.7, &labels, 1.5).unwrap();
        let mut sum = vec![0.0; 4];
        for i in 0..4 {
            let part = prox_hinge_conj(&v, i, 0.7, labels[i], 1.5).unwrap();
            for j in 0..4 {
                sum[j] += part[j];
            }
        }
        assert_eq!(fused, sum);
    }
}

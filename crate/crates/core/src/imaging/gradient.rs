use super::{GradField, Image};
use crate::operators::LinearMap;

/// Forward differences with a zero last row (vertical) and zero last column
/// (horizontal). Maps `ℝ^k` to `ℝ^k × ℝ^k`, stored as the `u` plane followed by `v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Gradient {
    pub rows: usize,
    pub cols: usize,
}

impl Gradient {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols }
    }

    pub fn for_image(img: &Image) -> Self {
        Self::new(img.rows(), img.cols())
    }
}

impl LinearMap for Gradient {
    fn domain_dim(&self) -> usize {
        self.rows * self.cols
    }

    fn codomain_dim(&self) -> usize {
        2 * self.rows * self.cols
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let (m, n) = (self.rows, self.cols);
        let (u, v) = out.split_at_mut(m * n);
        for i in 0..m {
            for j in 0..n {
                let p = i * n + j;
                u[p] = if i + 1 < m { x[p + n] - x[p] } else { 0.0 };
                v[p] = if j + 1 < n { x[p + 1] - x[p] } else { 0.0 };
            }
        }
    }

    /// Negative divergence matching the boundary rule of `apply_into`.
    fn adjoint_into(&self, g: &[f64], out: &mut [f64]) {
        let (m, n) = (self.rows, self.cols);
        let (u, v) = g.split_at(m * n);
        for i in 0..m {
            for j in 0..n {
                let p = i * n + j;
                let mut acc = 0.0;
                if i + 1 < m {
                    acc -= u[p];
                }
                if i > 0 {
                    acc += u[p - n];
                }
                if j + 1 < n {
                    acc -= v[p];
                }
                if j > 0 {
                    acc += v[p - 1];
                }
                out[p] = acc;
            }
        }
    }

    fn norm_bound(&self) -> Option<f64> {
        Some(8f64.sqrt())
    }
}

pub fn grad_apply(x: &Image) -> GradField {
    let op = Gradient::for_image(x);
    let flat = op.apply(x.as_slice());
    let k = x.len();
    GradField {
        rows: x.rows(),
        cols: x.cols(),
        u: flat[..k].to_vec(),
        v: flat[k..].to_vec(),
    }
}

pub fn grad_adjoint(g: &GradField) -> Image {
    let op = Gradient::new(g.rows, g.cols);
    let mut flat = g.u.clone();
    flat.extend_from_slice(&g.v);
    Image::from_vec(g.rows, g.cols, op.adjoint_apply(&flat)).expect("shape is consistent")
}

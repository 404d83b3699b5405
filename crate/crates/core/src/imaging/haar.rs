use std::f64::consts::FRAC_1_SQRT_2;

use super::Image;
use crate::error::{Error, Result};
use crate::operators::LinearMap;

/// Orthonormal multilevel 2-D Haar transform. Coefficients use quadrant
/// packing: each level splits the current low-pass block into
/// `[LL LH; HL HH]` with `LL` top-left and recurses on `LL`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Haar {
    rows: usize,
    cols: usize,
    levels: usize,
}

impl Haar {
    pub fn new(rows: usize, cols: usize, levels: usize) -> Result<Self> {
        let block = 1usize.checked_shl(levels as u32).unwrap_or(0);
        if rows == 0
            || cols == 0
            || block == 0
            || !rows.is_multiple_of(block)
            || !cols.is_multiple_of(block)
        {
            return Err(Error::param(format!(
                "a {levels}-level Haar transform needs dimensions divisible by 2^{levels}, got {rows}x{cols}"
            )));
        }
        Ok(Self { rows, cols, levels })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    fn forward_in_place(&self, data: &mut [f64]) {
        let n = self.cols;
        let mut tmp = vec![0.0; self.rows.max(self.cols)];
        for level in 0..self.levels {
            let (h, w) = (self.rows >> level, self.cols >> level);
            for i in 0..h {
                let row = &mut data[i * n..i * n + w];
                analyze(row, &mut tmp[..w]);
                row.copy_from_slice(&tmp[..w]);
            }
            let mut col = vec![0.0; h];
            for j in 0..w {
                for i in 0..h {
                    col[i] = data[i * n + j];
                }
                analyze(&col, &mut tmp[..h]);
                for i in 0..h {
                    data[i * n + j] = tmp[i];
                }
            }
        }
    }

    fn inverse_in_place(&self, data: &mut [f64]) {
        let n = self.cols;
        let mut tmp = vec![0.0; self.rows.max(self.cols)];
        for level in (0..self.levels).rev() {
            let (h, w) = (self.rows >> level, self.cols >> level);
            let mut col = vec![0.0; h];
            for j in 0..w {
                for i in 0..h {
                    col[i] = data[i * n + j];
                }
                synthesize(&col, &mut tmp[..h]);
                for i in 0..h {
                    data[i * n + j] = tmp[i];
                }
            }
            for i in 0..h {
                let row = &mut data[i * n..i * n + w];
                synthesize(row, &mut tmp[..w]);
                row.copy_from_slice(&tmp[..w]);
            }
        }
    }
}

fn analyze(src: &[f64], dst: &mut [f64]) {
    let half = src.len() / 2;
    for k in 0..half {
        let (a, b) = (src[2 * k], src[2 * k + 1]);
        dst[k] = (a + b) * FRAC_1_SQRT_2;
        dst[half + k] = (a - b) * FRAC_1_SQRT_2;
    }
}

fn synthesize(src: &[f64], dst: &mut [f64]) {
    let half = src.len() / 2;
    for k in 0..half {
        let (s, d) = (src[k], src[half + k]);
        dst[2 * k] = (s + d) * FRAC_1_SQRT_2;
        dst[2 * k + 1] = (s - d) * FRAC_1_SQRT_2;
    }
}

impl LinearMap for Haar {
    fn domain_dim(&self) -> usize {
        self.rows * self.cols
    }

    fn codomain_dim(&self) -> usize {
        self.rows * self.cols
    }

    fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
        self.forward_in_place(out);
    }

    fn adjoint_into(&self, y: &[f64], out: &mut [f64]) {
        out.copy_from_slice(y);
        self.inverse_in_place(out);
    }

    fn norm_bound(&self) -> Option<f64> {
        Some(1.0)
    }
}

pub fn haar_forward(x: &Image, levels: usize) -> Result<Image> {
    let w = Haar::new(x.rows(), x.cols(), levels)?;
    Image::from_vec(x.rows(), x.cols(), w.apply(x.as_slice()))
}

pub fn haar_inverse(coeffs: &Image, levels: usize) -> Result<Image> {
    let w = Haar::new(coeffs.rows(), coeffs.cols(), levels)?;
    Image::from_vec(
        coeffs.rows(),
        coeffs.cols(),
        w.adjoint_apply(coeffs.as_slice()),
    )
}

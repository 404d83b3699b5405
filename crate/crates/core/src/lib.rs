//! Primal-dual splitting for structured monotone inclusions.
//!
//! The crate provides the fixed-step forward-backward primal-dual iteration,
//! an accelerated variant with `O(1/n)` primal convergence when `A + C` is
//! strongly monotone, and a fixed-step variant with a geometric rate when the
//! dual side is strongly monotone too. Each comes with its step-size rules and
//! a runtime check of its convergence inequality.
//!
//! Two applications are assembled from the same pieces: total-variation image
//! denoising with a Haar-wavelet penalty ([`imaging`]) and kernel SVM training
//! ([`svm`]). [`harness`] drives both from configuration files.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod error;
pub mod harness;
pub mod imaging;
pub mod operators;
pub mod proxlib;
pub mod random;
pub mod solvers;
pub mod svm;
pub mod toy;
pub mod vecops;

pub use error::{Error, Result};

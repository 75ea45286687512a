//! Dense row-major `f32` matrices.
//!
//! [`Tensor2D`] is the universal carrier for weights, activations, and
//! latent features. Values are validated at construction (finite, length
//! matches the shape) and immutable afterwards, so tensors can be shared
//! freely across threads.

use crate::error::{Error, Result};
use crate::rng::DeterministicRng;

/// Dense row-major matrix of finite 32-bit floats.
///
/// For weight matrices rows are output channels; for activations rows are
/// tokens and columns the feature dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor2D {
    rows: usize,
    cols: usize,
    data: Vec<f32>,
}

impl Tensor2D {
    /// Builds a tensor, rejecting shape/length mismatches and non-finite
    /// elements.
    pub fn new(rows: usize, cols: usize, data: Vec<f32>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::validation(format!("empty tensor shape {rows}x{cols}")));
        }
        let expected = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::validation(format!("shape {rows}x{cols} overflows")))?;
        if data.len() != expected {
            return Err(Error::validation(format!(
                "data length {} does not match shape {rows}x{cols}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!(
                "non-finite element {} at flat index {pos}",
                data[pos]
            )));
        }
        Ok(Tensor2D { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        // A zero fill trivially satisfies the construction invariants.
        Tensor2D { rows, cols, data: vec![0.0; rows * cols] }
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

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f32 {
        self.data[i * self.cols + j]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Column `j` as an owned vector (the storage is row-major).
    pub fn col(&self, j: usize) -> Vec<f32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Elementwise map into a new tensor. The closure must produce finite
    /// values; the result is re-validated.
    pub fn map(&self, f: impl Fn(f32) -> f32) -> Result<Tensor2D> {
        Tensor2D::new(self.rows, self.cols, self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn max_abs(&self) -> f32 {
        self.data.iter().fold(0.0f32, |m, &v| m.max(v.abs()))
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>().sqrt()
    }

    /// `self · otherᵀ` with f32 accumulation; shapes `(n, c) · (m, c) -> (n, m)`.
    pub fn matmul_nt(&self, other: &Tensor2D) -> Result<Tensor2D> {
        if self.cols != other.cols {
            return Err(Error::validation(format!(
                "matmul_nt inner dims differ: {} vs {}",
                self.cols, other.cols
            )));
        }
        let mut out = vec![0.0f32; self.rows * other.rows];
        for i in 0..self.rows {
            let a = self.row(i);
            for j in 0..other.rows {
                let b = other.row(j);
                let mut acc = 0.0f32;
                for k in 0..self.cols {
                    acc += a[k] * b[k];
                }
                out[i * other.rows + j] = acc;
            }
        }
        Tensor2D::new(self.rows, other.rows, out)
    }
}

/// Seeded Gaussian tensor with an optional sprinkling of amplified outliers.
///
/// Entries are i.i.d. `Normal(mean, std)` drawn row-major from the
/// deterministic stream documented in [`crate::rng`]; afterwards a uniformly
/// chosen subset of exactly `floor(outlier_frac * rows * cols)` positions
/// (partial Fisher–Yates over the flat index space, same stream) is
/// multiplied by `outlier_scale`. The function is pure: identical arguments
/// produce identical tensors.
pub fn gaussian_tensor(
    seed: u64,
    rows: usize,
    cols: usize,
    mean: f32,
    std: f32,
    outlier_frac: f64,
    outlier_scale: f32,
) -> Result<Tensor2D> {
    if std <= 0.0 || !std.is_finite() {
        return Err(Error::validation(format!("std must be positive and finite, got {std}")));
    }
    if !mean.is_finite() || !outlier_scale.is_finite() {
        return Err(Error::validation("mean and outlier_scale must be finite".to_string()));
    }
    if !(0.0..=1.0).contains(&outlier_frac) {
        return Err(Error::validation(format!("outlier_frac {outlier_frac} outside [0, 1]")));
    }
    if rows == 0 || cols == 0 {
        return Err(Error::validation(format!("empty tensor shape {rows}x{cols}")));
    }

    let n = rows * cols;
    let mut rng = DeterministicRng::new(seed);
    let mut data = Vec::with_capacity(n);
    while data.len() < n {
        let (a, b) = rng.normal_pair();
        data.push(mean + std * a as f32);
        if data.len() < n {
            data.push(mean + std * b as f32);
        }
    }

    let n_outliers = (outlier_frac * n as f64).floor() as usize;
    if n_outliers > 0 {
        // Partial Fisher–Yates: the first n_outliers slots end up holding a
        // uniform random subset of the flat indices.
        let mut idx: Vec<u32> = (0..n as u32).collect();
        for i in 0..n_outliers {
            let j = i + rng.index((n - i) as u64) as usize;
            idx.swap(i, j);
        }
        for &flat in &idx[..n_outliers] {
            data[flat as usize] *= outlier_scale;
        }
    }

    Tensor2D::new(rows, cols, data)
}

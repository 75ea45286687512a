//! Shared fixtures for the criterion benches.

use dvdq_core::{gaussian_tensor, Tensor2D};

/// Outlier-injected Gaussian weights shaped like a toy linear layer.
pub fn weight_fixture(seed: u64, rows: usize, cols: usize) -> Tensor2D {
    gaussian_tensor(seed, rows, cols, 0.0, 0.02, 0.003, 30.0).expect("valid fixture")
}

/// Activation batch with a sprinkling of massive outliers.
pub fn activation_fixture(seed: u64, tokens: usize, dim: usize) -> Tensor2D {
    gaussian_tensor(seed, tokens, dim, 0.0, 1.0, 0.002, 50.0).expect("valid fixture")
}

//! Rotated, auto-scaled activation quantization.
//!
//! The activation path is calibration-free: every quantity is derived from
//! the live input. For an activation batch `X` and weights quantized on the
//! rotated matrix `WH`:
//!
//! 1. rotate: `X̃ = XH` ([`crate::hadamard::fht_rows`]);
//! 2. scale: `s_j = max_i |x̃_ij|` per column, zero columns falling back to 1;
//! 3. quantize `X̃ Λ⁻¹` per-tensor over the fixed range `[-1, 1]` (the
//!    per-column work is already absorbed by `Λ = diag(s)`);
//! 4. multiply: `Y = (X̂ Λ) Ŵᵀ`, which approximates the unrotated `X Wᵀ`.
//!
//! Two matmul paths are provided: [`arq_matmul`] dequantizes both sides and
//! multiplies in f32 (the correctness reference), while [`arq_matmul_int`]
//! forms the integer code products and applies the scales afterwards.

use crate::error::{Error, Result};
use crate::hadamard::{fht_rows, HadamardContext};
use crate::quant::{dequantize, quantize, ChannelAxis, QuantParams, QuantizedTensor};
use crate::tensor::Tensor2D;

/// Positive per-column scales `Λ = diag(s_1, ..., s_c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleVector {
    s: Vec<f32>,
}

impl ScaleVector {
    pub fn new(s: Vec<f32>) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::validation("empty scale vector".to_string()));
        }
        if let Some(bad) = s.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::validation(format!("non-positive scale {bad}")));
        }
        Ok(ScaleVector { s })
    }

    pub fn values(&self) -> &[f32] {
        &self.s
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }
}

/// Per-column infinity norms of the (already rotated) activation; columns
/// that are identically zero get scale 1 so the later division is a no-op.
pub fn online_scales(x_rot: &Tensor2D) -> ScaleVector {
    let mut s = vec![0.0f32; x_rot.cols()];
    for i in 0..x_rot.rows() {
        for (j, &v) in x_rot.row(i).iter().enumerate() {
            s[j] = s[j].max(v.abs());
        }
    }
    for v in s.iter_mut() {
        if *v == 0.0 {
            *v = 1.0;
        }
    }
    ScaleVector { s }
}

/// Rotate, scale, and quantize an activation batch.
///
/// Returns the per-tensor codes over `[-1, 1]` plus the scales needed to
/// reconstruct `X̃ ≈ dequantize(codes) · Λ`. Reads no state besides its
/// arguments.
pub fn arq_quantize_activation(
    x: &Tensor2D,
    ctx: &HadamardContext,
    bits_a: u8,
) -> Result<(QuantizedTensor, ScaleVector)> {
    if !(2..=8).contains(&bits_a) {
        return Err(Error::validation(format!("bits_a {bits_a} outside [2, 8]")));
    }
    let rotated = fht_rows(x, ctx)?;
    let scales = online_scales(&rotated);
    let mut data = Vec::with_capacity(rotated.len());
    for i in 0..rotated.rows() {
        for (j, &v) in rotated.row(i).iter().enumerate() {
            data.push(v / scales.s[j]);
        }
    }
    let scaled = Tensor2D::new(rotated.rows(), rotated.cols(), data)?;
    let params = QuantParams::new(
        bits_a,
        vec![-1.0; scaled.rows()],
        vec![1.0; scaled.rows()],
    )?;
    let q = quantize(&scaled, &params, ChannelAxis::Row)?;
    Ok((q, scales))
}

/// Reconstructs `X̂ Λ ≈ X̃` from the activation codes and scales.
pub fn dequantize_activation(q: &QuantizedTensor, scales: &ScaleVector) -> Result<Tensor2D> {
    if scales.len() != q.cols() {
        return Err(Error::validation(format!(
            "{} scales for {} columns",
            scales.len(),
            q.cols()
        )));
    }
    let flat = dequantize(q);
    let mut data = Vec::with_capacity(flat.len());
    for i in 0..flat.rows() {
        for (j, &v) in flat.row(i).iter().enumerate() {
            data.push(v * scales.s[j]);
        }
    }
    Tensor2D::new(flat.rows(), flat.cols(), data)
}

fn check_matmul_shapes(
    x: &Tensor2D,
    w_rot_q: &QuantizedTensor,
    ctx: &HadamardContext,
) -> Result<()> {
    if x.cols() != ctx.dim() {
        return Err(Error::validation(format!(
            "activation cols {} != rotation dim {}",
            x.cols(),
            ctx.dim()
        )));
    }
    if w_rot_q.cols() != ctx.dim() {
        return Err(Error::validation(format!(
            "weight cols {} != rotation dim {}",
            w_rot_q.cols(),
            ctx.dim()
        )));
    }
    if w_rot_q.channel_axis() != ChannelAxis::Row {
        return Err(Error::validation(
            "rotated weights must be quantized per output channel (rows)".to_string(),
        ));
    }
    Ok(())
}

/// Fake-quant reference path: dequantize the activation codes, reapply `Λ`,
/// and multiply by the dequantized weights in f32.
pub fn arq_matmul(
    x: &Tensor2D,
    w_rot_q: &QuantizedTensor,
    ctx: &HadamardContext,
    bits_a: u8,
) -> Result<Tensor2D> {
    check_matmul_shapes(x, w_rot_q, ctx)?;
    let (q, scales) = arq_quantize_activation(x, ctx, bits_a)?;
    let x_rec = dequantize_activation(&q, &scales)?;
    let w_rec = dequantize(w_rot_q);
    x_rec.matmul_nt(&w_rec)
}

/// Integer-accumulate path.
///
/// Expands `Σ_j s_j (Δx·cx + αx)(Δw_k·cw + αw_k)` so the per-element work is
/// the exact `i32` product of the two codes; the diagonal scales sit on the
/// contraction axis, so they are applied to each integer product during
/// accumulation (they cannot be deferred past the sum), with the affine
/// cross terms added from per-row/per-channel scale-weighted code sums.
/// Agrees with [`arq_matmul`] to well within 1e-4 relative (Frobenius).
pub fn arq_matmul_int(
    x: &Tensor2D,
    w_rot_q: &QuantizedTensor,
    ctx: &HadamardContext,
    bits_a: u8,
) -> Result<Tensor2D> {
    check_matmul_shapes(x, w_rot_q, ctx)?;
    let (q, scales) = arq_quantize_activation(x, ctx, bits_a)?;
    let dim = ctx.dim();
    let n = q.rows();
    let m = w_rot_q.rows();
    let s: Vec<f64> = scales.values().iter().map(|&v| v as f64).collect();
    let sum_s: f64 = s.iter().sum();

    let alpha_x = -1.0f64;
    let step_x = 2.0 / q.params().levels() as f64;
    let wp = w_rot_q.params();
    let lw = wp.levels() as f64;

    // Scale-weighted code sums for the affine cross terms.
    let cx = q.codes();
    let cw = w_rot_q.codes();
    let mut x_code_sum = vec![0.0f64; n];
    for i in 0..n {
        let row = &cx[i * dim..(i + 1) * dim];
        x_code_sum[i] = row.iter().zip(&s).map(|(&c, sj)| c as f64 * sj).sum();
    }
    let mut w_code_sum = vec![0.0f64; m];
    for k in 0..m {
        let row = &cw[k * dim..(k + 1) * dim];
        w_code_sum[k] = row.iter().zip(&s).map(|(&c, sj)| c as f64 * sj).sum();
    }

    let mut out = vec![0.0f32; n * m];
    for i in 0..n {
        let xrow = &cx[i * dim..(i + 1) * dim];
        for k in 0..m {
            let wrow = &cw[k * dim..(k + 1) * dim];
            let alpha_w = wp.alpha(k) as f64;
            let step_w = (wp.beta(k) as f64 - alpha_w) / lw;
            let mut prod = 0.0f64;
            for j in 0..dim {
                let p = xrow[j] as i32 * wrow[j] as i32;
                prod += p as f64 * s[j];
            }
            let y = step_x * step_w * prod
                + step_x * alpha_w * x_code_sum[i]
                + alpha_x * step_w * w_code_sum[k]
                + alpha_x * alpha_w * sum_s;
            out[i * m + k] = y as f32;
        }
    }
    Tensor2D::new(n, m, out)
}

/// Ratio of the widest column range to the median column range.
///
/// A single massive outlier inflates this before rotation; spreading its
/// energy across the block drives the ratio down. Used by the range
/// diagnostics and the redistribution tests.
pub fn range_spread_ratio(t: &Tensor2D) -> f32 {
    let mut ranges: Vec<f32> = (0..t.cols())
        .map(|j| {
            let mut lo = f32::INFINITY;
            let mut hi = f32::NEG_INFINITY;
            for i in 0..t.rows() {
                let v = t.get(i, j);
                lo = lo.min(v);
                hi = hi.max(v);
            }
            hi - lo
        })
        .collect();
    ranges.sort_by(|a, b| a.partial_cmp(b).expect("ranges are finite"));
    let max = *ranges.last().expect("at least one column");
    let median = if ranges.len() % 2 == 1 {
        ranges[ranges.len() / 2]
    } else {
        0.5 * (ranges[ranges.len() / 2 - 1] + ranges[ranges.len() / 2])
    };
    if median <= 0.0 {
        if max > 0.0 {
            f32::INFINITY
        } else {
            1.0
        }
    } else {
        max / median
    }
}

//! Uniform affine quantization primitives and error statistics.
//!
//! Quantization is asymmetric (per-channel bounds `[alpha, beta]`) with
//! `levels = 2^bits - 1` codes above zero:
//!
//! * forward: `code = clamp(round((x - alpha) * levels / (beta - alpha)), 0, levels)`
//! * inverse: `x̂ = code * (beta - alpha) / levels + alpha`
//!
//! Elementwise arithmetic runs in f64 and rounding is round-half-away-from-
//! zero (`f64::round`), so results are identical across platforms and match
//! exact hand evaluation on representable inputs. Channels with
//! `alpha == beta` are degenerate: they emit code 0 and dequantize to the
//! constant `alpha`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Tensor2D;

/// Which axis carries independent quantization channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelAxis {
    /// One channel per row (per output channel for weight matrices).
    Row,
    /// One channel per column.
    Col,
}

impl ChannelAxis {
    pub fn channel_count(self, rows: usize, cols: usize) -> usize {
        match self {
            ChannelAxis::Row => rows,
            ChannelAxis::Col => cols,
        }
    }
}

/// Per-channel bounds plus bit-width; the whole dequantization contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantParams {
    bits: u8,
    lo: Vec<f32>,
    hi: Vec<f32>,
}

impl QuantParams {
    pub fn new(bits: u8, lo: Vec<f32>, hi: Vec<f32>) -> Result<Self> {
        if !(2..=8).contains(&bits) {
            return Err(Error::validation(format!("bits {bits} outside [2, 8]")));
        }
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::validation(format!(
                "bound vectors empty or mismatched: {} vs {}",
                lo.len(),
                hi.len()
            )));
        }
        for (c, (&a, &b)) in lo.iter().zip(&hi).enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::validation(format!("non-finite bounds in channel {c}")));
            }
            if a > b {
                return Err(Error::validation(format!(
                    "channel {c}: alpha {a} exceeds beta {b}"
                )));
            }
        }
        Ok(QuantParams { bits, lo, hi })
    }

    pub fn bits(&self) -> u8 {
        self.bits
    }

    /// Largest code value, `2^bits - 1`.
    pub fn levels(&self) -> u32 {
        (1u32 << self.bits) - 1
    }

    pub fn num_channels(&self) -> usize {
        self.lo.len()
    }

    pub fn alpha(&self, channel: usize) -> f32 {
        self.lo[channel]
    }

    pub fn beta(&self, channel: usize) -> f32 {
        self.hi[channel]
    }

    pub fn is_degenerate(&self, channel: usize) -> bool {
        self.lo[channel] == self.hi[channel]
    }

    /// Derived step size `(beta - alpha) / levels`; 0 for degenerate channels.
    pub fn step(&self, channel: usize) -> f32 {
        ((self.hi[channel] as f64 - self.lo[channel] as f64) / self.levels() as f64) as f32
    }

    /// Derived code of the real value 0, clamped into range.
    pub fn zero_code(&self, channel: usize) -> u8 {
        if self.is_degenerate(channel) {
            return 0;
        }
        let step = (self.hi[channel] as f64 - self.lo[channel] as f64) / self.levels() as f64;
        (-(self.lo[channel] as f64) / step).round().clamp(0.0, self.levels() as f64) as u8
    }
}

/// Integer codes plus the params needed to reconstruct them.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedTensor {
    codes: Vec<u8>,
    params: QuantParams,
    rows: usize,
    cols: usize,
    channel_axis: ChannelAxis,
}

impl QuantizedTensor {
    pub fn from_parts(
        codes: Vec<u8>,
        params: QuantParams,
        rows: usize,
        cols: usize,
        channel_axis: ChannelAxis,
    ) -> Result<Self> {
        if codes.len() != rows * cols {
            return Err(Error::validation(format!(
                "code count {} does not match shape {rows}x{cols}",
                codes.len()
            )));
        }
        if params.num_channels() != channel_axis.channel_count(rows, cols) {
            return Err(Error::validation(format!(
                "params cover {} channels, tensor has {}",
                params.num_channels(),
                channel_axis.channel_count(rows, cols)
            )));
        }
        let max = params.levels();
        if codes.iter().any(|&c| c as u32 > max) {
            return Err(Error::validation(format!("code exceeds {max}")));
        }
        Ok(QuantizedTensor { codes, params, rows, cols, channel_axis })
    }

    pub fn codes(&self) -> &[u8] {
        &self.codes
    }

    pub fn params(&self) -> &QuantParams {
        &self.params
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn channel_axis(&self) -> ChannelAxis {
        self.channel_axis
    }

    pub fn bits(&self) -> u8 {
        self.params.bits()
    }

    fn channel_of(&self, i: usize, j: usize) -> usize {
        match self.channel_axis {
            ChannelAxis::Row => i,
            ChannelAxis::Col => j,
        }
    }
}

/// Observed per-channel extremes: `alpha = min`, `beta = max`.
pub fn minmax_params(t: &Tensor2D, bits: u8, channel_axis: ChannelAxis) -> Result<QuantParams> {
    let n_channels = channel_axis.channel_count(t.rows(), t.cols());
    let mut lo = vec![f32::INFINITY; n_channels];
    let mut hi = vec![f32::NEG_INFINITY; n_channels];
    for i in 0..t.rows() {
        let row = t.row(i);
        for (j, &v) in row.iter().enumerate() {
            let c = match channel_axis {
                ChannelAxis::Row => i,
                ChannelAxis::Col => j,
            };
            lo[c] = lo[c].min(v);
            hi[c] = hi[c].max(v);
        }
    }
    QuantParams::new(bits, lo, hi)
}

/// Quantizes one value against channel bounds; f64 arithmetic, clamped.
#[inline]
fn encode(x: f32, alpha: f32, beta: f32, levels: u32) -> u8 {
    if alpha == beta {
        return 0;
    }
    let t = (x as f64 - alpha as f64) * levels as f64 / (beta as f64 - alpha as f64);
    t.round().clamp(0.0, levels as f64) as u8
}

#[inline]
fn decode(code: u8, alpha: f32, beta: f32, levels: u32) -> f32 {
    if alpha == beta {
        return alpha;
    }
    (code as f64 * (beta as f64 - alpha as f64) / levels as f64 + alpha as f64) as f32
}

/// Maps every element to its nearest code under `params`; out-of-range
/// values clamp to the boundary codes.
pub fn quantize(
    t: &Tensor2D,
    params: &QuantParams,
    channel_axis: ChannelAxis,
) -> Result<QuantizedTensor> {
    let n_channels = channel_axis.channel_count(t.rows(), t.cols());
    if params.num_channels() != n_channels {
        return Err(Error::validation(format!(
            "params cover {} channels, tensor has {n_channels}",
            params.num_channels()
        )));
    }
    let levels = params.levels();
    let mut codes = Vec::with_capacity(t.len());
    for i in 0..t.rows() {
        for (j, &v) in t.row(i).iter().enumerate() {
            let c = match channel_axis {
                ChannelAxis::Row => i,
                ChannelAxis::Col => j,
            };
            codes.push(encode(v, params.alpha(c), params.beta(c), levels));
        }
    }
    QuantizedTensor::from_parts(codes, params.clone(), t.rows(), t.cols(), channel_axis)
}

/// Reconstructs `code * step + alpha` per element.
pub fn dequantize(q: &QuantizedTensor) -> Tensor2D {
    let levels = q.params.levels();
    let mut data = Vec::with_capacity(q.codes.len());
    for i in 0..q.rows {
        for j in 0..q.cols {
            let c = q.channel_of(i, j);
            data.push(decode(
                q.codes[i * q.cols + j],
                q.params.alpha(c),
                q.params.beta(c),
                levels,
            ));
        }
    }
    // Codes and finite bounds always reconstruct to finite values.
    Tensor2D::new(q.rows, q.cols, data).expect("dequantized tensor is valid")
}

/// Min-max quantize-then-dequantize in one call.
pub fn fake_quantize(t: &Tensor2D, bits: u8, channel_axis: ChannelAxis) -> Result<Tensor2D> {
    let params = minmax_params(t, bits, channel_axis)?;
    Ok(dequantize(&quantize(t, &params, channel_axis)?))
}

/// Per-column smoothing scales `s_j = max|X_j|^a / max|W_j|^(1-a)`.
///
/// `x` and `w` share their column (input-channel) dimension. Downstream the
/// baseline divides activations by `s` and multiplies weights by `s`.
/// Columns where either maximum is zero fall back to `s_j = 1`.
pub fn smoothquant_scales(x: &Tensor2D, w: &Tensor2D, alpha_mix: f64) -> Result<Vec<f32>> {
    if x.cols() != w.cols() {
        return Err(Error::validation(format!(
            "activation cols {} != weight cols {}",
            x.cols(),
            w.cols()
        )));
    }
    if !(0.0..=1.0).contains(&alpha_mix) {
        return Err(Error::validation(format!("alpha_mix {alpha_mix} outside [0, 1]")));
    }
    let col_max = |t: &Tensor2D, j: usize| -> f64 {
        (0..t.rows()).fold(0.0f32, |m, i| m.max(t.get(i, j).abs())) as f64
    };
    let mut scales = Vec::with_capacity(x.cols());
    for j in 0..x.cols() {
        let xm = col_max(x, j);
        let wm = col_max(w, j);
        let s = if xm == 0.0 || wm == 0.0 {
            1.0
        } else {
            let s = xm.powf(alpha_mix) * wm.powf(alpha_mix - 1.0);
            if s.is_finite() && s > 0.0 {
                s
            } else {
                1.0
            }
        };
        scales.push(s as f32);
    }
    Ok(scales)
}

/// Error statistics between an original tensor and its reconstruction.
///
/// All moments accumulate in f64; `err_std` is the population standard
/// deviation. Serializes to JSON via serde and to a single CSV row with
/// columns `mse,max_abs,err_mean,err_std,num_channels`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorReport {
    pub mse: f64,
    pub max_abs: f64,
    pub err_mean: f64,
    pub err_std: f64,
    pub per_channel_mse: Vec<f64>,
}

impl ErrorReport {
    pub const CSV_HEADER: &'static str = "mse,max_abs,err_mean,err_std,num_channels";

    pub fn csv_row(&self) -> String {
        format!(
            "{:e},{:e},{:e},{:e},{}",
            self.mse,
            self.max_abs,
            self.err_mean,
            self.err_std,
            self.per_channel_mse.len()
        )
    }
}

/// Compares `reconstructed` against `original` (`err = reconstructed - original`).
pub fn error_report(
    original: &Tensor2D,
    reconstructed: &Tensor2D,
    channel_axis: ChannelAxis,
) -> Result<ErrorReport> {
    if original.shape() != reconstructed.shape() {
        return Err(Error::validation(format!(
            "shape mismatch {:?} vs {:?}",
            original.shape(),
            reconstructed.shape()
        )));
    }
    let n_channels = channel_axis.channel_count(original.rows(), original.cols());
    let mut per_channel_sq = vec![0.0f64; n_channels];
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut max_abs = 0.0f64;
    for i in 0..original.rows() {
        let a = original.row(i);
        let b = reconstructed.row(i);
        for j in 0..original.cols() {
            let e = b[j] as f64 - a[j] as f64;
            sum += e;
            sum_sq += e * e;
            max_abs = max_abs.max(e.abs());
            let c = match channel_axis {
                ChannelAxis::Row => i,
                ChannelAxis::Col => j,
            };
            per_channel_sq[c] += e * e;
        }
    }
    let n = original.len() as f64;
    let channel_len = original.len() / n_channels;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    Ok(ErrorReport {
        mse: sum_sq / n,
        max_abs,
        err_mean: mean,
        err_std: var.sqrt(),
        per_channel_mse: per_channel_sq.iter().map(|&s| s / channel_len as f64).collect(),
    })
}

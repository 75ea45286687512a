//! Progressive bound search for weight quantization.
//!
//! Starting from a channel's min-max bounds `(alpha_0, beta_0)`, both ends
//! are walked inward in equal steps `delta = (beta_0 - alpha_0) / (2 * (G + 1))`
//! where `G` is the grid resolution ([`PbqConfig::grid_steps`], default 100).
//! Candidate `t` uses bounds `(alpha_0 + t*delta, beta_0 - t*delta)`; values
//! outside the shrunk interval clamp to the boundary codes. The candidate
//! minimizing the summed squared reconstruction error wins, ties going to
//! the smallest `t` (widest interval).
//!
//! A search with `num_steps = K <= G` evaluates the prefix `t = 0..=K` of
//! the shared grid, so growing `K` only ever adds candidates: the best error
//! is non-increasing in `K`, and `K = 0` is exactly the min-max baseline.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quant::{
    dequantize, error_report, minmax_params, quantize, ChannelAxis, ErrorReport, QuantParams,
    QuantizedTensor,
};
use crate::tensor::Tensor2D;

/// Default grid resolution; diminishing returns past ~100 candidates on
/// Gaussian-with-outlier channels.
pub const DEFAULT_GRID_STEPS: usize = 100;

#[derive(Debug, Clone)]
pub struct PbqConfig {
    pub bits: u8,
    /// Number of shrink steps evaluated (candidates `t = 0..=num_steps`).
    pub num_steps: usize,
    /// Grid resolution shared across searches; must be >= `num_steps`.
    pub grid_steps: usize,
    pub channel_axis: ChannelAxis,
}

impl PbqConfig {
    pub fn new(bits: u8, num_steps: usize) -> Self {
        PbqConfig {
            bits,
            num_steps,
            grid_steps: num_steps.max(DEFAULT_GRID_STEPS),
            channel_axis: ChannelAxis::Row,
        }
    }

    pub fn with_axis(mut self, axis: ChannelAxis) -> Self {
        self.channel_axis = axis;
        self
    }

    pub fn with_grid_steps(mut self, grid_steps: usize) -> Self {
        self.grid_steps = grid_steps;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(2..=8).contains(&self.bits) {
            return Err(Error::validation(format!("bits {} outside [2, 8]", self.bits)));
        }
        if self.grid_steps < self.num_steps {
            return Err(Error::validation(format!(
                "grid_steps {} smaller than num_steps {}",
                self.grid_steps, self.num_steps
            )));
        }
        Ok(())
    }
}

/// Outcome of a per-channel search.
#[derive(Debug, Clone, PartialEq)]
pub struct PbqChannelResult {
    pub best_alpha: f32,
    pub best_beta: f32,
    /// Summed squared reconstruction error at the winning bounds.
    pub best_error: f64,
    /// Winning grid index in `[0, num_steps]`.
    pub best_step_index: usize,
}

/// Candidate bounds at grid index `t`, in the exact arithmetic both the
/// search and the oracle use.
#[inline]
fn candidate_bounds(alpha0: f32, beta0: f32, delta: f64, t: usize) -> (f32, f32) {
    let a = (alpha0 as f64 + t as f64 * delta) as f32;
    let b = (beta0 as f64 - t as f64 * delta) as f32;
    (a, b)
}

/// Searches the shrink grid for the bounds minimizing reconstruction error.
pub fn pbq_search_channel(channel: &[f32], cfg: &PbqConfig) -> Result<PbqChannelResult> {
    cfg.validate()?;
    if channel.is_empty() {
        return Err(Error::validation("empty channel".to_string()));
    }
    let mut alpha0 = f32::INFINITY;
    let mut beta0 = f32::NEG_INFINITY;
    for &v in channel {
        if !v.is_finite() {
            return Err(Error::validation(format!("non-finite channel value {v}")));
        }
        alpha0 = alpha0.min(v);
        beta0 = beta0.max(v);
    }
    if alpha0 == beta0 {
        // Degenerate constant channel: every candidate collapses to the
        // constant with zero error.
        return Ok(PbqChannelResult {
            best_alpha: alpha0,
            best_beta: beta0,
            best_error: 0.0,
            best_step_index: 0,
        });
    }

    let levels = ((1u32 << cfg.bits) - 1) as f64;
    let delta = (beta0 as f64 - alpha0 as f64) / (2.0 * (cfg.grid_steps as f64 + 1.0));
    let mut best = PbqChannelResult {
        best_alpha: alpha0,
        best_beta: beta0,
        best_error: f64::INFINITY,
        best_step_index: 0,
    };
    for t in 0..=cfg.num_steps {
        let (a, b) = candidate_bounds(alpha0, beta0, delta, t);
        if a >= b {
            break; // cannot occur on the shared grid, guarded anyway
        }
        let (a64, b64) = (a as f64, b as f64);
        let inv = levels / (b64 - a64);
        let scale = (b64 - a64) / levels;
        let mut err = 0.0f64;
        for &v in channel {
            let code = ((v as f64 - a64) * inv).round().clamp(0.0, levels);
            let recon = (code * scale + a64) as f32;
            let e = recon as f64 - v as f64;
            err += e * e;
        }
        if err < best.best_error {
            best = PbqChannelResult {
                best_alpha: a,
                best_beta: b,
                best_error: err,
                best_step_index: t,
            };
        }
    }
    Ok(best)
}

/// Brute-force re-evaluation of every candidate with a naive scalar loop.
///
/// Shares no quantization code with [`pbq_search_channel`]; used to
/// cross-check it. Agrees on `best_step_index` exactly and on `best_error`
/// to within 1e-9 relative.
pub fn pbq_oracle_channel(channel: &[f32], cfg: &PbqConfig) -> Result<PbqChannelResult> {
    cfg.validate()?;
    if channel.is_empty() {
        return Err(Error::validation("empty channel".to_string()));
    }
    let mut lo = channel[0];
    let mut hi = channel[0];
    for &v in channel {
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    if lo == hi {
        return Ok(PbqChannelResult {
            best_alpha: lo,
            best_beta: hi,
            best_error: 0.0,
            best_step_index: 0,
        });
    }

    let levels = ((1u32 << cfg.bits) - 1) as f64;
    let delta = (hi as f64 - lo as f64) / (2.0 * (cfg.grid_steps as f64 + 1.0));
    let mut best: Option<PbqChannelResult> = None;
    for t in 0..=cfg.num_steps {
        let a = (lo as f64 + t as f64 * delta) as f32;
        let b = (hi as f64 - t as f64 * delta) as f32;
        if a >= b {
            break;
        }
        let mut err = 0.0f64;
        for &v in channel {
            // Textbook evaluation: quantize, clamp, dequantize, square.
            let mut code = ((v as f64 - a as f64) * levels / (b as f64 - a as f64)).round();
            if code < 0.0 {
                code = 0.0;
            }
            if code > levels {
                code = levels;
            }
            let recon = (code * (b as f64 - a as f64) / levels + a as f64) as f32;
            err += (recon as f64 - v as f64) * (recon as f64 - v as f64);
        }
        let better = match &best {
            None => true,
            Some(cur) => err < cur.best_error,
        };
        if better {
            best = Some(PbqChannelResult {
                best_alpha: a,
                best_beta: b,
                best_error: err,
                best_step_index: t,
            });
        }
    }
    Ok(best.expect("candidate 0 always evaluated"))
}

/// Runs an independent bound search per output channel and assembles the
/// quantized tensor plus its error report.
///
/// Channel searches are independent and fan out across the rayon pool;
/// results are ordered by channel index regardless of completion order.
pub fn pbq_quantize(w: &Tensor2D, cfg: &PbqConfig) -> Result<(QuantizedTensor, ErrorReport)> {
    cfg.validate()?;
    let n_channels = cfg.channel_axis.channel_count(w.rows(), w.cols());
    let results: Vec<Result<PbqChannelResult>> = (0..n_channels)
        .into_par_iter()
        .map(|c| match cfg.channel_axis {
            ChannelAxis::Row => pbq_search_channel(w.row(c), cfg),
            ChannelAxis::Col => pbq_search_channel(&w.col(c), cfg),
        })
        .collect();
    let mut lo = Vec::with_capacity(n_channels);
    let mut hi = Vec::with_capacity(n_channels);
    for r in results {
        let r = r?;
        lo.push(r.best_alpha);
        hi.push(r.best_beta);
    }
    let params = QuantParams::new(cfg.bits, lo, hi)?;
    let q = quantize(w, &params, cfg.channel_axis)?;
    let report = error_report(w, &dequantize(&q), cfg.channel_axis)?;
    Ok((q, report))
}

/// Min-max baseline in the same output shape as [`pbq_quantize`], for
/// side-by-side comparisons.
pub fn minmax_quantize(
    w: &Tensor2D,
    bits: u8,
    channel_axis: ChannelAxis,
) -> Result<(QuantizedTensor, ErrorReport)> {
    let params = minmax_params(w, bits, channel_axis)?;
    let q = quantize(w, &params, channel_axis)?;
    let report = error_report(w, &dequantize(&q), channel_axis)?;
    Ok((q, report))
}

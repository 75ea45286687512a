//! Drift-guided bit switching.
//!
//! A [`GbsState`] watches the stream of per-step feature tensors, accumulates
//! the normalized L1 distance between consecutive ones, and picks the low
//! bit-width while the accumulated drift stays under the threshold `delta`.
//! Crossing the threshold (ties included) selects the high bit-width and
//! resets the accumulator to zero.
//!
//! The increment observed entering a step is added *before* the comparison,
//! and the first step after construction or reset compares an empty sum: at
//! `delta = 0` every decision is the high width, at `delta = +inf` every
//! decision is the low width.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Tensor2D;

/// Normalized L1 drift `‖curr - prev‖₁ / ‖prev‖₁`.
///
/// A zero-norm `prev` yields 0 when `curr` is also zero and `+inf` otherwise
/// (unknown drift is treated as large, forcing the high bit-width).
pub fn l1_rel(f_curr: &Tensor2D, f_prev: &Tensor2D) -> Result<f64> {
    if f_curr.shape() != f_prev.shape() {
        return Err(Error::validation(format!(
            "feature shape changed: {:?} vs {:?}",
            f_curr.shape(),
            f_prev.shape()
        )));
    }
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for (&a, &b) in f_curr.data().iter().zip(f_prev.data()) {
        num += (a as f64 - b as f64).abs();
        den += (b as f64).abs();
    }
    if den == 0.0 {
        if num == 0.0 {
            Ok(0.0)
        } else {
            Ok(f64::INFINITY)
        }
    } else {
        Ok(num / den)
    }
}

/// One scheduler decision, as logged per step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub step: usize,
    pub bits: u8,
    /// Drift added entering this step (0 for the very first step).
    pub increment: f64,
    /// Accumulated drift compared against the threshold, before any reset.
    pub cumulative_before: f64,
}

/// Per-step bit-widths plus their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BitSchedule {
    pub bits: Vec<u8>,
    pub average_bits: f64,
}

impl BitSchedule {
    pub fn from_bits(bits: Vec<u8>) -> Self {
        let average_bits = if bits.is_empty() {
            0.0
        } else {
            bits.iter().map(|&b| b as f64).sum::<f64>() / bits.len() as f64
        };
        BitSchedule { bits, average_bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// The scheduler's whole state: threshold, bit pair, accumulator, feature
/// snapshot, and the append-only decision log.
///
/// Sequential by contract: one state per generation run, decisions strictly
/// ordered. Movable across threads, never shared concurrently.
#[derive(Debug, Clone)]
pub struct GbsState {
    delta: f64,
    b_low: u8,
    b_high: u8,
    last_reset: usize,
    cumulative: f64,
    prev_features: Option<Tensor2D>,
    decisions: Vec<Decision>,
}

impl GbsState {
    pub fn new(delta: f64, b_low: u8, b_high: u8) -> Result<Self> {
        if delta.is_nan() || delta < 0.0 {
            return Err(Error::validation(format!("delta must be >= 0, got {delta}")));
        }
        if b_low >= b_high {
            return Err(Error::validation(format!(
                "b_low {b_low} must be smaller than b_high {b_high}"
            )));
        }
        Ok(GbsState {
            delta,
            b_low,
            b_high,
            last_reset: 0,
            cumulative: 0.0,
            prev_features: None,
            decisions: Vec::new(),
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn cumulative(&self) -> f64 {
        self.cumulative
    }

    pub fn last_reset(&self) -> usize {
        self.last_reset
    }

    pub fn decisions(&self) -> &[Decision] {
        &self.decisions
    }

    pub fn schedule(&self) -> BitSchedule {
        BitSchedule::from_bits(self.decisions.iter().map(|d| d.bits).collect())
    }

    /// Consumes this step's feature tensor and returns the bit-width to use.
    ///
    /// Must be called once per step in order. The first call observes no
    /// increment (the sum over an empty range is zero).
    pub fn decide(&mut self, f_curr: &Tensor2D) -> Result<u8> {
        let increment = match &self.prev_features {
            None => 0.0,
            Some(prev) => l1_rel(f_curr, prev)?,
        };
        let bits = self.advance(increment);
        self.prev_features = Some(f_curr.clone());
        Ok(bits)
    }

    /// The shared threshold transition, also used by open-loop replay.
    fn advance(&mut self, increment: f64) -> u8 {
        let step = self.decisions.len();
        let compared = self.cumulative + increment;
        let bits = if compared < self.delta {
            self.cumulative = compared;
            self.b_low
        } else {
            self.cumulative = 0.0;
            self.last_reset = step;
            self.b_high
        };
        self.decisions.push(Decision { step, bits, increment, cumulative_before: compared });
        bits
    }
}

/// Replays the threshold recurrence on a precomputed increment sequence.
///
/// `increments[i]` is the drift observed entering step `i + 1`; the first
/// step compares an empty sum, so the schedule has `increments.len() + 1`
/// entries. Replaying the increments recorded by a live [`GbsState`]
/// reproduces its schedule exactly.
pub fn run_schedule(
    increments: &[f64],
    delta: f64,
    b_low: u8,
    b_high: u8,
) -> Result<BitSchedule> {
    for (i, &inc) in increments.iter().enumerate() {
        if inc.is_nan() || inc < 0.0 {
            return Err(Error::validation(format!("negative increment {inc} at index {i}")));
        }
    }
    let mut state = GbsState::new(delta, b_low, b_high)?;
    state.advance(0.0);
    for &inc in increments {
        state.advance(inc);
    }
    Ok(state.schedule())
}

/// Writes a decision log as CSV with header `step,bits,increment,cumulative`.
pub fn decisions_to_csv(decisions: &[Decision]) -> String {
    let mut out = String::from("step,bits,increment,cumulative\n");
    for d in decisions {
        out.push_str(&format!(
            "{},{},{:e},{:e}\n",
            d.step, d.bits, d.increment, d.cumulative_before
        ));
    }
    out
}

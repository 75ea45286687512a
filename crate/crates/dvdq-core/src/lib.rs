//! Data-free low-bit quantization toolkit.
//!
//! The crate provides the pieces of a post-training quantization pipeline
//! that needs no calibration data:
//!
//! * [`quant`] — uniform affine quantization, the min-max and smoothing
//!   baselines, and error statistics;
//! * [`pbq`] — per-channel progressive bound search for weights, with a
//!   brute-force oracle;
//! * [`hadamard`] / [`arq`] — fast Walsh–Hadamard rotation and online
//!   auto-scaled activation quantization;
//! * [`gbs`] — drift-guided per-step bit switching;
//! * [`pack`](mod@pack) — bit-exact packed storage (`.dvdq`) and memory
//!   accounting;
//! * [`sim`] — a synthetic denoising harness for scheduler and method
//!   bake-offs;
//! * [`tensor`] / [`npy`] / [`manifest`] — dense tensors, seeded generation,
//!   and file interchange.

pub mod arq;
pub mod error;
pub mod gbs;
pub mod hadamard;
pub mod manifest;
pub mod npy;
pub mod pack;
pub mod pbq;
pub mod quant;
pub mod rng;
pub mod sim;
pub mod tensor;

pub use arq::{
    arq_matmul, arq_matmul_int, arq_quantize_activation, dequantize_activation, online_scales,
    range_spread_ratio, ScaleVector,
};
pub use error::{Error, Result};
pub use gbs::{decisions_to_csv, l1_rel, run_schedule, BitSchedule, Decision, GbsState};
pub use hadamard::{fht_rows, rotation_invariance_check, HadamardContext};
pub use manifest::{LayerEntry, Manifest};
pub use npy::{load_npy, save_npy};
pub use pack::{memory_ratio, pack, unpack};
pub use pbq::{
    minmax_quantize, pbq_oracle_channel, pbq_quantize, pbq_search_channel, PbqChannelResult,
    PbqConfig,
};
pub use quant::{
    dequantize, error_report, fake_quantize, minmax_params, quantize, smoothquant_scales,
    ChannelAxis, ErrorReport, QuantParams, QuantizedTensor,
};
pub use sim::{
    baseline_schedules, delta_sweep, run_denoise, ActMethod, RunConfig, RunResult, SchedulerKind,
    SweepRow, ToyModel, WeightMethod,
};
pub use tensor::{gaussian_tensor, Tensor2D};

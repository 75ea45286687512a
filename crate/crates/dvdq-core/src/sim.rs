//! Synthetic denoising-loop experiments.
//!
//! A [`ToyModel`] is a small MLP with Gaussian weights (optionally spiked
//! with a fraction of amplified outliers). [`run_denoise`] iterates
//! `x_{t+1} = x_t - eta * net(x_t * scale_t)` from a seeded Gaussian latent,
//! passing weights and per-layer input activations through the configured
//! quantizers, with per-step activation bit-widths chosen by a scheduler.
//! Each run also executes its full-precision twin (same latent, no
//! quantization) to report the final mean squared deviation.
//!
//! The drift the scheduler observes is the normalized L1 distance between
//! consecutive latents: the latent entering step `t` is the previous step's
//! output, so the decision for step `t` only uses information available
//! before the step runs. The default activation scale profile decays
//! quadratically from 10x to 1x, which makes the full-precision drift trace
//! decay as the loop progresses.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arq::{arq_quantize_activation, dequantize_activation};
use crate::error::{Error, Result};
use crate::gbs::{run_schedule, BitSchedule, Decision, GbsState};
use crate::hadamard::{fht_rows, HadamardContext};
use crate::pbq::{minmax_quantize, pbq_quantize, PbqConfig};
use crate::quant::{
    dequantize, quantize, smoothquant_scales, ChannelAxis, ErrorReport, QuantParams,
};
use crate::rng::derive_seed;
use crate::tensor::{gaussian_tensor, Tensor2D};

/// Latent update rate of the toy dynamics.
pub const ETA: f32 = 0.1;

const STREAM_LAYER_BASE: u64 = 1_000;
const STREAM_X0: u64 = 2_000;

/// Weight quantizer selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMethod {
    None,
    Minmax,
    Pbq,
}

/// Activation quantizer selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActMethod {
    None,
    Minmax,
    Smoothquant,
    RotateOnly,
    Arq,
}

impl ActMethod {
    fn rotates_weights(self) -> bool {
        matches!(self, ActMethod::RotateOnly | ActMethod::Arq)
    }
}

/// Per-step bit-width policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum SchedulerKind {
    Fixed { bits: u8 },
    Gbs { delta: f64 },
    Stp,
    Itp,
    Abs,
    Sba { seed: u64 },
}

/// Small MLP with frozen Gaussian weights; tanh between layers, linear last
/// layer. Weight std is `0.5 / sqrt(dim)` so activations stay well-scaled
/// through the depth.
#[derive(Debug, Clone)]
pub struct ToyModel {
    layers: Vec<Tensor2D>,
    dim: usize,
}

impl ToyModel {
    pub fn new(
        seed: u64,
        dim: usize,
        depth: usize,
        outlier_frac: f64,
        outlier_scale: f32,
    ) -> Result<Self> {
        if dim == 0 || depth == 0 {
            return Err(Error::validation(format!("model dims {dim}x{depth} must be positive")));
        }
        let std = 0.5 / (dim as f32).sqrt();
        let layers = (0..depth)
            .map(|l| {
                gaussian_tensor(
                    derive_seed(seed, STREAM_LAYER_BASE + l as u64),
                    dim,
                    dim,
                    0.0,
                    std,
                    outlier_frac,
                    outlier_scale,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ToyModel { layers, dim })
    }

    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        ToyModel::new(
            cfg.seed,
            cfg.hidden_dim,
            cfg.depth,
            cfg.weight_outlier_frac,
            cfg.weight_outlier_scale,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layers(&self) -> &[Tensor2D] {
        &self.layers
    }
}

/// Full experiment description; serializable as the CLI's `run.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub steps: usize,
    pub tokens: usize,
    pub hidden_dim: usize,
    pub depth: usize,
    pub weight_method: WeightMethod,
    pub act_method: ActMethod,
    pub scheduler: SchedulerKind,
    pub bits_w: u8,
    pub b_low: u8,
    pub b_high: u8,
    pub pbq_steps: usize,
    pub seed: u64,
    /// Per-step input amplitude multipliers; `None` selects the default
    /// 10x -> 1x quadratic decay ramp.
    pub scale_profile: Option<Vec<f32>>,
    pub weight_outlier_frac: f64,
    pub weight_outlier_scale: f32,
    pub act_outlier_frac: f64,
    pub act_outlier_scale: f32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            steps: 50,
            tokens: 32,
            hidden_dim: 256,
            depth: 4,
            weight_method: WeightMethod::Pbq,
            act_method: ActMethod::Arq,
            scheduler: SchedulerKind::Fixed { bits: 4 },
            bits_w: 4,
            b_low: 4,
            b_high: 8,
            pbq_steps: 100,
            seed: 0,
            scale_profile: None,
            weight_outlier_frac: 0.003,
            weight_outlier_scale: 30.0,
            act_outlier_frac: 0.002,
            act_outlier_scale: 50.0,
        }
    }
}

impl RunConfig {
    /// The default activation amplitude ramp: `1 + 9 * (1 - t/(T-1))^2`.
    pub fn default_scale_profile(steps: usize) -> Vec<f32> {
        if steps == 1 {
            return vec![1.0];
        }
        (0..steps)
            .map(|t| {
                let u = 1.0 - t as f32 / (steps - 1) as f32;
                1.0 + 9.0 * u * u
            })
            .collect()
    }

    fn resolved_profile(&self) -> Result<Vec<f32>> {
        match &self.scale_profile {
            None => Ok(Self::default_scale_profile(self.steps)),
            Some(p) => {
                if p.len() != self.steps {
                    return Err(Error::validation(format!(
                        "scale profile has {} entries for {} steps",
                        p.len(),
                        self.steps
                    )));
                }
                if let Some(bad) = p.iter().find(|v| !v.is_finite()) {
                    return Err(Error::validation(format!("non-finite scale entry {bad}")));
                }
                Ok(p.clone())
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.tokens == 0 {
            return Err(Error::validation("steps and tokens must be positive".to_string()));
        }
        if self.weight_method != WeightMethod::None && !(2..=8).contains(&self.bits_w) {
            return Err(Error::validation(format!("bits_w {} outside [2, 8]", self.bits_w)));
        }
        if self.b_low >= self.b_high || self.b_low < 2 || self.b_high > 8 {
            return Err(Error::validation(format!(
                "bit pair ({}, {}) must satisfy 2 <= low < high <= 8",
                self.b_low, self.b_high
            )));
        }
        if let SchedulerKind::Fixed { bits } = self.scheduler {
            if !(2..=8).contains(&bits) {
                return Err(Error::validation(format!("fixed bits {bits} outside [2, 8]")));
            }
        }
        if let SchedulerKind::Gbs { delta } = self.scheduler {
            if delta.is_nan() || delta < 0.0 {
                return Err(Error::validation(format!("delta {delta} must be >= 0")));
            }
        }
        Ok(())
    }
}

/// Everything a single run produces.
#[derive(Debug, Clone)]
pub struct RunResult {
    /// Mean squared deviation of the final latent from the full-precision
    /// twin run.
    pub final_mse: f64,
    pub final_latent: Tensor2D,
    /// Normalized L1 increments between consecutive latents (length
    /// `steps - 1`).
    pub drift: Vec<f64>,
    pub schedule: BitSchedule,
    pub decisions: Vec<Decision>,
    pub average_bits: f64,
    /// Per-layer weight reconstruction reports (empty when weights stay in
    /// full precision).
    pub weight_reports: Vec<ErrorReport>,
}

/// One row of a threshold sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    /// Average bits from replaying the full-precision drift trace open-loop.
    pub average_bits_open_loop: f64,
    /// Average bits the live (closed-loop) run actually used.
    pub average_bits_closed_loop: f64,
    pub final_mse: f64,
}

struct LayerPrep {
    /// Weights in the forward's domain (rotated for the rotating methods).
    w_base: Tensor2D,
    /// Dequantized weights used by the fake-quant forward.
    w_eff: Tensor2D,
    report: Option<ErrorReport>,
}

struct Prepared {
    layers: Vec<LayerPrep>,
    ctx: Option<HadamardContext>,
}

fn quantize_weights(
    w: &Tensor2D,
    method: WeightMethod,
    bits: u8,
    pbq_steps: usize,
) -> Result<(Tensor2D, Option<ErrorReport>)> {
    match method {
        WeightMethod::None => Ok((w.clone(), None)),
        WeightMethod::Minmax => {
            let (q, report) = minmax_quantize(w, bits, ChannelAxis::Row)?;
            Ok((dequantize(&q), Some(report)))
        }
        WeightMethod::Pbq => {
            let (q, report) = pbq_quantize(w, &PbqConfig::new(bits, pbq_steps))?;
            Ok((dequantize(&q), Some(report)))
        }
    }
}

fn prepare(model: &ToyModel, cfg: &RunConfig) -> Result<Prepared> {
    let ctx = if cfg.act_method.rotates_weights() {
        Some(HadamardContext::new(model.dim())?)
    } else {
        None
    };
    let mut layers = Vec::with_capacity(model.layers().len());
    for w in model.layers() {
        let w_base = match &ctx {
            Some(ctx) => fht_rows(w, ctx)?,
            None => w.clone(),
        };
        let (w_eff, report) = match cfg.act_method {
            // The smoothing baseline rescales and requantizes per step, so
            // only the full-precision base is prepared here.
            ActMethod::Smoothquant => (w_base.clone(), None),
            _ => quantize_weights(&w_base, cfg.weight_method, cfg.bits_w, cfg.pbq_steps)?,
        };
        layers.push(LayerPrep { w_base, w_eff, report });
    }
    Ok(Prepared { layers, ctx })
}

/// Per-tensor min-max fake quantization (single bound pair for the whole
/// tensor, replicated across row channels).
fn fake_per_tensor(t: &Tensor2D, bits: u8) -> Result<Tensor2D> {
    let mut lo = f32::INFINITY;
    let mut hi = f32::NEG_INFINITY;
    for &v in t.data() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let params = QuantParams::new(bits, vec![lo; t.rows()], vec![hi; t.rows()])?;
    Ok(dequantize(&quantize(t, &params, ChannelAxis::Row)?))
}

fn scale_columns(t: &Tensor2D, scales: &[f32], invert: bool) -> Result<Tensor2D> {
    let mut data = Vec::with_capacity(t.len());
    for i in 0..t.rows() {
        for (j, &v) in t.row(i).iter().enumerate() {
            data.push(if invert { v / scales[j] } else { v * scales[j] });
        }
    }
    Tensor2D::new(t.rows(), t.cols(), data)
}

fn net_forward(
    prep: &Prepared,
    cfg: &RunConfig,
    x: &Tensor2D,
    bits_a: u8,
) -> Result<Tensor2D> {
    let depth = prep.layers.len();
    let mut h = x.clone();
    for (l, layer) in prep.layers.iter().enumerate() {
        let y = match cfg.act_method {
            ActMethod::None => h.matmul_nt(&layer.w_eff)?,
            ActMethod::Minmax => fake_per_tensor(&h, bits_a)?.matmul_nt(&layer.w_eff)?,
            ActMethod::Smoothquant => {
                let s = smoothquant_scales(&h, &layer.w_base, 0.5)?;
                let h_scaled = fake_per_tensor(&scale_columns(&h, &s, true)?, bits_a)?;
                let w_scaled = scale_columns(&layer.w_base, &s, false)?;
                let (w_eff, _) =
                    quantize_weights(&w_scaled, cfg.weight_method, cfg.bits_w, cfg.pbq_steps)?;
                h_scaled.matmul_nt(&w_eff)?
            }
            ActMethod::RotateOnly => {
                let ctx = prep.ctx.as_ref().expect("rotating method has a context");
                let rotated = fht_rows(&h, ctx)?;
                fake_per_tensor(&rotated, bits_a)?.matmul_nt(&layer.w_eff)?
            }
            ActMethod::Arq => {
                let ctx = prep.ctx.as_ref().expect("rotating method has a context");
                let (q, s) = arq_quantize_activation(&h, ctx, bits_a)?;
                dequantize_activation(&q, &s)?.matmul_nt(&layer.w_eff)?
            }
        };
        h = if l + 1 < depth { y.map(f32::tanh)? } else { y };
    }
    Ok(h)
}

enum Policy {
    Table(Vec<u8>),
    Gbs(GbsState),
}

fn latent_mse(a: &Tensor2D, b: &Tensor2D) -> f64 {
    let n = a.len() as f64;
    a.data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| (x as f64 - y as f64) * (x as f64 - y as f64))
        .sum::<f64>()
        / n
}

struct Trajectory {
    final_latent: Tensor2D,
    decisions: Vec<Decision>,
    schedule: BitSchedule,
    reports: Vec<ErrorReport>,
}

fn simulate(model: &ToyModel, cfg: &RunConfig) -> Result<Trajectory> {
    let profile = cfg.resolved_profile()?;
    let prep = prepare(model, cfg)?;
    let mut policy = match cfg.scheduler {
        SchedulerKind::Fixed { bits } => Policy::Table(vec![bits; cfg.steps]),
        SchedulerKind::Gbs { delta } => {
            Policy::Gbs(GbsState::new(delta, cfg.b_low, cfg.b_high)?)
        }
        SchedulerKind::Stp | SchedulerKind::Itp | SchedulerKind::Abs => {
            let schedules =
                baseline_schedules(cfg.steps, cfg.b_low, cfg.b_high, cfg.seed)?;
            let name = match cfg.scheduler {
                SchedulerKind::Stp => "stp",
                SchedulerKind::Itp => "itp",
                _ => "abs",
            };
            Policy::Table(schedules[name].bits.clone())
        }
        SchedulerKind::Sba { seed } => {
            let schedules = baseline_schedules(cfg.steps, cfg.b_low, cfg.b_high, seed)?;
            Policy::Table(schedules["sba"].bits.clone())
        }
    };

    let mut x = gaussian_tensor(
        derive_seed(cfg.seed, STREAM_X0),
        cfg.tokens,
        model.dim(),
        0.0,
        1.0,
        cfg.act_outlier_frac,
        cfg.act_outlier_scale,
    )?;

    let mut decisions = Vec::with_capacity(cfg.steps);
    let mut prev_latent: Option<Tensor2D> = None;
    let mut running = 0.0f64;
    for t in 0..cfg.steps {
        let bits_a = match &mut policy {
            Policy::Table(table) => {
                let inc = match &prev_latent {
                    None => 0.0,
                    Some(p) => crate::gbs::l1_rel(&x, p)?,
                };
                running += inc;
                let bits = table[t];
                decisions.push(Decision {
                    step: t,
                    bits,
                    increment: inc,
                    cumulative_before: running,
                });
                bits
            }
            Policy::Gbs(state) => state.decide(&x)?,
        };
        prev_latent = Some(x.clone());

        let scaled = x.map(|v| v * profile[t])?;
        let f = net_forward(&prep, cfg, &scaled, bits_a)?;
        x = Tensor2D::new(
            x.rows(),
            x.cols(),
            x.data().iter().zip(f.data()).map(|(&xi, &fi)| xi - ETA * fi).collect(),
        )?;
    }

    let decisions = match policy {
        Policy::Table(_) => decisions,
        Policy::Gbs(state) => state.decisions().to_vec(),
    };
    let schedule = BitSchedule::from_bits(decisions.iter().map(|d| d.bits).collect());
    Ok(Trajectory {
        final_latent: x,
        decisions,
        schedule,
        reports: prep.layers.into_iter().filter_map(|l| l.report).collect(),
    })
}

/// Runs the configured pipeline plus its full-precision twin.
pub fn run_denoise(model: &ToyModel, cfg: &RunConfig) -> Result<RunResult> {
    cfg.validate()?;
    let traj = simulate(model, cfg)?;
    let fp_cfg = RunConfig {
        weight_method: WeightMethod::None,
        act_method: ActMethod::None,
        scheduler: SchedulerKind::Fixed { bits: cfg.b_high },
        ..cfg.clone()
    };
    let fp = simulate(model, &fp_cfg)?;
    let drift: Vec<f64> = traj.decisions.iter().skip(1).map(|d| d.increment).collect();
    let average_bits = traj.schedule.average_bits;
    Ok(RunResult {
        final_mse: latent_mse(&traj.final_latent, &fp.final_latent),
        final_latent: traj.final_latent,
        drift,
        schedule: traj.schedule,
        decisions: traj.decisions,
        average_bits,
        weight_reports: traj.reports,
    })
}

/// The four fixed-pattern reference schedules.
///
/// * `stp`: low bits for the first half, high for the second (an odd step
///   count gives the extra step to the first half);
/// * `itp`: the reverse;
/// * `abs`: alternating, starting low;
/// * `sba`: seeded exact-count shuffle of `floor(T/2)` high steps.
pub fn baseline_schedules(
    steps: usize,
    b_low: u8,
    b_high: u8,
    seed: u64,
) -> Result<BTreeMap<&'static str, BitSchedule>> {
    if steps == 0 {
        return Err(Error::validation("steps must be positive".to_string()));
    }
    if b_low >= b_high {
        return Err(Error::validation(format!(
            "b_low {b_low} must be smaller than b_high {b_high}"
        )));
    }
    let first_half = steps.div_ceil(2);
    let stp: Vec<u8> =
        (0..steps).map(|t| if t < first_half { b_low } else { b_high }).collect();
    let itp: Vec<u8> =
        (0..steps).map(|t| if t < first_half { b_high } else { b_low }).collect();
    let abs: Vec<u8> =
        (0..steps).map(|t| if t % 2 == 0 { b_low } else { b_high }).collect();

    let mut sba: Vec<u8> = (0..steps)
        .map(|t| if t < steps - steps / 2 { b_low } else { b_high })
        .collect();
    let mut rng = crate::rng::DeterministicRng::new(seed);
    for i in (1..sba.len()).rev() {
        let j = rng.index(i as u64 + 1) as usize;
        sba.swap(i, j);
    }

    let mut out = BTreeMap::new();
    out.insert("stp", BitSchedule::from_bits(stp));
    out.insert("itp", BitSchedule::from_bits(itp));
    out.insert("abs", BitSchedule::from_bits(abs));
    out.insert("sba", BitSchedule::from_bits(sba));
    Ok(out)
}

/// One closed-loop run per threshold, plus the open-loop replay of the
/// full-precision drift trace. `deltas` must be sorted ascending.
pub fn delta_sweep(
    model: &ToyModel,
    cfg: &RunConfig,
    deltas: &[f64],
) -> Result<Vec<SweepRow>> {
    if deltas.is_empty() {
        return Err(Error::validation("empty delta list".to_string()));
    }
    if deltas.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::validation("deltas must be sorted ascending".to_string()));
    }
    if let Some(bad) = deltas.iter().find(|d| d.is_nan() || **d < 0.0) {
        return Err(Error::validation(format!("delta {bad} must be >= 0")));
    }

    let fp_cfg = RunConfig {
        weight_method: WeightMethod::None,
        act_method: ActMethod::None,
        scheduler: SchedulerKind::Fixed { bits: cfg.b_high },
        ..cfg.clone()
    };
    fp_cfg.validate()?;
    let fp = simulate(model, &fp_cfg)?;
    let trace: Vec<f64> = fp.decisions.iter().skip(1).map(|d| d.increment).collect();

    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let open = run_schedule(&trace, delta, cfg.b_low, cfg.b_high)?;
        let run_cfg = RunConfig { scheduler: SchedulerKind::Gbs { delta }, ..cfg.clone() };
        let result = run_denoise(model, &run_cfg)?;
        rows.push(SweepRow {
            delta,
            average_bits_open_loop: open.average_bits,
            average_bits_closed_loop: result.average_bits,
            final_mse: result.final_mse,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> RunConfig {
        RunConfig {
            steps: 12,
            tokens: 8,
            hidden_dim: 64,
            depth: 3,
            weight_method: WeightMethod::Pbq,
            act_method: ActMethod::Arq,
            scheduler: SchedulerKind::Fixed { bits: 4 },
            pbq_steps: 40,
            seed: 3,
            ..RunConfig::default()
        }
    }

    #[test]
    fn full_precision_run_has_zero_mse() {
        let cfg = RunConfig {
            weight_method: WeightMethod::None,
            act_method: ActMethod::None,
            ..small_cfg()
        };
        let model = ToyModel::from_config(&cfg).unwrap();
        let result = run_denoise(&model, &cfg).unwrap();
        assert_eq!(result.final_mse, 0.0);
        assert!(result.weight_reports.is_empty());
    }

    #[test]
    fn identical_seeds_reproduce_bitwise() {
        let cfg = small_cfg();
        let model = ToyModel::from_config(&cfg).unwrap();
        let a = run_denoise(&model, &cfg).unwrap();
        let b = run_denoise(&model, &cfg).unwrap();
        assert_eq!(a.final_latent.data(), b.final_latent.data());
        assert_eq!(a.final_mse, b.final_mse);
    }

    #[test]
    fn gbs_limits_reduce_to_fixed_schedules() {
        let base = small_cfg();
        let model = ToyModel::from_config(&base).unwrap();

        let zero = RunConfig { scheduler: SchedulerKind::Gbs { delta: 0.0 }, ..base.clone() };
        let high = RunConfig {
            scheduler: SchedulerKind::Fixed { bits: base.b_high },
            ..base.clone()
        };
        let a = run_denoise(&model, &zero).unwrap();
        let b = run_denoise(&model, &high).unwrap();
        assert_eq!(a.final_latent.data(), b.final_latent.data());
        assert!(a.schedule.bits.iter().all(|&x| x == base.b_high));

        let huge = RunConfig { scheduler: SchedulerKind::Gbs { delta: 1e9 }, ..base.clone() };
        let low = RunConfig {
            scheduler: SchedulerKind::Fixed { bits: base.b_low },
            ..base.clone()
        };
        let c = run_denoise(&model, &huge).unwrap();
        let d = run_denoise(&model, &low).unwrap();
        assert_eq!(c.final_latent.data(), d.final_latent.data());
        assert_eq!(c.average_bits, base.b_low as f64);
    }

    #[test]
    fn drift_trace_decays_with_the_ramp() {
        let cfg = RunConfig {
            steps: 40,
            weight_method: WeightMethod::None,
            act_method: ActMethod::None,
            ..small_cfg()
        };
        let model = ToyModel::from_config(&cfg).unwrap();
        let result = run_denoise(&model, &cfg).unwrap();
        assert!(result.drift.iter().all(|&d| d > 0.0));
        let q = result.drift.len() / 4;
        let first: f64 = result.drift[..q].iter().sum::<f64>() / q as f64;
        let last: f64 = result.drift[result.drift.len() - q..].iter().sum::<f64>() / q as f64;
        assert!(last < first, "first-quartile {first} last-quartile {last}");
    }

    #[test]
    fn baseline_schedule_hand_cases() {
        let s = baseline_schedules(4, 4, 8, 0).unwrap();
        assert_eq!(s["stp"].bits, vec![4, 4, 8, 8]);
        assert_eq!(s["itp"].bits, vec![8, 8, 4, 4]);
        assert_eq!(s["abs"].bits, vec![4, 8, 4, 8]);
        assert_eq!(s["sba"].bits.iter().filter(|&&b| b == 8).count(), 2);
        for schedule in s.values() {
            assert_eq!(schedule.average_bits, 6.0);
        }
    }

    #[test]
    fn odd_step_count_pads_the_first_half() {
        let s = baseline_schedules(5, 4, 8, 1).unwrap();
        assert_eq!(s["stp"].bits, vec![4, 4, 4, 8, 8]);
        assert_eq!(s["itp"].bits, vec![8, 8, 8, 4, 4]);
        assert_eq!(s["sba"].bits.iter().filter(|&&b| b == 8).count(), 2);
    }

    #[test]
    fn sba_is_seeded_and_balanced() {
        let a = baseline_schedules(50, 4, 8, 7).unwrap();
        let b = baseline_schedules(50, 4, 8, 7).unwrap();
        let c = baseline_schedules(50, 4, 8, 8).unwrap();
        assert_eq!(a["sba"], b["sba"]);
        assert_ne!(a["sba"].bits, c["sba"].bits);
        assert_eq!(a["sba"].bits.iter().filter(|&&b| b == 8).count(), 25);
    }

    #[test]
    fn quantized_beats_nothing_never_but_methods_order() {
        // Smoke check of the headline ordering on a couple of seeds; the
        // 20-seed version lives in the acceptance suite.
        for seed in [1u64, 2] {
            let full = RunConfig { seed, ..small_cfg() };
            let naive = RunConfig {
                weight_method: WeightMethod::Minmax,
                act_method: ActMethod::Minmax,
                ..full.clone()
            };
            let model = ToyModel::from_config(&full).unwrap();
            let a = run_denoise(&model, &full).unwrap();
            let b = run_denoise(&model, &naive).unwrap();
            assert!(a.final_mse < b.final_mse, "seed {seed}: {} vs {}", a.final_mse, b.final_mse);
        }
    }

    #[test]
    fn sweep_endpoints_and_open_loop_monotonicity() {
        let cfg = small_cfg();
        let model = ToyModel::from_config(&cfg).unwrap();
        let deltas = [0.0, 0.01, 0.05, 0.2, 1.0, 1e9];
        let rows = delta_sweep(&model, &cfg, &deltas).unwrap();
        assert_eq!(rows.first().unwrap().average_bits_open_loop, cfg.b_high as f64);
        assert_eq!(rows.last().unwrap().average_bits_open_loop, cfg.b_low as f64);
        for w in rows.windows(2) {
            assert!(w[1].average_bits_open_loop <= w[0].average_bits_open_loop);
        }
    }

    #[test]
    fn config_validation_errors() {
        let model = ToyModel::new(0, 16, 2, 0.0, 1.0).unwrap();
        let mut cfg = RunConfig { hidden_dim: 16, depth: 2, ..small_cfg() };
        cfg.scale_profile = Some(vec![1.0; 3]); // wrong length
        assert!(run_denoise(&model, &cfg).is_err());
        let cfg = RunConfig { b_low: 8, b_high: 4, hidden_dim: 16, depth: 2, ..small_cfg() };
        assert!(run_denoise(&model, &cfg).is_err());
        assert!(delta_sweep(&model, &small_cfg(), &[0.5, 0.1]).is_err());
    }

    #[test]
    fn run_config_json_round_trip() {
        let cfg = RunConfig { scheduler: SchedulerKind::Gbs { delta: 0.25 }, ..small_cfg() };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.scheduler, cfg.scheduler);
        assert_eq!(back.steps, cfg.steps);
        // Missing fields take defaults.
        let sparse: RunConfig = serde_json::from_str(r#"{"steps": 5}"#).unwrap();
        assert_eq!(sparse.steps, 5);
        assert_eq!(sparse.tokens, RunConfig::default().tokens);
    }
}

//! `dvdq eval-arq`: rotation diagnostics for activation dumps.

use std::path::PathBuf;

use clap::Args;
use dvdq_core::{
    arq_quantize_activation, dequantize_activation, error_report, fht_rows, load_npy,
    range_spread_ratio, ChannelAxis, ErrorReport, HadamardContext, Result,
};
use serde::{Deserialize, Serialize};

use super::{prepare_out_dir, write_bytes, write_json};
use crate::svg;

#[derive(Debug, Args)]
pub struct EvalArqArgs {
    /// NPY activation dumps to analyse.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Activation bit-width.
    #[arg(long = "bits-a", default_value_t = 4)]
    pub bits_a: u8,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Overwrite existing artifacts.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct InputDiagnostics {
    file: String,
    rows: usize,
    cols: usize,
    /// max/median column range before rotation.
    pre_rotation_spread: f64,
    /// ... and after.
    post_rotation_spread: f64,
    /// Round-trip error of the full rotate-scale-quantize path, measured in
    /// the original domain per feature column.
    error: ErrorReport,
}

#[derive(Debug, Serialize, Deserialize)]
struct EvalArqDoc {
    format_version: u32,
    bits_a: u8,
    inputs: Vec<InputDiagnostics>,
}

pub fn run(args: &EvalArqArgs) -> Result<()> {
    let outputs = vec![
        args.out.join("eval_arq.json"),
        args.out.join("ranges.csv"),
        args.out.join("ranges.svg"),
    ];
    prepare_out_dir(&args.out, args.force, &outputs)?;

    let mut docs = Vec::with_capacity(args.inputs.len());
    for input in &args.inputs {
        let x = load_npy(input)?;
        let ctx = HadamardContext::new(x.cols())?;
        let rotated = fht_rows(&x, &ctx)?;
        let pre = range_spread_ratio(&x) as f64;
        let post = range_spread_ratio(&rotated) as f64;
        let (q, s) = arq_quantize_activation(&x, &ctx, args.bits_a)?;
        // Rotation is self-inverse, so applying it again maps the
        // reconstruction back to the input domain.
        let back = fht_rows(&dequantize_activation(&q, &s)?, &ctx)?;
        let error = error_report(&x, &back, ChannelAxis::Col)?;
        docs.push(InputDiagnostics {
            file: input
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| input.display().to_string()),
            rows: x.rows(),
            cols: x.cols(),
            pre_rotation_spread: pre,
            post_rotation_spread: post,
            error,
        });
    }

    let mut csv =
        String::from("file,rows,cols,pre_rotation_spread,post_rotation_spread,mse,max_abs\n");
    for d in &docs {
        csv.push_str(&format!(
            "{},{},{},{:e},{:e},{:e},{:e}\n",
            d.file, d.rows, d.cols, d.pre_rotation_spread, d.post_rotation_spread, d.error.mse,
            d.error.max_abs
        ));
    }
    write_bytes(&args.out.join("ranges.csv"), csv.as_bytes())?;

    let labels: Vec<String> = docs.iter().map(|d| d.file.clone()).collect();
    let chart = svg::bar_chart(
        "column range spread before/after rotation",
        "max/median range",
        &labels,
        &[
            ("pre-rotation", docs.iter().map(|d| d.pre_rotation_spread).collect()),
            ("post-rotation", docs.iter().map(|d| d.post_rotation_spread).collect()),
        ],
    );
    write_bytes(&args.out.join("ranges.svg"), chart.as_bytes())?;

    let doc = EvalArqDoc {
        format_version: super::REPORT_FORMAT_VERSION,
        bits_a: args.bits_a,
        inputs: docs,
    };
    write_json(&args.out.join("eval_arq.json"), &doc)?;
    for d in &doc.inputs {
        println!(
            "{}: spread {:.2} -> {:.2}, round-trip mse {:.3e}",
            d.file, d.pre_rotation_spread, d.post_rotation_spread, d.error.mse
        );
    }
    Ok(())
}

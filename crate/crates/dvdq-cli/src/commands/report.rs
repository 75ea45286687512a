//! `dvdq report`: comparison tables and error histograms from saved
//! quantize reports.

use std::path::PathBuf;

use clap::Args;
use dvdq_core::Result;

use serde::Serialize;

use super::{prepare_out_dir, write_bytes, write_json, QuantizeReport};
use crate::svg;

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// `report.json` files produced by `dvdq quantize` (one per method).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Overwrite existing artifacts.
    #[arg(long)]
    pub force: bool,
}

/// Shared log10 bin edges over every per-channel MSE in the comparison.
fn log_bins(reports: &[(String, QuantizeReport)], bins: usize) -> Vec<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, r) in reports {
        for layer in &r.layers {
            for &m in &layer.error.per_channel_mse {
                let v = m.max(1e-20).log10();
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        lo = -20.0;
        hi = 0.0;
    }
    if hi - lo < 1e-9 {
        hi = lo + 1.0;
    }
    (0..=bins)
        .map(|i| lo + (hi - lo) * i as f64 / bins as f64)
        .collect()
}

fn histogram(report: &QuantizeReport, edges: &[f64]) -> Vec<usize> {
    let bins = edges.len() - 1;
    let lo = edges[0];
    let hi = edges[bins];
    let mut counts = vec![0usize; bins];
    for layer in &report.layers {
        for &m in &layer.error.per_channel_mse {
            let v = m.max(1e-20).log10();
            let frac = ((v - lo) / (hi - lo)).clamp(0.0, 1.0);
            let b = ((frac * bins as f64) as usize).min(bins - 1);
            counts[b] += 1;
        }
    }
    counts
}

pub fn run(args: &ReportArgs) -> Result<()> {
    let outputs = vec![
        args.out.join("summary.csv"),
        args.out.join("summary.json"),
        args.out.join("histogram.svg"),
    ];
    prepare_out_dir(&args.out, args.force, &outputs)?;

    let mut reports = Vec::with_capacity(args.inputs.len());
    for path in &args.inputs {
        let doc = QuantizeReport::load(path)?;
        let label = format!(
            "{} ({})",
            doc.method,
            path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
        );
        reports.push((label, doc));
    }

    let mut csv = String::from(
        "source,method,layer,rows,cols,bits,mse,max_abs,err_mean,err_std,err_std_ratio\n",
    );
    for (label, r) in &reports {
        for layer in &r.layers {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{:e},{:e},{:e},{:e},{:e}\n",
                label,
                r.method,
                layer.name,
                layer.rows,
                layer.cols,
                layer.bits,
                layer.error.mse,
                layer.error.max_abs,
                layer.error.err_mean,
                layer.error.err_std,
                layer.err_std_ratio
            ));
        }
    }
    write_bytes(&args.out.join("summary.csv"), csv.as_bytes())?;

    #[derive(Serialize)]
    struct SummaryDoc<'a> {
        format_version: u32,
        sources: Vec<SourceSummary<'a>>,
    }
    #[derive(Serialize)]
    struct SourceSummary<'a> {
        source: &'a str,
        method: &'a str,
        bits_w: u8,
        mean_err_std_ratio: f64,
        max_err_std_ratio: f64,
        layers: usize,
    }
    let doc = SummaryDoc {
        format_version: super::REPORT_FORMAT_VERSION,
        sources: reports
            .iter()
            .map(|(label, r)| SourceSummary {
                source: label,
                method: &r.method,
                bits_w: r.bits_w,
                mean_err_std_ratio: r.mean_err_std_ratio,
                max_err_std_ratio: r.max_err_std_ratio,
                layers: r.layers.len(),
            })
            .collect(),
    };
    write_json(&args.out.join("summary.json"), &doc)?;

    let edges = log_bins(&reports, 40);
    let series: Vec<(&str, Vec<usize>)> = reports
        .iter()
        .map(|(label, r)| (label.as_str(), histogram(r, &edges)))
        .collect();
    let chart = svg::histogram_chart(
        "per-channel reconstruction error distribution",
        "log10 per-channel mse",
        &edges,
        &series,
    );
    write_bytes(&args.out.join("histogram.svg"), chart.as_bytes())?;
    println!("compared {} report(s) across {} histogram bins", reports.len(), edges.len() - 1);
    Ok(())
}

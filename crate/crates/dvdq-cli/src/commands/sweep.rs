//! `dvdq sweep-delta`: threshold sweep with open-loop and closed-loop
//! average bit-widths.

use std::path::PathBuf;

use clap::Args;
use dvdq_core::{delta_sweep, Error, Result, ToyModel};

use serde::Serialize;

use super::{prepare_out_dir, write_bytes, write_json};
use crate::svg;

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Run configuration (JSON); the scheduler field is replaced per delta.
    #[arg(long)]
    pub config: PathBuf,
    /// Comma-separated ascending thresholds, e.g. `0,0.05,0.1,1e9`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub deltas: Vec<f64>,
    /// Override the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Overwrite existing artifacts.
    #[arg(long)]
    pub force: bool,
}

pub fn run(args: &SweepArgs) -> Result<()> {
    let mut cfg = super::simulate::load_config(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if args.deltas.iter().any(|d| d.is_nan()) {
        return Err(Error::validation("deltas must be numbers".to_string()));
    }
    let outputs = vec![
        args.out.join("sweep.csv"),
        args.out.join("sweep.json"),
        args.out.join("sweep.svg"),
    ];
    prepare_out_dir(&args.out, args.force, &outputs)?;

    let model = ToyModel::from_config(&cfg)?;
    let rows = delta_sweep(&model, &cfg, &args.deltas)?;

    #[derive(Serialize)]
    struct SweepDoc<'a> {
        format_version: u32,
        rows: &'a [dvdq_core::SweepRow],
    }
    write_json(
        &args.out.join("sweep.json"),
        &SweepDoc { format_version: super::REPORT_FORMAT_VERSION, rows: &rows },
    )?;

    let mut csv =
        String::from("delta,average_bits_open_loop,average_bits_closed_loop,final_mse\n");
    for r in &rows {
        csv.push_str(&format!(
            "{:e},{},{},{:e}\n",
            r.delta, r.average_bits_open_loop, r.average_bits_closed_loop, r.final_mse
        ));
    }
    write_bytes(&args.out.join("sweep.csv"), csv.as_bytes())?;

    let labels: Vec<String> = rows.iter().map(|r| format!("{:e}", r.delta)).collect();
    let chart = svg::line_chart(
        "average bit-width vs switching threshold",
        "average bits",
        &labels,
        &[
            ("open-loop", rows.iter().map(|r| r.average_bits_open_loop).collect()),
            ("closed-loop", rows.iter().map(|r| r.average_bits_closed_loop).collect()),
        ],
        Some((cfg.b_low as f64 - 0.5, cfg.b_high as f64 + 0.5)),
    );
    write_bytes(&args.out.join("sweep.svg"), chart.as_bytes())?;
    println!(
        "swept {} thresholds: open-loop bits {} -> {}",
        rows.len(),
        rows.first().map(|r| r.average_bits_open_loop).unwrap_or_default(),
        rows.last().map(|r| r.average_bits_open_loop).unwrap_or_default()
    );
    Ok(())
}

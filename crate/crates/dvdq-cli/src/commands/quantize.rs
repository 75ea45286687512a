//! `dvdq quantize`: pack every manifest layer and report errors against the
//! min-max baseline.

use std::path::{Path, PathBuf};

use clap::Args;
use dvdq_core::{
    dequantize, error_report, load_npy, minmax_quantize, pack, pbq_quantize, ChannelAxis, Error,
    Manifest, PbqConfig, Result,
};

use super::{prepare_out_dir, write_bytes, write_json, LayerReport, QuantizeReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    Minmax,
    Pbq,
}

#[derive(Debug, Args)]
pub struct QuantizeArgs {
    /// Manifest of layer weight files.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Weight quantizer.
    #[arg(long, value_enum, default_value = "pbq")]
    pub method: Method,
    /// Weight bit-width.
    #[arg(long = "bits-w", default_value_t = 4)]
    pub bits_w: u8,
    /// Bound-shrink steps for the pbq method.
    #[arg(long = "steps", default_value_t = 100)]
    pub steps: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Overwrite existing artifacts.
    #[arg(long)]
    pub force: bool,
}

fn check_layer_name(name: &str) -> Result<()> {
    if name.is_empty()
        || !name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-'))
    {
        return Err(Error::validation(format!(
            "layer name '{name}' is not filesystem-safe ([A-Za-z0-9._-] only)"
        )));
    }
    Ok(())
}

pub fn run(args: &QuantizeArgs, verbose: bool) -> Result<()> {
    let manifest = Manifest::load(&args.manifest)?;
    let base = args.manifest.parent().unwrap_or_else(|| Path::new("."));

    let mut outputs = vec![args.out.join("report.json"), args.out.join("report.csv")];
    for layer in &manifest.layers {
        check_layer_name(&layer.name)?;
        outputs.push(args.out.join(format!("{}.dvdq", layer.name)));
        outputs.push(args.out.join(format!("{}.error.json", layer.name)));
    }
    prepare_out_dir(&args.out, args.force, &outputs)?;

    let mut layers = Vec::with_capacity(manifest.layers.len());
    for layer in &manifest.layers {
        let path = layer.resolve(base);
        let w = load_npy(&path)?;
        if w.shape() != (layer.rows, layer.cols) {
            return Err(Error::validation(format!(
                "layer '{}': file is {}x{}, manifest says {}x{}",
                layer.name,
                w.rows(),
                w.cols(),
                layer.rows,
                layer.cols
            )));
        }
        let (q, error) = match args.method {
            Method::Minmax => minmax_quantize(&w, args.bits_w, ChannelAxis::Row)?,
            Method::Pbq => {
                pbq_quantize(&w, &PbqConfig::new(args.bits_w, args.steps))?
            }
        };
        let minmax_error = match args.method {
            Method::Minmax => error_report(&w, &dequantize(&q), ChannelAxis::Row)?,
            Method::Pbq => minmax_quantize(&w, args.bits_w, ChannelAxis::Row)?.1,
        };

        write_bytes(&args.out.join(format!("{}.dvdq", layer.name)), &pack(&q)?)?;
        write_json(&args.out.join(format!("{}.error.json", layer.name)), &error)?;

        let ratio = if minmax_error.err_std == 0.0 {
            1.0
        } else {
            error.err_std / minmax_error.err_std
        };
        if verbose {
            println!(
                "  {}: {}x{} mse {:.4e} err_std ratio {:.4}",
                layer.name,
                w.rows(),
                w.cols(),
                error.mse,
                ratio
            );
        }
        layers.push(LayerReport {
            name: layer.name.clone(),
            rows: w.rows(),
            cols: w.cols(),
            bits: args.bits_w,
            error,
            minmax_error,
            err_std_ratio: ratio,
        });
    }

    let mean = layers.iter().map(|l| l.err_std_ratio).sum::<f64>() / layers.len() as f64;
    let max = layers.iter().map(|l| l.err_std_ratio).fold(0.0f64, f64::max);
    let report = QuantizeReport {
        format_version: super::REPORT_FORMAT_VERSION,
        method: match args.method {
            Method::Minmax => "minmax".to_string(),
            Method::Pbq => "pbq".to_string(),
        },
        bits_w: args.bits_w,
        pbq_steps: args.steps,
        layers,
        mean_err_std_ratio: mean,
        max_err_std_ratio: max,
    };
    write_json(&args.out.join("report.json"), &report)?;

    let mut csv = format!("layer,{}\n", dvdq_core::ErrorReport::CSV_HEADER);
    for layer in &report.layers {
        csv.push_str(&format!("{},{}\n", layer.name, layer.error.csv_row()));
    }
    super::write_bytes(&args.out.join("report.csv"), csv.as_bytes())?;
    println!(
        "quantized {} layers at {} bits (mean err_std ratio vs min-max: {:.4})",
        report.layers.len(),
        args.bits_w,
        report.mean_err_std_ratio
    );
    Ok(())
}

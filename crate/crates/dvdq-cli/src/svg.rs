//! Deterministic SVG chart emission.
//!
//! Fixed canvas, monospace `<text>` labels, and `{:.3}`-formatted
//! coordinates: rerunning a command on identical inputs reproduces the
//! artifact byte for byte. No timestamps, no external fonts.

use std::fmt::Write as _;

pub const PALETTE: [&str; 4] = ["#4477aa", "#ee6677", "#228833", "#ccbb44"];

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;

struct Canvas {
    body: String,
}

impl Canvas {
    fn new(title: &str) -> Self {
        let mut body = String::new();
        let _ = writeln!(
            body,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
             <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>"
        );
        let _ = writeln!(
            body,
            "<text x=\"{:.3}\" y=\"24\" font-family=\"monospace\" font-size=\"15\" \
             text-anchor=\"middle\">{}</text>",
            WIDTH / 2.0,
            escape(title)
        );
        Canvas { body }
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, opacity: f64) {
        let _ = writeln!(
            self.body,
            "<rect x=\"{x:.3}\" y=\"{y:.3}\" width=\"{w:.3}\" height=\"{h:.3}\" \
             fill=\"{fill}\" fill-opacity=\"{opacity:.2}\"/>"
        );
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
        let _ = writeln!(
            self.body,
            "<line x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\" \
             stroke=\"{stroke}\" stroke-width=\"1\"/>"
        );
    }

    fn polyline(&mut self, points: &[(f64, f64)], stroke: &str) {
        let pts: Vec<String> =
            points.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
        let _ = writeln!(
            self.body,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"2\"/>",
            pts.join(" ")
        );
    }

    fn text(&mut self, x: f64, y: f64, size: u32, anchor: &str, content: &str) {
        let _ = writeln!(
            self.body,
            "<text x=\"{x:.3}\" y=\"{y:.3}\" font-family=\"monospace\" font-size=\"{size}\" \
             text-anchor=\"{anchor}\">{}</text>",
            escape(content)
        );
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn plot_area() -> (f64, f64, f64, f64) {
    (
        MARGIN_LEFT,
        MARGIN_TOP,
        WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
    )
}

fn axes(c: &mut Canvas, y_min: f64, y_max: f64, y_label: &str) {
    let (x0, y0, w, h) = plot_area();
    c.line(x0, y0 + h, x0 + w, y0 + h, "#000000");
    c.line(x0, y0, x0, y0 + h, "#000000");
    for k in 0..=4 {
        let frac = k as f64 / 4.0;
        let value = y_min + (y_max - y_min) * frac;
        let y = y0 + h * (1.0 - frac);
        c.line(x0 - 4.0, y, x0, y, "#000000");
        c.text(x0 - 8.0, y + 4.0, 11, "end", &format!("{value:.3}"));
    }
    c.text(16.0, y0 - 14.0, 12, "start", y_label);
}

fn legend(c: &mut Canvas, names: &[&str]) {
    let (x0, y0, w, _) = plot_area();
    let mut x = x0 + w - 160.0;
    let mut y = y0 + 6.0;
    for (i, name) in names.iter().enumerate() {
        c.rect(x, y, 12.0, 12.0, PALETTE[i % PALETTE.len()], 0.9);
        c.text(x + 18.0, y + 10.0, 11, "start", name);
        y += 18.0;
        if y > y0 + 6.0 + 5.0 * 18.0 {
            y = y0 + 6.0;
            x += 170.0;
        }
    }
}

/// Grouped vertical bars: one group per label, one bar per series.
pub fn bar_chart(
    title: &str,
    y_label: &str,
    labels: &[String],
    series: &[(&str, Vec<f64>)],
) -> String {
    let mut c = Canvas::new(title);
    let (x0, y0, w, h) = plot_area();
    let y_max = series
        .iter()
        .flat_map(|(_, v)| v.iter().copied())
        .fold(0.0f64, f64::max)
        .max(1e-12)
        * 1.05;
    axes(&mut c, 0.0, y_max, y_label);

    let groups = labels.len().max(1) as f64;
    let group_w = w / groups;
    let bar_w = group_w * 0.8 / series.len().max(1) as f64;
    for (g, label) in labels.iter().enumerate() {
        let gx = x0 + g as f64 * group_w;
        for (s, (_, values)) in series.iter().enumerate() {
            let v = values.get(g).copied().unwrap_or(0.0);
            let bh = h * (v / y_max);
            c.rect(
                gx + group_w * 0.1 + s as f64 * bar_w,
                y0 + h - bh,
                bar_w,
                bh,
                PALETTE[s % PALETTE.len()],
                0.9,
            );
        }
        c.text(gx + group_w / 2.0, y0 + h + 16.0, 10, "middle", label);
    }
    legend(&mut c, &series.iter().map(|(n, _)| *n).collect::<Vec<_>>());
    c.finish()
}

/// Index-spaced line chart (categorical x axis).
pub fn line_chart(
    title: &str,
    y_label: &str,
    x_labels: &[String],
    series: &[(&str, Vec<f64>)],
    y_range: Option<(f64, f64)>,
) -> String {
    let mut c = Canvas::new(title);
    let (x0, y0, w, h) = plot_area();
    let (y_min, y_max) = y_range.unwrap_or_else(|| {
        let lo = series
            .iter()
            .flat_map(|(_, v)| v.iter().copied())
            .fold(f64::INFINITY, f64::min);
        let hi = series
            .iter()
            .flat_map(|(_, v)| v.iter().copied())
            .fold(f64::NEG_INFINITY, f64::max);
        let pad = ((hi - lo) * 0.05).max(1e-12);
        (lo - pad, hi + pad)
    });
    axes(&mut c, y_min, y_max, y_label);

    let n = x_labels.len().max(2);
    let step = w / (n as f64 - 1.0);
    for (s, (_, values)) in series.iter().enumerate() {
        let points: Vec<(f64, f64)> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let frac = ((v - y_min) / (y_max - y_min)).clamp(0.0, 1.0);
                (x0 + i as f64 * step, y0 + h * (1.0 - frac))
            })
            .collect();
        c.polyline(&points, PALETTE[s % PALETTE.len()]);
    }
    // Thin the x labels so they stay readable.
    let every = (x_labels.len() / 12).max(1);
    for (i, label) in x_labels.iter().enumerate() {
        if i % every == 0 || i + 1 == x_labels.len() {
            let x = x0 + i as f64 * step;
            c.line(x, y0 + h, x, y0 + h + 4.0, "#000000");
            c.text(x, y0 + h + 16.0, 10, "middle", label);
        }
    }
    legend(&mut c, &series.iter().map(|(n, _)| *n).collect::<Vec<_>>());
    c.finish()
}

/// Overlaid translucent histograms over shared bin edges.
pub fn histogram_chart(
    title: &str,
    x_label: &str,
    bin_edges: &[f64],
    series: &[(&str, Vec<usize>)],
) -> String {
    let mut c = Canvas::new(title);
    let (x0, y0, w, h) = plot_area();
    let y_max = series
        .iter()
        .flat_map(|(_, counts)| counts.iter().copied())
        .max()
        .unwrap_or(1)
        .max(1) as f64;
    axes(&mut c, 0.0, y_max, "channels");

    let bins = bin_edges.len().saturating_sub(1).max(1);
    let bin_w = w / bins as f64;
    for (s, (_, counts)) in series.iter().enumerate() {
        for (b, &count) in counts.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let bh = h * (count as f64 / y_max);
            c.rect(
                x0 + b as f64 * bin_w,
                y0 + h - bh,
                bin_w,
                bh,
                PALETTE[s % PALETTE.len()],
                0.45,
            );
        }
    }
    let every = (bins / 8).max(1);
    for (i, edge) in bin_edges.iter().enumerate() {
        if i % every == 0 || i == bin_edges.len() - 1 {
            let x = x0 + i as f64 * bin_w;
            c.line(x, y0 + h, x, y0 + h + 4.0, "#000000");
            c.text(x, y0 + h + 16.0, 10, "middle", &format!("{edge:.1}"));
        }
    }
    c.text(x0 + w / 2.0, y0 + h + 34.0, 11, "middle", x_label);
    legend(&mut c, &series.iter().map(|(n, _)| *n).collect::<Vec<_>>());
    c.finish()
}

//! CSV and SVG emission. Every file starts with a comment header recording
//! the config hash, seed and library version; floats are written with 17
//! significant digits so reruns are byte-comparable.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::config::RunConfig;

/// 17-significant-digit float formatting (16 digits after the point in
/// scientific notation).
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn provenance_header(cfg: &RunConfig) -> String {
    format!(
        "# config_hash={:016x} seed={} version={}\n",
        cfg.hash(),
        cfg.seed,
        env!("CARGO_PKG_VERSION")
    )
}

/// Write a CSV file with the provenance header, a column header line and
/// pre-rendered rows.
pub fn write_csv(
    path: &Path,
    cfg: &RunConfig,
    columns: &[&str],
    rows: &[Vec<String>],
) -> io::Result<()> {
    let mut text = provenance_header(cfg);
    text.push_str(&columns.join(","));
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text)
}

/// One point of a scatter plot.
pub struct ScatterPoint {
    pub x: f64,
    pub y: f64,
    /// Index into the class table (color + legend label).
    pub class: usize,
}

const CLASS_COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e"];

/// Self-contained static scatter plot: axes, ticks, legend, no external
/// assets.
pub fn scatter_svg(
    title: &str,
    x_label: &str,
    y_label: &str,
    class_labels: &[&str],
    points: &[ScatterPoint],
) -> String {
    let (w, h) = (720.0, 520.0);
    let (ml, mr, mt, mb) = (80.0, 20.0, 40.0, 60.0);
    let plot_w = w - ml - mr;
    let plot_h = h - mt - mb;

    let finite = |p: &&ScatterPoint| p.x.is_finite() && p.y.is_finite();
    let xs: Vec<f64> = points.iter().filter(finite).map(|p| p.x).collect();
    let ys: Vec<f64> = points.iter().filter(finite).map(|p| p.y).collect();
    let (x0, x1) = padded_range(&xs);
    let (y0, y1) = padded_range(&ys);
    let px = |x: f64| ml + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| mt + plot_h - (y - y0) / (y1 - y0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    let _ = writeln!(s, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{title}</text>",
        w / 2.0
    );
    // Axes box.
    let _ = writeln!(
        s,
        "<rect x=\"{ml}\" y=\"{mt}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"black\"/>"
    );
    // Ticks.
    for i in 0..=5 {
        let fx = x0 + (x1 - x0) * i as f64 / 5.0;
        let fy = y0 + (y1 - y0) * i as f64 / 5.0;
        let tx = px(fx);
        let ty = py(fy);
        let _ = writeln!(
            s,
            "<line x1=\"{tx}\" y1=\"{}\" x2=\"{tx}\" y2=\"{}\" stroke=\"black\"/>",
            mt + plot_h,
            mt + plot_h + 5.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{tx}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{fx:.3}</text>",
            mt + plot_h + 18.0
        );
        let _ = writeln!(
            s,
            "<line x1=\"{}\" y1=\"{ty}\" x2=\"{ml}\" y2=\"{ty}\" stroke=\"black\"/>",
            ml - 5.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{fy:.3}</text>",
            ml - 8.0,
            ty + 4.0
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{x_label}</text>",
        ml + plot_w / 2.0,
        h - 15.0
    );
    let _ = writeln!(
        s,
        "<text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{y_label}</text>",
        mt + plot_h / 2.0,
        mt + plot_h / 2.0
    );
    // Points.
    for p in points.iter().filter(finite) {
        let color = CLASS_COLORS[p.class % CLASS_COLORS.len()];
        let _ = writeln!(
            s,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.2\" fill=\"{color}\" fill-opacity=\"0.75\"/>",
            px(p.x),
            py(p.y)
        );
    }
    // Legend.
    for (i, label) in class_labels.iter().enumerate() {
        let ly = mt + 14.0 + 18.0 * i as f64;
        let color = CLASS_COLORS[i % CLASS_COLORS.len()];
        let _ = writeln!(
            s,
            "<circle cx=\"{}\" cy=\"{ly}\" r=\"4\" fill=\"{color}\"/>",
            ml + 14.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{label}</text>",
            ml + 24.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn padded_range(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 1.0);
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if (hi - lo).abs() < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = (hi - lo) * 0.06;
    (lo - pad, hi + pad)
}

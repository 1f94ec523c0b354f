//! Hand-rolled SVG plots for reports: convergence polylines and accuracy
//! bars. Output is deterministic for identical input (fixed palette, fixed
//! float formatting).

use std::path::Path;

use crate::error::Result;
use crate::report::ExperimentReport;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 520.0;
const MARGIN: f64 = 60.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn fmt(x: f64) -> String {
    format!("{x:.3}")
}

fn svg_open(title: &str) -> String {
    format!(
        concat!(
            r#"<svg version="1.1" width="{w}" height="{h}" xmlns="http://www.w3.org/2000/svg">"#,
            "\n",
            r#"<rect width="{w}" height="{h}" fill="white"/>"#,
            "\n",
            r#"<text x="{tx}" y="24" font-family="monospace" font-size="16">{title}</text>"#,
            "\n"
        ),
        w = WIDTH,
        h = HEIGHT,
        tx = MARGIN,
        title = title
    )
}

fn axes(x_label: &str, y_label: &str) -> String {
    let x0 = MARGIN;
    let y0 = HEIGHT - MARGIN;
    let x1 = WIDTH - MARGIN;
    let y1 = MARGIN;
    format!(
        concat!(
            r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" stroke="black" fill="none"/>"#,
            "\n",
            r#"<text x="{xm}" y="{yb}" font-family="monospace" font-size="12" text-anchor="middle">{xl}</text>"#,
            "\n",
            r#"<text x="16" y="{ym}" font-family="monospace" font-size="12" transform="rotate(-90 16 {ym})" text-anchor="middle">{yl}</text>"#,
            "\n"
        ),
        x0 = fmt(x0),
        y0 = fmt(y0),
        x1 = fmt(x1),
        y1 = fmt(y1),
        xm = fmt((x0 + x1) / 2.0),
        yb = fmt(HEIGHT - 18.0),
        ym = fmt((y0 + y1) / 2.0),
        xl = x_label,
        yl = y_label
    )
}

/// Render the per-run global-best SSE histories as one polyline per run.
/// Returns `None` when no run carries a convergence history (the k-means
/// baseline), in which case no file should be written.
pub fn convergence_svg(report: &ExperimentReport) -> Option<String> {
    let histories: Vec<&Vec<f64>> = report
        .runs
        .iter()
        .map(|r| &r.result.convergence)
        .filter(|c| !c.is_empty())
        .collect();
    if histories.is_empty() {
        return None;
    }
    let max_len = histories.iter().map(|h| h.len()).max().unwrap_or(1);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for h in &histories {
        for &v in *h {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    if hi - lo < 1e-12 {
        hi = lo + 1.0;
    }
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let mut svg = svg_open(&format!(
        "gbest SSE vs iteration - {} on {}",
        report.algorithm, report.fixture_id
    ));
    svg.push_str(&axes("iteration", "gbest SSE"));
    for (ri, h) in histories.iter().enumerate() {
        let color = PALETTE[ri % PALETTE.len()];
        let mut d = String::new();
        for (i, &v) in h.iter().enumerate() {
            let x = MARGIN + plot_w * i as f64 / (max_len.max(2) - 1) as f64;
            let y = HEIGHT - MARGIN - plot_h * (v - lo) / (hi - lo);
            d.push_str(if i == 0 { "M" } else { " L" });
            d.push_str(&fmt(x));
            d.push(' ');
            d.push_str(&fmt(y));
        }
        svg.push_str(&format!(
            "<path d=\"{d}\" stroke=\"{color}\" stroke-width=\"1.2\" fill=\"none\" opacity=\"0.8\"/>\n"
        ));
    }
    // Scale annotations.
    svg.push_str(&format!(
        concat!(
            r#"<text x="{x}" y="{ytop}" font-family="monospace" font-size="11">{hi}</text>"#,
            "\n",
            r#"<text x="{x}" y="{ybot}" font-family="monospace" font-size="11">{lo}</text>"#,
            "\n"
        ),
        x = fmt(6.0),
        ytop = fmt(MARGIN),
        ybot = fmt(HEIGHT - MARGIN),
        hi = fmt(hi),
        lo = fmt(lo),
    ));
    svg.push_str("</svg>\n");
    Some(svg)
}

/// Render min/mean/max accuracy bars for the report's method. Returns `None`
/// when the runs carry no accuracies (unlabeled input).
pub fn accuracy_svg(report: &ExperimentReport) -> Option<String> {
    let (min, mean, max) = (
        report.aggregate.accuracy_min?,
        report.aggregate.accuracy_mean?,
        report.aggregate.accuracy_max?,
    );
    let bars = [("min", min), ("mean", mean), ("max", max)];
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let plot_w = WIDTH - 2.0 * MARGIN;
    let mut svg = svg_open(&format!(
        "accuracy (min/mean/max over {} runs) - {} on {}",
        report.runs.len(),
        report.algorithm,
        report.fixture_id
    ));
    svg.push_str(&axes("", "accuracy"));
    let slot = plot_w / bars.len() as f64;
    let bar_w = slot * 0.5;
    for (i, (name, value)) in bars.iter().enumerate() {
        let x = MARGIN + slot * i as f64 + (slot - bar_w) / 2.0;
        let h = plot_h * value.clamp(0.0, 1.0);
        let y = HEIGHT - MARGIN - h;
        let color = PALETTE[i % PALETTE.len()];
        svg.push_str(&format!(
            concat!(
                r#"<rect x="{x}" y="{y}" width="{w}" height="{h}" fill="{color}"/>"#,
                "\n",
                r#"<text x="{cx}" y="{ly}" font-family="monospace" font-size="12" text-anchor="middle">{name} {value}</text>"#,
                "\n"
            ),
            x = fmt(x),
            y = fmt(y),
            w = fmt(bar_w),
            h = fmt(h),
            color = color,
            cx = fmt(x + bar_w / 2.0),
            ly = fmt(HEIGHT - MARGIN + 18.0),
            name = name,
            value = fmt(*value),
        ));
    }
    svg.push_str("</svg>\n");
    Some(svg)
}

/// Write `convergence.svg` and `accuracy.svg` next to the report, honoring
/// the presence rules. Returns the paths written.
pub fn emit_plots(report: &ExperimentReport, dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if let Some(svg) = convergence_svg(report) {
        let path = dir.join("convergence.svg");
        std::fs::write(&path, svg)?;
        written.push(path);
    }
    if let Some(svg) = accuracy_svg(report) {
        let path = dir.join("accuracy.svg");
        std::fs::write(&path, svg)?;
        written.push(path);
    }
    Ok(written)
}

//! Static SVG figures. Output depends only on the inputs: no timestamps or
//! generator metadata.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::coreset::Coreset;
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::pipeline::SummaryRow;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn header(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    )
}

fn axes(out: &mut String, y_label: &str) {
    let (x0, y0, x1, y1) = (MARGIN, HEIGHT - MARGIN, WIDTH - MARGIN, MARGIN);
    let _ = writeln!(
        out,
        "<g class=\"axes\" stroke=\"black\"><line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x1}\" y2=\"{y0}\"/>\
         <line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{y1}\"/></g>"
    );
    let _ = writeln!(
        out,
        "<text x=\"14\" y=\"{}\" transform=\"rotate(-90 14 {})\" text-anchor=\"middle\" font-size=\"12\">{}</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
}

/// Maps accuracy in [0, 1] to a y pixel.
fn acc_y(a: f64) -> f64 {
    let a = if a.is_finite() {
        a.clamp(0.0, 1.0)
    } else {
        0.0
    };
    HEIGHT - MARGIN - a * (HEIGHT - 2.0 * MARGIN)
}

fn require_rows(rows: &[SummaryRow]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::invalid("no rows to plot"));
    }
    Ok(())
}

/// One bar per table row (mean accuracy) with a ±std whisker.
pub fn accuracy_bars(rows: &[SummaryRow]) -> Result<String> {
    require_rows(rows)?;
    let mut out = header("Mean accuracy");
    axes(&mut out, "accuracy");
    let slot = (WIDTH - 2.0 * MARGIN) / rows.len() as f64;
    let bar_w = slot * 0.6;
    for (i, r) in rows.iter().enumerate() {
        let cx = MARGIN + slot * (i as f64 + 0.5);
        let top = acc_y(r.mean_accuracy);
        let base = acc_y(0.0);
        let std = if r.std_accuracy.is_finite() {
            r.std_accuracy
        } else {
            0.0
        };
        let (hi, lo) = (acc_y(r.mean_accuracy + std), acc_y(r.mean_accuracy - std));
        let label = format!("{} o{} {} λ={}", r.method, r.order, r.solver, r.lambda);
        let _ = writeln!(
            out,
            "<g class=\"bar-group\"><rect class=\"bar\" x=\"{:.2}\" y=\"{top:.2}\" width=\"{bar_w:.2}\" height=\"{:.2}\" fill=\"{}\"/>\
             <line class=\"whisker\" x1=\"{cx:.2}\" y1=\"{hi:.2}\" x2=\"{cx:.2}\" y2=\"{lo:.2}\" stroke=\"black\"/>\
             <text x=\"{cx:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"9\">{}</text></g>",
            cx - bar_w / 2.0,
            base - top,
            PALETTE[i % PALETTE.len()],
            HEIGHT - MARGIN + 14.0,
            escape(&label)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Mean accuracy against λ, one line per (method, order, solver).
pub fn noise_curve(rows: &[SummaryRow]) -> Result<String> {
    require_rows(rows)?;
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        series
            .entry(format!("{} o{} {}", r.method, r.order, r.solver))
            .or_default()
            .push((r.lambda, r.mean_accuracy));
    }
    let max_l = rows.iter().map(|r| r.lambda).fold(0.0, f64::max).max(1e-12);
    let x_of = |l: f64| MARGIN + l / max_l * (WIDTH - 2.0 * MARGIN);

    let mut out = header("Accuracy under depolarizing noise");
    axes(&mut out, "accuracy");
    for (i, (name, mut pts)) in series.into_iter().enumerate() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let colour = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(l, a)| format!("{:.2},{:.2}", x_of(l), acc_y(a)))
            .collect();
        let _ = write!(
            out,
            "<g class=\"series\"><polyline fill=\"none\" stroke=\"{colour}\" points=\"{}\"/>",
            path.join(" ")
        );
        for &(l, a) in &pts {
            let _ = write!(
                out,
                "<circle class=\"marker\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{colour}\"/>",
                x_of(l),
                acc_y(a)
            );
        }
        let _ = writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" fill=\"{colour}\">{}</text></g>",
            WIDTH - MARGIN - 120.0,
            MARGIN + 14.0 * i as f64,
            escape(&name)
        );
    }
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">λ (max {max_l})</text>",
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    out.push_str("</svg>\n");
    Ok(out)
}

fn star_points(cx: f64, cy: f64, r: f64) -> String {
    (0..10)
        .map(|k| {
            let rad = if k % 2 == 0 { r } else { r * 0.45 };
            let t = std::f64::consts::PI * (k as f64 / 5.0 - 0.5);
            format!("{:.2},{:.2}", cx + rad * t.cos(), cy + rad * t.sin())
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// First two coordinates of the data (small dots, optional) and the
/// coreset (stars, one per point).
pub fn coreset_scatter(data: Option<&Dataset>, cs: &Coreset) -> Result<String> {
    if cs.is_empty() {
        return Err(Error::invalid("no rows to plot"));
    }
    let coord = |p: &[f64]| (p[0], p.get(1).copied().unwrap_or(0.0));
    let mut all: Vec<(f64, f64)> = cs.points.iter().map(|p| coord(&p.position)).collect();
    if let Some(d) = data {
        all.extend(d.rows().map(coord));
    }
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in &all {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let sx = (xmax - xmin).max(1e-12);
    let sy = (ymax - ymin).max(1e-12);
    let px = |x: f64| MARGIN + (x - xmin) / sx * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - ymin) / sy * (HEIGHT - 2.0 * MARGIN);

    let mut out = header(&format!("{} coreset, m = {}", cs.method, cs.len()));
    if let Some(d) = data {
        out.push_str("<g class=\"data\">\n");
        for (i, row) in d.rows().enumerate() {
            let (x, y) = coord(row);
            let colour = d
                .labels()
                .map(|l| PALETTE[l[i] as usize % PALETTE.len()])
                .unwrap_or("#888888");
            let _ = writeln!(
                out,
                "<circle class=\"point\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"{colour}\" fill-opacity=\"0.5\"/>",
                px(x),
                py(y)
            );
        }
        out.push_str("</g>\n");
    }
    out.push_str("<g class=\"coreset\">\n");
    for p in &cs.points {
        let (x, y) = coord(&p.position);
        let _ = writeln!(
            out,
            "<polygon class=\"star\" points=\"{}\" fill=\"gold\" stroke=\"black\"/>",
            star_points(px(x), py(y), 9.0)
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

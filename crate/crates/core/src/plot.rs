//! Static SVG profile charts (a quantity against the radius or another
//! abscissa).  No interactivity, no external renderer.

use crate::error::{Error, Result};

pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const W: f64 = 800.0;
const H: f64 = 500.0;
const ML: f64 = 70.0;
const MR: f64 = 20.0;
const MT: f64 = 40.0;
const MB: f64 = 55.0;

/// Render a line chart; log axes reject non-positive data.
pub fn svg_profile(
    title: &str,
    x_label: &str,
    series: &[Series],
    log_x: bool,
    log_y: bool,
) -> Result<String> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::invalid("nothing to plot"));
    }
    let map = |v: f64, log: bool| -> Result<f64> {
        if log {
            if v <= 0.0 {
                return Err(Error::invalid(format!("log axis with non-positive value {v}")));
            }
            Ok(v.log10())
        } else {
            Ok(v)
        }
    };
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in series {
        for &(x, y) in &s.points {
            xs.push(map(x, log_x)?);
            ys.push(map(y, log_y)?);
        }
    }
    let (x0, x1) = padded_range(&xs);
    let (y0, y1) = padded_range(&ys);
    let px = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let py = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        xml_escape(title)
    ));
    // axes box
    svg.push_str(&format!(
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
        W - ML - MR,
        H - MT - MB
    ));
    // ticks
    for t in ticks(x0, x1) {
        let x = px(t);
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{}\" x2=\"{x:.2}\" y2=\"{}\" stroke=\"#ccc\"/>\n",
            MT,
            H - MB
        ));
        let label = if log_x { format!("1e{t:.0}") } else { tick_label(t) };
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{label}</text>\n",
            H - MB + 16.0
        ));
    }
    for t in ticks(y0, y1) {
        let y = py(t);
        svg.push_str(&format!(
            "<line x1=\"{ML}\" y1=\"{y:.2}\" x2=\"{}\" y2=\"{y:.2}\" stroke=\"#ccc\"/>\n",
            W - MR
        ));
        let label = if log_y { format!("1e{t:.0}") } else { tick_label(t) };
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{label}</text>\n",
            ML - 6.0,
            y + 4.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        ML + (W - ML - MR) / 2.0,
        H - 12.0,
        xml_escape(x_label)
    ));
    // series
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut d = String::new();
        for (i, &(x, y)) in s.points.iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            d.push_str(&format!(
                "{cmd}{:.2} {:.2} ",
                px(map(x, log_x)?),
                py(map(y, log_y)?)
            ));
        }
        svg.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n",
            d.trim_end()
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            W - MR - 160.0,
            MT + 18.0 + 16.0 * k as f64,
            xml_escape(s.name)
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn padded_range(vals: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = 0.04 * (hi - lo);
    (lo - pad, hi + pad)
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| span / s <= 6.0)
        .unwrap_or(mag * 10.0);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-12 * span {
        out.push(t);
        t += step;
    }
    out
}

fn tick_label(t: f64) -> String {
    if t == 0.0 {
        "0".to_string()
    } else if t.abs() >= 1e4 || t.abs() < 1e-3 {
        format!("{t:.1e}")
    } else {
        let s = format!("{t:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

//! Minimal deterministic SVG charts: grouped bars, lines and a heatmap grid.

use std::fmt::Write;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 90.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

fn open(out: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        width / 2.0,
        escape(title)
    );
}

fn legend(out: &mut String, names: &[String]) {
    for (i, name) in names.iter().enumerate() {
        let y = TOP + 18.0 * i as f64;
        let x = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.1}" y="{:.1}" width="12" height="12" fill="{}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            y,
            PALETTE[i % PALETTE.len()],
            x + 18.0,
            y + 10.0,
            escape(name)
        );
    }
}

/// Y ticks at five evenly spaced values between `lo` and `hi`.
fn y_axis(out: &mut String, lo: f64, hi: f64, y_of: impl Fn(f64) -> f64) {
    let _ = writeln!(
        out,
        r#"<line x1="{LEFT:.1}" y1="{TOP:.1}" x2="{LEFT:.1}" y2="{:.1}" stroke="black"/>"#,
        HEIGHT - BOTTOM
    );
    for i in 0..=4 {
        let v = lo + (hi - lo) * i as f64 / 4.0;
        let y = y_of(v);
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#dddddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
            LEFT,
            WIDTH - RIGHT,
            LEFT - 6.0,
            y + 4.0,
            trim_number(v)
        );
    }
}

fn trim_number(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn x_label(out: &mut String, x: f64, text: &str) {
    let y = HEIGHT - BOTTOM + 16.0;
    let _ = writeln!(
        out,
        r#"<text x="{x:.1}" y="{y:.1}" text-anchor="end" transform="rotate(-35 {x:.1} {y:.1})">{}</text>"#,
        escape(text)
    );
}

/// Grouped bar chart: one group per category, one bar per series.
pub fn bar_chart(title: &str, categories: &[String], series: &[(String, Vec<f64>)]) -> String {
    let mut out = String::new();
    open(&mut out, WIDTH, HEIGHT, title);
    let max = series
        .iter()
        .flat_map(|(_, v)| v.iter().copied())
        .fold(0.0f64, f64::max)
        .max(1.0);
    let plot_h = HEIGHT - TOP - BOTTOM;
    let y_of = |v: f64| HEIGHT - BOTTOM - plot_h * v / max;
    y_axis(&mut out, 0.0, max, y_of);
    let group_w = (WIDTH - LEFT - RIGHT) / categories.len().max(1) as f64;
    let bar_w = group_w * 0.8 / series.len().max(1) as f64;
    for (ci, cat) in categories.iter().enumerate() {
        let gx = LEFT + group_w * ci as f64 + group_w * 0.1;
        for (si, (_, values)) in series.iter().enumerate() {
            let v = values.get(ci).copied().unwrap_or(0.0);
            let y = y_of(v);
            let _ = writeln!(
                out,
                r#"<rect x="{:.1}" y="{y:.1}" width="{bar_w:.1}" height="{:.1}" fill="{}"/>"#,
                gx + bar_w * si as f64,
                HEIGHT - BOTTOM - y,
                PALETTE[si % PALETTE.len()]
            );
        }
        x_label(&mut out, gx + group_w * 0.4, cat);
    }
    legend(&mut out, &series.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>());
    out.push_str("</svg>\n");
    out
}

/// Line chart over shared x positions; missing points break the line.
pub fn line_chart(title: &str, x: &[String], series: &[(String, Vec<Option<f64>>)]) -> String {
    let mut out = String::new();
    open(&mut out, WIDTH, HEIGHT, title);
    let values: Vec<f64> = series.iter().flat_map(|(_, v)| v.iter().flatten().copied()).collect();
    let mut lo = values.iter().copied().fold(0.0f64, f64::min);
    let mut hi = values.iter().copied().fold(0.0f64, f64::max);
    if hi - lo < 1e-9 {
        lo -= 1.0;
        hi += 1.0;
    }
    let plot_h = HEIGHT - TOP - BOTTOM;
    let y_of = |v: f64| HEIGHT - BOTTOM - plot_h * (v - lo) / (hi - lo);
    y_axis(&mut out, lo, hi, y_of);
    let step = (WIDTH - LEFT - RIGHT) / x.len().max(1) as f64;
    let x_of = |i: usize| LEFT + step * (i as f64 + 0.5);
    for (i, label) in x.iter().enumerate() {
        x_label(&mut out, x_of(i), label);
    }
    for (si, (_, vals)) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let mut segment: Vec<String> = Vec::new();
        let flush = |out: &mut String, segment: &mut Vec<String>| {
            if segment.len() > 1 {
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                    segment.join(" ")
                );
            }
            segment.clear();
        };
        for (i, v) in vals.iter().enumerate() {
            match v {
                Some(v) => {
                    let (px, py) = (x_of(i), y_of(*v));
                    segment.push(format!("{px:.1},{py:.1}"));
                    let _ = writeln!(out, r#"<circle cx="{px:.1}" cy="{py:.1}" r="3" fill="{color}"/>"#);
                }
                None => flush(&mut out, &mut segment),
            }
        }
        flush(&mut out, &mut segment);
    }
    legend(&mut out, &series.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>());
    out.push_str("</svg>\n");
    out
}

/// Square grid of counts, shaded by value, with the count printed in each cell.
pub fn heatmap(title: &str, labels: &[&str], matrix: &[Vec<u64>]) -> String {
    let cell = 56.0;
    let margin = 110.0;
    let size = margin + cell * labels.len() as f64 + 20.0;
    let mut out = String::new();
    open(&mut out, size, size, title);
    let max = matrix.iter().flatten().copied().max().unwrap_or(0).max(1) as f64;
    for (i, row) in matrix.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let x = margin + cell * j as f64;
            let y = margin + cell * i as f64;
            let shade = 255.0 - 200.0 * v as f64 / max;
            let _ = writeln!(
                out,
                r##"<rect x="{x:.1}" y="{y:.1}" width="{cell:.1}" height="{cell:.1}" fill="rgb(255,{shade:.0},{shade:.0})" stroke="#999999"/><text x="{:.1}" y="{:.1}" text-anchor="middle">{v}</text>"##,
                x + cell / 2.0,
                y + cell / 2.0 + 4.0
            );
        }
    }
    for (i, label) in labels.iter().enumerate() {
        let c = margin + cell * i as f64 + cell / 2.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            margin - 6.0,
            c + 4.0,
            escape(label)
        );
        let _ = writeln!(
            out,
            r#"<text x="{c:.1}" y="{:.1}" text-anchor="start" transform="rotate(-45 {c:.1} {:.1})">{}</text>"#,
            margin - 6.0,
            margin - 6.0,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}

//! Minimal SVG renderer: data with error bars, the fitted curve and, for
//! oscillating models, its decay envelope.

use std::fmt::Write;

use rydcoh_core::analysis::{kuhr_envelope, FitResult};
use rydcoh_core::noise::EnsembleResult;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }
    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(hi > lo) {
        let d = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        return (lo - d, hi + d);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// Round tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if (1e-2..1e4).contains(&v.abs()) {
        format!("{}", (v * 1e4).round() / 1e4)
    } else {
        format!("{v:.2e}")
    }
}

fn envelope(f: &FitResult, x: f64) -> Option<(f64, f64)> {
    let p = |n: &str| f.param(n).unwrap_or(0.0);
    let (mid, half) = match f.model.as_str() {
        "damped-cosine" => (p("offset"), p("A").abs() * (-x / p("tau")).exp()),
        "kuhr" => (p("B"), p("A").abs() * kuhr_envelope(x, p("t2_star"))),
        _ => return None,
    };
    Some((mid - half, mid + half))
}

fn polyline(out: &mut String, points: &[(f64, f64)], style: &str) {
    let coords: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(out, r#"<polyline fill="none" {style} points="{}"/>"#, coords.join(" "));
}

pub fn render(data: &EnsembleResult, fit: Option<&FitResult>, x_label: &str, title: &str) -> String {
    let finite = |v: &&f64| v.is_finite();
    let xs = &data.scan_values;
    let xlo = xs.iter().filter(finite).copied().fold(f64::INFINITY, f64::min);
    let xhi = xs.iter().filter(finite).copied().fold(f64::NEG_INFINITY, f64::max);
    let lows = data.mean_observable.iter().zip(&data.standard_error).map(|(m, e)| m - e);
    let highs = data.mean_observable.iter().zip(&data.standard_error).map(|(m, e)| m + e);
    let ylo = lows.filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min);
    let yhi = highs.filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    let frame = Frame { x: padded(xlo, xhi), y: padded(ylo, yhi) };

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{title}</text>"#, WIDTH / 2.0);
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(s, r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y1 - y0);
    for t in ticks(frame.x.0, frame.x.1) {
        let px = frame.px(t);
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{y1}" x2="{px:.2}" y2="{}" stroke="black"/>"#, y1 + 5.0);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#, y1 + 18.0, label(t));
    }
    for t in ticks(frame.y.0, frame.y.1) {
        let py = frame.py(t);
        let _ = writeln!(s, r#"<line x1="{}" y1="{py:.2}" x2="{x0}" y2="{py:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, py + 4.0, label(t));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{x_label}</text>"#, (x0 + x1) / 2.0, HEIGHT - 15.0);

    if let Some(f) = fit {
        let n = 400;
        let grid: Vec<f64> = (0..=n).map(|k| frame.x.0 + (frame.x.1 - frame.x.0) * k as f64 / n as f64).collect();
        let clamp = |y: f64| y.clamp(frame.y.0, frame.y.1);
        if envelope(f, grid[0]).is_some() {
            for side in 0..2 {
                let pts: Vec<(f64, f64)> = grid
                    .iter()
                    .filter_map(|&x| envelope(f, x).map(|(lo, hi)| (frame.px(x), frame.py(clamp(if side == 0 { lo } else { hi })))))
                    .collect();
                polyline(&mut s, &pts, r##"stroke="#999999" stroke-dasharray="4 3""##);
            }
        }
        let pts: Vec<(f64, f64)> =
            grid.iter().map(|&x| (x, f.predict(x))).filter(|(_, y)| y.is_finite()).map(|(x, y)| (frame.px(x), frame.py(clamp(y)))).collect();
        polyline(&mut s, &pts, r##"stroke="#d62728" stroke-width="1.5""##);
    }

    for k in 0..data.len() {
        let (x, m, e) = (data.scan_values[k], data.mean_observable[k], data.standard_error[k]);
        if !(x.is_finite() && m.is_finite()) {
            continue;
        }
        let (px, py) = (frame.px(x), frame.py(m));
        if e > 0.0 {
            let _ = writeln!(s, r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#1f77b4"/>"##, frame.py(m - e), frame.py(m + e));
        }
        let _ = writeln!(s, r##"<circle cx="{px:.2}" cy="{py:.2}" r="3" fill="#1f77b4"/>"##);
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks_are_round_and_inside() {
        let t = ticks(0.0, 15e-6);
        assert!(t.len() >= 4 && t.iter().all(|v| (0.0..=15e-6).contains(v)));
        assert!((t[1] - t[0] - 5e-6).abs() < 1e-18 || (t[1] - t[0] - 2e-6).abs() < 1e-18);
    }

    #[test]
    fn renders_points_and_curve() {
        let data = EnsembleResult {
            scan_values: vec![0.0, 1.0, 2.0],
            mean_observable: vec![1.0, 0.5, 0.25],
            standard_error: vec![0.0, 0.1, 0.1],
            n_shots: 10,
            seed: 0,
        };
        let svg = render(&data, None, "gap", "t1");
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }
}

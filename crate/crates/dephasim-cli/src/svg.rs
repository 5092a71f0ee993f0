//! Minimal deterministic SVG line plots: axes, ticks, shaded bands,
//! polyline series, and a legend. No external plotting dependency; byte
//! output depends only on the input data.

use std::fmt::Write;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'static str,
    pub dashed: bool,
    pub points: &'a [(f64, f64)],
}

pub struct Band<'a> {
    pub label: &'a str,
    pub fill: &'static str,
    pub lo: &'a [(f64, f64)],
    pub hi: &'a [(f64, f64)],
}

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

/// Largest "nice" tick step (1, 2 or 5 times a power of ten) giving at most
/// `max_ticks` intervals over `span`.
fn nice_step(span: f64, max_ticks: usize) -> f64 {
    let raw = span / max_ticks as f64;
    let mag = 10f64.powf(raw.log10().floor());
    for &m in &[1.0, 2.0, 5.0, 10.0] {
        if mag * m >= raw {
            return mag * m;
        }
    }
    mag * 10.0
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    let a = v.abs();
    if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.2e}")
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        MARGIN_L + (v - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN_B - (v - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_T - MARGIN_B)
    }

    fn polyline(&self, pts: &[(f64, f64)]) -> String {
        let mut s = String::with_capacity(pts.len() * 14);
        for &(x, y) in pts {
            let _ = write!(s, "{:.2},{:.2} ", self.x(x), self.y(y));
        }
        s.pop();
        s
    }
}

pub fn render(
    title: &str,
    x_label: &str,
    y_label: &str,
    bands: &[Band],
    series: &[Series],
) -> String {
    let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
    let mut ys = (f64::INFINITY, f64::NEG_INFINITY);
    let mut feed = |pts: &[(f64, f64)]| {
        for &(x, y) in pts {
            xs = (xs.0.min(x), xs.1.max(x));
            ys = (ys.0.min(y), ys.1.max(y));
        }
    };
    for s in series {
        feed(s.points);
    }
    for b in bands {
        feed(b.lo);
        feed(b.hi);
    }
    if !(xs.0.is_finite() && ys.0.is_finite()) {
        xs = (0.0, 1.0);
        ys = (0.0, 1.0);
    }
    if xs.0 == xs.1 {
        xs.1 = xs.0 + 1.0;
    }
    if ys.0 == ys.1 {
        ys.1 = ys.0 + 1.0;
    }
    let pad = 0.05 * (ys.1 - ys.0);
    let frame = Frame {
        x0: xs.0,
        x1: xs.1,
        y0: ys.0 - pad,
        y1: ys.1 + pad,
    };

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    svg.push('\n');
    svg.push_str(r#"<rect width="100%" height="100%" fill="white"/>"#);
    svg.push('\n');

    // plot frame
    let _ = write!(
        svg,
        r##"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{:.2}" height="{:.2}" fill="none" stroke="#444" stroke-width="1"/>"##,
        WIDTH - MARGIN_L - MARGIN_R,
        HEIGHT - MARGIN_T - MARGIN_B
    );
    svg.push('\n');

    // ticks and grid lines
    let xstep = nice_step(frame.x1 - frame.x0, 8);
    let mut t = (frame.x0 / xstep).ceil() * xstep;
    while t <= frame.x1 + 1e-12 * xstep {
        let px = frame.x(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{px:.2}" y1="{}" x2="{px:.2}" y2="{}" stroke="#ddd" stroke-width="0.5"/><text x="{px:.2}" y="{}" font-family="monospace" font-size="12" text-anchor="middle">{}</text>"##,
            MARGIN_T,
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 18.0,
            fmt_tick(t)
        );
        t += xstep;
    }
    let ystep = nice_step(frame.y1 - frame.y0, 6);
    let mut t = (frame.y0 / ystep).ceil() * ystep;
    while t <= frame.y1 + 1e-12 * ystep {
        let py = frame.y(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{py:.2}" x2="{}" y2="{py:.2}" stroke="#ddd" stroke-width="0.5"/><text x="{}" y="{:.2}" font-family="monospace" font-size="12" text-anchor="end">{}</text>"##,
            MARGIN_L,
            WIDTH - MARGIN_R,
            MARGIN_L - 6.0,
            py + 4.0,
            fmt_tick(t)
        );
        t += ystep;
    }

    // shaded bands, drawn back to front
    for b in bands {
        if b.lo.is_empty() {
            continue;
        }
        let mut pts = frame.polyline(b.lo);
        let rev: Vec<(f64, f64)> = b.hi.iter().rev().copied().collect();
        pts.push(' ');
        pts.push_str(&frame.polyline(&rev));
        let _ = writeln!(svg, r#"<polygon points="{pts}" fill="{}"/>"#, b.fill);
    }

    for s in series {
        if s.points.is_empty() {
            continue;
        }
        let dash = if s.dashed {
            r#" stroke-dasharray="7,4""#
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.6"{dash}/>"#,
            frame.polyline(s.points),
            s.color
        );
    }

    // labels
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" font-family="monospace" font-size="15" text-anchor="middle">{}</text>"#,
        0.5 * WIDTH,
        title
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{}" font-family="monospace" font-size="13" text-anchor="middle">{}</text>"#,
        0.5 * WIDTH,
        HEIGHT - 12.0,
        x_label
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" font-family="monospace" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        0.5 * HEIGHT,
        0.5 * HEIGHT,
        y_label
    );

    // legend, top right inside the frame
    let mut row = 0;
    for s in series {
        let y = MARGIN_T + 18.0 + 18.0 * row as f64;
        let x = WIDTH - MARGIN_R - 190.0;
        let dash = if s.dashed {
            r#" stroke-dasharray="7,4""#
        } else {
            ""
        };
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{}" stroke-width="1.6"{dash}/><text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12">{}</text>"#,
            x + 26.0,
            s.color,
            x + 32.0,
            y + 4.0,
            s.label
        );
        row += 1;
    }
    for b in bands {
        if b.label.is_empty() {
            continue;
        }
        let y = MARGIN_T + 18.0 + 18.0 * row as f64;
        let x = WIDTH - MARGIN_R - 190.0;
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.2}" y="{:.2}" width="26" height="10" fill="{}"/><text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12">{}</text>"#,
            y - 5.0,
            b.fill,
            x + 32.0,
            y + 4.0,
            b.label
        );
        row += 1;
    }

    svg.push_str("</svg>\n");
    svg
}

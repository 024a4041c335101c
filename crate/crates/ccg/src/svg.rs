//! Minimal SVG plots: line charts and planar scenes with polygons.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 480.0;
const M: f64 = 48.0;

pub const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
    pub color: &'a str,
}

#[derive(Clone, Copy)]
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    equal: bool,
}

impl Frame {
    fn fit<'a>(pts: impl Iterator<Item = &'a (f64, f64)>, equal: bool) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts.filter(|p| p.0.is_finite() && p.1.is_finite()) {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |lo: f64, hi: f64| {
            let d = ((hi - lo) * 0.05).max(1e-9);
            (lo - d, hi + d)
        };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Frame { x0, x1, y0, y1, equal }
    }

    fn scales(&self) -> (f64, f64) {
        let sx = (W - 2.0 * M) / (self.x1 - self.x0);
        let sy = (H - 2.0 * M) / (self.y1 - self.y0);
        if self.equal {
            let s = sx.min(sy);
            (s, s)
        } else {
            (sx, sy)
        }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let (sx, sy) = self.scales();
        (M + (x - self.x0) * sx, H - M - (y - self.y0) * sy)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, W / 2.0, escape(title));
}

fn axes(out: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (ax0, ay0) = f.map(f.x0, f.y0);
    let (ax1, ay1) = f.map(f.x1, f.y1);
    let _ = writeln!(
        out,
        r##"<rect x="{ax0:.1}" y="{ay1:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#444"/>"##,
        ax1 - ax0,
        ay0 - ay1
    );
    for (v, anchor_x, anchor_y) in [(f.x0, ax0, ay0 + 16.0), (f.x1, ax1, ay0 + 16.0)] {
        let _ = writeln!(out, r#"<text x="{anchor_x:.1}" y="{anchor_y:.1}" text-anchor="middle">{v:.3}</text>"#);
    }
    for (v, yy) in [(f.y0, ay0), (f.y1, ay1)] {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.3}</text>"#, ax0 - 4.0, yy + 4.0);
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (ax0 + ax1) / 2.0,
        H - 8.0,
        escape(xlabel)
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
        (ay0 + ay1) / 2.0,
        (ay0 + ay1) / 2.0,
        escape(ylabel)
    );
}

fn legend(out: &mut String, entries: &[(&str, &str)]) {
    for (i, (label, color)) in entries.iter().enumerate() {
        let y = M + 14.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            W - M - 110.0,
            W - M - 90.0,
            W - M - 85.0,
            y + 4.0,
            escape(label)
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn path(f: &Frame, pts: &[(f64, f64)], closed: bool) -> String {
    let mut d = String::new();
    let mut pen_down = false;
    for &(x, y) in pts {
        if !(x.is_finite() && y.is_finite()) {
            pen_down = false;
            continue;
        }
        let (px, py) = f.map(x, y);
        let _ = write!(d, "{}{px:.2},{py:.2} ", if pen_down { "L" } else { "M" });
        pen_down = true;
    }
    if closed && !d.is_empty() {
        d.push('Z');
    }
    d
}

pub fn line_chart(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let f = Frame::fit(series.iter().flat_map(|s| s.points.iter()), false);
    let mut out = String::new();
    header(&mut out, title);
    axes(&mut out, &f, xlabel, ylabel);
    for s in series {
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            path(&f, &s.points, false),
            s.color
        );
    }
    let entries: Vec<(&str, &str)> = series.iter().map(|s| (s.label, s.color)).collect();
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

pub struct Scene<'a> {
    pub title: &'a str,
    pub polygons: Vec<(Vec<[f64; 2]>, &'a str)>,
    pub paths: Vec<Series<'a>>,
    /// Circles `(center, radius, color)`.
    pub circles: Vec<([f64; 2], f64, &'a str)>,
    pub markers: Vec<([f64; 2], &'a str)>,
}

pub fn scene(s: &Scene) -> String {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (poly, _) in &s.polygons {
        pts.extend(poly.iter().map(|p| (p[0], p[1])));
    }
    for p in &s.paths {
        pts.extend(p.points.iter().copied());
    }
    for (c, r, _) in &s.circles {
        pts.push((c[0] - r, c[1] - r));
        pts.push((c[0] + r, c[1] + r));
    }
    pts.extend(s.markers.iter().map(|(p, _)| (p[0], p[1])));
    let f = Frame::fit(pts.iter(), true);
    let (scale, _) = f.scales();

    let mut out = String::new();
    header(&mut out, s.title);
    axes(&mut out, &f, "x", "y");
    for (c, r, color) in &s.circles {
        let (cx, cy) = f.map(c[0], c[1]);
        let _ = writeln!(
            out,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{:.2}" fill="none" stroke="{color}" stroke-dasharray="4 3"/>"#,
            r * scale
        );
    }
    for (poly, color) in &s.polygons {
        let pts: Vec<(f64, f64)> = poly.iter().map(|p| (p[0], p[1])).collect();
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="{color}" fill-opacity="0.15" stroke="{color}"/>"#,
            path(&f, &pts, true)
        );
    }
    for p in &s.paths {
        let _ = writeln!(
            out,
            r#"<path d="{}" fill="none" stroke="{}" stroke-width="1.2"/>"#,
            path(&f, &p.points, false),
            p.color
        );
    }
    for (p, color) in &s.markers {
        let (x, y) = f.map(p[0], p[1]);
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{color}"/>"#);
    }
    let entries: Vec<(&str, &str)> = s.paths.iter().map(|p| (p.label, p.color)).collect();
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

//! Hand-written SVG scatter plots.

use std::fmt::Write;

use anchorlab::Point2;

pub const SIZE: f64 = 600.0;
const MARGIN: f64 = 60.0;
const TICKS: usize = 5;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub square: bool,
    pub points: &'a [Point2],
}

/// Padded bounds covering every point in every series.
fn bounds(series: &[Series]) -> (f64, f64, f64, f64) {
    let pts = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    if !x0.is_finite() {
        return (0.0, 0.0, 1.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| {
        let d = ((hi - lo) * 0.05).max(1e-6);
        (lo - d, hi + d)
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    (x0, y0, x1, y1)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders a 600×600 scatter. Data y grows downward, as in image coordinates.
pub fn scatter(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (x0, y0, x1, y1) = bounds(series);
    let span = SIZE - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * span;
    let sy = |y: f64| MARGIN + (y - y0) / (y1 - y0) * span;

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="600" height="600" viewBox="0 0 600 600">"#);
    let _ = writeln!(out, r#"<rect width="600" height="600" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="300" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        esc(title)
    );
    let _ =
        writeln!(out, r#"<rect x="{MARGIN}" y="{MARGIN}" width="{span}" height="{span}" fill="none" stroke="black"/>"#);
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let (vx, vy) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(vx), sy(vy));
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{vx:.1}</text>"#,
            SIZE - MARGIN,
            SIZE - MARGIN + 5.0,
            SIZE - MARGIN + 18.0
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{MARGIN}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="11">{vy:.1}</text>"#,
            MARGIN - 5.0,
            MARGIN - 8.0,
            py + 4.0
        );
    }
    if x0 < 0.0 && x1 > 0.0 {
        let _ = writeln!(
            out,
            r##"<line x1="{0:.2}" y1="{MARGIN}" x2="{0:.2}" y2="{1}" stroke="#999" stroke-dasharray="4 3"/>"##,
            sx(0.0),
            SIZE - MARGIN
        );
    }
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(
            out,
            r##"<line x1="{MARGIN}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
            sy(0.0),
            SIZE - MARGIN
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="300" y="590" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        esc(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="300" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 300)">{}</text>"#,
        esc(y_label)
    );
    for s in series {
        let _ = writeln!(out, r#"<g fill="{}" fill-opacity="0.6">"#, s.color);
        for p in s.points {
            let (px, py) = (sx(p.x), sy(p.y));
            if s.square {
                let _ = writeln!(out, r#"<rect x="{:.2}" y="{:.2}" width="5" height="5"/>"#, px - 2.5, py - 2.5);
            } else {
                let _ = writeln!(out, r#"<circle cx="{px:.2}" cy="{py:.2}" r="2.5"/>"#);
            }
        }
        let _ = writeln!(out, "</g>");
    }
    // Legend, top right inside the plot area.
    let lx = SIZE - MARGIN - 140.0;
    let _ = writeln!(
        out,
        r#"<rect x="{lx}" y="{}" width="130" height="{}" fill="white" stroke="black"/>"#,
        MARGIN + 10.0,
        10.0 + 20.0 * series.len() as f64
    );
    for (i, s) in series.iter().enumerate() {
        let y = MARGIN + 25.0 + 20.0 * i as f64;
        if s.square {
            let _ =
                writeln!(out, r#"<rect x="{}" y="{}" width="8" height="8" fill="{}"/>"#, lx + 8.0, y - 4.0, s.color);
        } else {
            let _ = writeln!(out, r#"<circle cx="{}" cy="{y}" r="4" fill="{}"/>"#, lx + 12.0, s.color);
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{} (n={})</text>"#,
            lx + 24.0,
            y + 4.0,
            esc(s.label),
            s.points.len()
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scatter_has_markers_and_legend() {
        let g = [Point2::new(0.0, 1.0), Point2::new(-3.0, 2.0)];
        let d = [Point2::new(1.0, -1.0)];
        let svg = scatter(
            "t <1>",
            "x",
            "y",
            &[
                Series { label: "grasp", color: "#c0392b", square: false, points: &g },
                Series { label: "dissection", color: "#2471a3", square: true, points: &d },
            ],
        );
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert_eq!(svg.matches("width=\"5\"").count(), 1);
        assert!(svg.contains("grasp (n=2)") && svg.contains("t &lt;1&gt;"));
    }

    #[test]
    fn empty_series_still_renders() {
        let svg = scatter("empty", "x", "y", &[Series { label: "none", color: "red", square: false, points: &[] }]);
        assert!(svg.contains("none (n=0)"));
    }
}

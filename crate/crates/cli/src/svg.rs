//! Minimal SVG scatter plot of a 2-D real projection of a cloud.

use std::fmt::Write;

use num_complex::Complex64;

use crate::error::{CliError, CliResult};

const SIZE: f64 = 640.0;
const MARGIN: f64 = 48.0;

/// One real coordinate of a point in C^n: `re<k>` or `im<k>`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Axis {
    pub index: usize,
    pub imaginary: bool,
}

impl Axis {
    pub fn parse(s: &str) -> CliResult<Self> {
        let s = s.trim();
        let (imaginary, rest) = if let Some(r) = s.strip_prefix("re") {
            (false, r)
        } else if let Some(r) = s.strip_prefix("im") {
            (true, r)
        } else {
            return Err(CliError::Usage(format!("axis {s:?} must look like re1 or im2")));
        };
        let k: usize = rest
            .parse()
            .map_err(|_| CliError::Usage(format!("axis {s:?} must end in a coordinate number")))?;
        if k == 0 {
            return Err(CliError::Usage("axis coordinates are numbered from 1".into()));
        }
        Ok(Self { index: k - 1, imaginary })
    }

    pub fn pick(&self, v: &[Complex64]) -> f64 {
        let z = v[self.index];
        if self.imaginary {
            z.im
        } else {
            z.re
        }
    }

    pub fn label(&self) -> String {
        format!("{}{}", if self.imaginary { "im" } else { "re" }, self.index + 1)
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(1e-9 * (1.0 + lo.abs().max(hi.abs())));
    (lo - pad, hi + pad)
}

/// Renders `points` as grey dots and `marked` as red crosses.
pub fn scatter(points: &[(f64, f64)], marked: &[(f64, f64)], x_label: &str, y_label: &str) -> String {
    let all = || points.iter().chain(marked);
    let (x0, x1) = bounds(all().map(|p| p.0));
    let (y0, y1) = bounds(all().map(|p| p.1));
    let span = SIZE - 2.0 * MARGIN;
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * span;
    let sy = |y: f64| SIZE - MARGIN - (y - y0) / (y1 - y0) * span;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{span}" height="{span}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(out, r##"<g fill="#777" fill-opacity="0.5">"##);
    for &(x, y) in points {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="1.2"/>"#, sx(x), sy(y));
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, r#"<g stroke="red" stroke-width="2">"#);
    for &(x, y) in marked {
        let (cx, cy) = (sx(x), sy(y));
        let _ = writeln!(
            out,
            r#"<path d="M{:.2} {:.2}L{:.2} {:.2}M{:.2} {:.2}L{:.2} {:.2}"/>"#,
            cx - 6.0,
            cy - 6.0,
            cx + 6.0,
            cy + 6.0,
            cx - 6.0,
            cy + 6.0,
            cx + 6.0,
            cy - 6.0
        );
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="14" text-anchor="middle">{x_label} [{x0:.4}, {x1:.4}]</text>"#,
        SIZE / 2.0,
        SIZE - 14.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 16 {:.1})">{y_label} [{y0:.4}, {y1:.4}]</text>"#,
        SIZE / 2.0,
        SIZE / 2.0
    );
    out.push_str("</svg>\n");
    out
}

//! SVG charts drawn from CSV output files only.

use std::fmt::Write as _;
use std::path::Path;

use crate::cli::csv;
use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

impl Scale {
    fn map(self, v: f64) -> Option<f64> {
        match self {
            Scale::Linear if v.is_finite() => Some(v),
            Scale::Log if v.is_finite() && v > 0.0 => Some(v.log10()),
            _ => None,
        }
    }

    fn label(self, name: &str) -> String {
        match self {
            Scale::Linear => name.to_string(),
            Scale::Log => format!("log10 {name}"),
        }
    }
}

/// Line chart of `y` columns against `x`; one curve per value of `group`.
#[derive(Debug, Clone)]
pub struct LineChart<'a> {
    pub x: &'a str,
    pub ys: Vec<&'a str>,
    pub group: Option<&'a str>,
    pub x_scale: Scale,
    pub y_scale: Scale,
    /// Plot `|y|` instead of `y`.
    pub absolute: bool,
    pub title: String,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn from_points<'p>(pts: impl Iterator<Item = &'p (f64, f64)>) -> Result<Self> {
        let mut f = Frame {
            x0: f64::INFINITY,
            x1: f64::NEG_INFINITY,
            y0: f64::INFINITY,
            y1: f64::NEG_INFINITY,
        };
        for &(x, y) in pts {
            f.x0 = f.x0.min(x);
            f.x1 = f.x1.max(x);
            f.y0 = f.y0.min(y);
            f.y1 = f.y1.max(y);
        }
        if !f.x0.is_finite() {
            return Err(Error::Domain("nothing to plot".into()));
        }
        if f.x1 - f.x0 < 1e-300 {
            f.x0 -= 0.5;
            f.x1 += 0.5;
        }
        if f.y1 - f.y0 < 1e-300 {
            f.y0 -= 0.5;
            f.y1 += 0.5;
        }
        Ok(f)
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn header(svg: &mut String, title: &str) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(svg: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        svg,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    );
    for k in 0..=4 {
        let fx = f.x0 + (f.x1 - f.x0) * k as f64 / 4.0;
        let fy = f.y0 + (f.y1 - f.y0) * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            f.px(fx),
            b + 16.0,
            tick(fx)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
            l - 4.0,
            f.py(fy) + 4.0,
            tick(fy)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(xlabel)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(ylabel)
    );
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn line_chart(table: &csv::ParsedCsv, spec: &LineChart<'_>) -> Result<String> {
    let xs = table.floats(spec.x)?;
    let groups = match spec.group {
        Some(g) => table.strings(g)?,
        None => vec![String::new(); xs.len()],
    };
    let mut order: Vec<String> = Vec::new();
    for g in &groups {
        if !order.contains(g) {
            order.push(g.clone());
        }
    }
    let mut curves: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for y in &spec.ys {
        let ys = table.floats(y)?;
        for g in &order {
            let pts: Vec<(f64, f64)> = xs
                .iter()
                .zip(&ys)
                .zip(&groups)
                .filter(|(_, gg)| *gg == g)
                .filter_map(|((&x, &v), _)| {
                    let v = if spec.absolute { v.abs() } else { v };
                    Some((spec.x_scale.map(x)?, spec.y_scale.map(v)?))
                })
                .collect();
            let name = match (spec.ys.len(), g.is_empty()) {
                (1, false) => g.clone(),
                (_, false) => format!("{y} {g}"),
                _ => y.to_string(),
            };
            curves.push((name, pts));
        }
    }
    let frame = Frame::from_points(curves.iter().flat_map(|c| c.1.iter()))?;
    let mut svg = String::new();
    header(&mut svg, &spec.title);
    let ylabel = if spec.ys.len() == 1 {
        spec.ys[0].to_string()
    } else {
        "value".into()
    };
    let ylabel = if spec.absolute { format!("|{ylabel}|") } else { ylabel };
    axes(&mut svg, &frame, &spec.x_scale.label(spec.x), &spec.y_scale.label(&ylabel));
    for (k, (name, pts)) in curves.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let ly = MARGIN + 14.0 + 14.0 * k as f64;
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{ly}" fill="{colour}" text-anchor="end">{}</text>"#,
            WIDTH - MARGIN - 6.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Colour map of `z` over the `(x, y)` grid.
pub fn heatmap(table: &csv::ParsedCsv, x: &str, y: &str, z: &str, title: &str) -> Result<String> {
    let xs = table.floats(x)?;
    let ys = table.floats(y)?;
    let zs = table.floats(z)?;
    let distinct = |v: &[f64]| {
        let mut d: Vec<f64> = v.iter().copied().filter(|a| a.is_finite()).collect();
        d.sort_by(f64::total_cmp);
        d.dedup();
        d
    };
    let (ux, uy) = (distinct(&xs), distinct(&ys));
    if ux.is_empty() || uy.is_empty() {
        return Err(Error::Domain("nothing to plot".into()));
    }
    let frame = Frame {
        x0: ux[0],
        x1: if ux.len() > 1 { ux[ux.len() - 1] } else { ux[0] + 1.0 },
        y0: uy[0],
        y1: if uy.len() > 1 { uy[uy.len() - 1] } else { uy[0] + 1.0 },
    };
    let finite: Vec<f64> = zs.iter().copied().filter(|v| v.is_finite()).collect();
    let zlo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let zhi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if zhi > zlo { zhi - zlo } else { 1.0 };
    let cw = (WIDTH - 2.0 * MARGIN) / ux.len() as f64;
    let ch = (HEIGHT - 2.0 * MARGIN) / uy.len() as f64;
    let mut svg = String::new();
    header(&mut svg, title);
    for ((&xv, &yv), &zv) in xs.iter().zip(&ys).zip(&zs) {
        let (Some(i), Some(j)) = (
            ux.iter().position(|&u| u == xv),
            uy.iter().position(|&u| u == yv),
        ) else {
            continue;
        };
        let fill = if zv.is_finite() {
            let s = (zv - zlo) / span;
            format!(
                "rgb({},{},{})",
                (255.0 * s) as u8,
                (80.0 + 100.0 * (1.0 - (2.0 * s - 1.0).abs())) as u8,
                (255.0 * (1.0 - s)) as u8
            )
        } else {
            "#cccccc".into()
        };
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
            MARGIN + i as f64 * cw,
            HEIGHT - MARGIN - (j + 1) as f64 * ch,
            cw + 0.5,
            ch + 0.5
        );
    }
    axes(&mut svg, &frame, x, y);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="44" text-anchor="end">{z}: {} .. {}</text>"#,
        WIDTH - MARGIN,
        tick(zlo),
        tick(zhi)
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn write_svg(path: &Path, svg: &str) -> Result<()> {
    std::fs::write(path, svg).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_chart_groups_and_drops_nonpositive_on_log_axes() {
        let t = csv::parse("p,x,y\na,1,1\na,2,0\nb,1,2\nb,2,4\n").unwrap();
        let svg = line_chart(
            &t,
            &LineChart {
                x: "x",
                ys: vec!["y"],
                group: Some("p"),
                x_scale: Scale::Log,
                y_scale: Scale::Log,
                absolute: false,
                title: "t".into(),
            },
        )
        .unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn heatmap_draws_every_cell() {
        let t = csv::parse("a,b,z\n0,0,1\n0,1,2\n1,0,3\n1,1,nan\n").unwrap();
        let svg = heatmap(&t, "a", "b", "z", "map").unwrap();
        assert_eq!(svg.matches("<rect x=").count(), 5);
        assert!(heatmap(&t, "a", "b", "missing", "m").is_err());
    }
}

//! Rendered artifacts: PNG heatmaps of 2-D fields and SVG line plots.
//! Derived from the snapshot/CSV ground truth, never read back.

use anyhow::{Context, Result};
use gamefields::DensityField;
use std::fmt::Write as _;
use std::path::Path;

// Compact viridis-like ramp, interpolated linearly.
const RAMP: [[u8; 3]; 7] = [
    [68, 1, 84],
    [70, 50, 127],
    [54, 92, 141],
    [39, 127, 142],
    [31, 161, 135],
    [74, 194, 109],
    [253, 231, 37],
];

fn color(v: f64) -> [u8; 3] {
    let v = v.clamp(0.0, 1.0) * (RAMP.len() - 1) as f64;
    let i = (v.floor() as usize).min(RAMP.len() - 2);
    let t = v - i as f64;
    let mut c = [0u8; 3];
    for (ch, cc) in c.iter_mut().enumerate() {
        *cc = (RAMP[i][ch] as f64 + t * (RAMP[i + 1][ch] as f64 - RAMP[i][ch] as f64)) as u8;
    }
    c
}

/// Heatmap of one strategy channel, values in `[0, 1]`, upscaled to at
/// least 256 pixels per axis.
pub fn heatmap_png(path: &Path, field: &DensityField, strategy: usize) -> Result<()> {
    let [nx, ny] = field.grid().dims();
    let scale = (256 / nx.max(ny)).max(1) as u32;
    let (w, h) = (nx as u32 * scale, ny as u32 * scale);
    let mut img = image::RgbImage::new(w, h);
    for (x, y, px) in img.enumerate_pixels_mut() {
        let ix = (x / scale) as usize;
        // Image rows grow downward; flip so increasing y points up.
        let iy = ny - 1 - (y / scale) as usize;
        let v = field.get(iy * nx + ix, strategy);
        *px = image::Rgb(color(v));
    }
    img.save(path).with_context(|| format!("writing heatmap {}", path.display()))?;
    Ok(())
}

/// A named curve for [`line_plot_svg`].
pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Minimal deterministic SVG line plot with axes, ticks and a legend.
pub fn line_plot_svg(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> Result<()> {
    let (w, h) = (640.0, 420.0);
    let (ml, mr, mt, mb) = (62.0, 16.0, 34.0, 46.0);
    let (pw, ph) = (w - ml - mr, h - mt - mb);

    let finite = |v: f64| v.is_finite();
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            if finite(x) && finite(y) {
                x_min = x_min.min(x);
                x_max = x_max.max(x);
                y_min = y_min.min(y);
                y_max = y_max.max(y);
            }
        }
    }
    if !x_min.is_finite() || x_max <= x_min {
        x_min = 0.0;
        x_max = 1.0;
    }
    if !y_min.is_finite() || y_max <= y_min {
        y_min -= 0.5;
        y_max = y_min + 1.0;
    }
    let pad = 0.04 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    let sx = move |x: f64| ml + (x - x_min) / (x_max - x_min) * pw;
    let sy = move |y: f64| mt + (1.0 - (y - y_min) / (y_max - y_min)) * ph;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )?;
    writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#)?;
    writeln!(
        svg,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        ml + pw / 2.0,
        title
    )?;

    // Frame and ticks.
    writeln!(
        svg,
        r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="#333" stroke-width="1"/>"#
    )?;
    for i in 0..=4 {
        let fx = x_min + (x_max - x_min) * i as f64 / 4.0;
        let fy = y_min + (y_max - y_min) * i as f64 / 4.0;
        let px = sx(fx);
        let py = sy(fy);
        writeln!(
            svg,
            r#"<line x1="{px}" y1="{}" x2="{px}" y2="{}" stroke="#333"/>"#,
            mt + ph,
            mt + ph + 4.0
        )?;
        writeln!(
            svg,
            r#"<text x="{px}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{fx:.3}</text>"#,
            mt + ph + 16.0
        )?;
        writeln!(
            svg,
            r#"<line x1="{}" y1="{py}" x2="{ml}" y2="{py}" stroke="#333"/>"#,
            ml - 4.0
        )?;
        writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{fy:.3}</text>"#,
            ml - 7.0,
            py + 3.5
        )?;
    }
    writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        ml + pw / 2.0,
        h - 8.0,
        x_label
    )?;
    writeln!(
        svg,
        r#"<text x="14" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        mt + ph / 2.0,
        mt + ph / 2.0,
        y_label
    )?;

    for (si, s) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let mut d = String::new();
        for (pi, &(x, y)) in s.points.iter().filter(|(x, y)| finite(*x) && finite(*y)).enumerate() {
            let cmd = if pi == 0 { 'M' } else { 'L' };
            write!(d, "{cmd}{:.2} {:.2} ", sx(x), sy(y))?;
        }
        writeln!(svg, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.6"/>"#)?;
        let ly = mt + 16.0 + 16.0 * si as f64;
        writeln!(
            svg,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            ml + 8.0,
            ml + 28.0
        )?;
        writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">{}</text>"#,
            ml + 33.0,
            ly + 3.5,
            s.label
        )?;
    }
    writeln!(svg, "</svg>")?;
    std::fs::write(path, svg).with_context(|| format!("writing plot {}", path.display()))?;
    Ok(())
}

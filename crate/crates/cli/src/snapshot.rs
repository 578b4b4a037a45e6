//! Grid snapshot files.
//!
//! One file per snapshot: a header line `time nx ny n_strategies`
//! followed by one block per strategy channel, each `ny` lines of `nx`
//! ASCII floats (row-major). Images are derived artifacts; these files
//! are the ground truth.

use anyhow::{bail, Context, Result};
use gamefields::{DensityField, SpatialGrid};
use std::fmt::Write as _;
use std::path::Path;

pub fn write_snapshot(path: &Path, time: f64, field: &DensityField) -> Result<()> {
    let [nx, ny] = field.grid().dims();
    let s = field.num_strategies();
    let mut out = String::new();
    writeln!(out, "{time:.17e} {nx} {ny} {s}")?;
    for strategy in 0..s {
        for iy in 0..ny {
            let mut line = String::new();
            for ix in 0..nx {
                if ix > 0 {
                    line.push(' ');
                }
                let node = iy * nx + ix;
                write!(line, "{:.17e}", field.get(node, strategy))?;
            }
            writeln!(out, "{line}")?;
        }
    }
    std::fs::write(path, out).with_context(|| format!("writing snapshot {}", path.display()))?;
    Ok(())
}

/// Read a snapshot back onto `grid` (dims must match the header).
pub fn read_snapshot(path: &Path, grid: &SpatialGrid) -> Result<(f64, DensityField)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading snapshot {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().context("empty snapshot file")?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 4 {
        bail!("malformed snapshot header: {header:?}");
    }
    let time: f64 = head[0].parse()?;
    let nx: usize = head[1].parse()?;
    let ny: usize = head[2].parse()?;
    let s: usize = head[3].parse()?;
    if [nx, ny] != grid.dims() {
        bail!("snapshot dims {}x{} do not match grid {:?}", nx, ny, grid.dims());
    }
    let mut values = vec![0.0; nx * ny * s];
    for strategy in 0..s {
        for iy in 0..ny {
            let line = lines.next().context("truncated snapshot")?;
            for (ix, tok) in line.split_whitespace().enumerate() {
                if ix >= nx {
                    bail!("row too long in snapshot");
                }
                values[(iy * nx + ix) * s + strategy] = tok.parse()?;
            }
        }
    }
    let field = DensityField::from_raw(grid.clone(), s, values)?;
    Ok((time, field))
}

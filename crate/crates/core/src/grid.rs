//! Mesoscopic spatial grids.
//!
//! Nodes sit at cell centers: node `i` of an axis spanning `[min, max]`
//! with `n` cells is at `min + (i + 1/2) h`, `h = (max - min) / n`. On a
//! periodic grid the last and first cells are adjacent; on a fixed grid
//! nodes outside the active box are frozen boundary data.

use crate::{Error, Result};

/// Boundary treatment of a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Periodic,
    /// Nodes whose position lies strictly inside the box are active;
    /// every other node holds frozen boundary values.
    Fixed { active_min: [f64; 2], active_max: [f64; 2] },
}

/// A rectangular grid in one or two dimensions (square cells).
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    dims: [usize; 2],
    origin: [f64; 2],
    h: f64,
    boundary: Boundary,
}

impl SpatialGrid {
    pub fn periodic_1d(n: usize, min: f64, max: f64) -> Result<Self> {
        Self::build([n, 1], [min, 0.0], (max - min) / n as f64, Boundary::Periodic)
    }

    /// Square periodic grid on `[min, max]^2` with `n` cells per axis.
    pub fn periodic_2d(n: usize, min: f64, max: f64) -> Result<Self> {
        Self::build([n, n], [min, min], (max - min) / n as f64, Boundary::Periodic)
    }

    /// 1-D grid on `[min, max]` with frozen nodes outside
    /// `(active_min, active_max)`.
    pub fn fixed_1d(n: usize, min: f64, max: f64, active_min: f64, active_max: f64) -> Result<Self> {
        if !(min <= active_min && active_min < active_max && active_max <= max) {
            return Err(Error::Config(format!(
                "active interval [{active_min}, {active_max}] not inside domain [{min}, {max}]"
            )));
        }
        Self::build(
            [n, 1],
            [min, 0.0],
            (max - min) / n as f64,
            Boundary::Fixed {
                active_min: [active_min, f64::NEG_INFINITY],
                active_max: [active_max, f64::INFINITY],
            },
        )
    }

    /// Periodic 1-D grid with an exact spacing `h` (the extent becomes
    /// `n * h`); used by lattices whose spacing is the Kac parameter.
    pub fn periodic_1d_h(n: usize, min: f64, h: f64) -> Result<Self> {
        Self::build([n, 1], [min, 0.0], h, Boundary::Periodic)
    }

    pub fn periodic_2d_h(n: usize, min: f64, h: f64) -> Result<Self> {
        Self::build([n, n], [min, min], h, Boundary::Periodic)
    }

    pub fn fixed_1d_h(
        n: usize,
        min: f64,
        h: f64,
        active_min: f64,
        active_max: f64,
    ) -> Result<Self> {
        Self::build(
            [n, 1],
            [min, 0.0],
            h,
            Boundary::Fixed {
                active_min: [active_min, f64::NEG_INFINITY],
                active_max: [active_max, f64::INFINITY],
            },
        )
    }

    fn build(dims: [usize; 2], origin: [f64; 2], h: f64, boundary: Boundary) -> Result<Self> {
        if dims[0] == 0 || dims[1] == 0 || !(h > 0.0) {
            return Err(Error::Config(format!("degenerate grid dims {dims:?}, h = {h}")));
        }
        Ok(Self { dims, origin, h, boundary })
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// 1 or 2.
    pub fn dim(&self) -> usize {
        if self.dims[1] > 1 {
            2
        } else {
            1
        }
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// Cell volume `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim() as i32)
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.boundary, Boundary::Periodic)
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.dims[0] + ix
    }

    #[inline]
    pub fn coords(&self, node: usize) -> (usize, usize) {
        (node % self.dims[0], node / self.dims[0])
    }

    /// Node position (cell center).
    #[inline]
    pub fn position(&self, node: usize) -> [f64; 2] {
        let (ix, iy) = self.coords(node);
        [
            self.origin[0] + (ix as f64 + 0.5) * self.h,
            self.origin[1] + (iy as f64 + 0.5) * self.h,
        ]
    }

    /// Whether a node revises (periodic: all nodes).
    #[inline]
    pub fn is_active(&self, node: usize) -> bool {
        match self.boundary {
            Boundary::Periodic => true,
            Boundary::Fixed { active_min, active_max } => {
                let p = self.position(node);
                p[0] > active_min[0]
                    && p[0] < active_max[0]
                    && p[1] > active_min[1]
                    && p[1] < active_max[1]
            }
        }
    }

    /// Width of the frozen collar between the active box and the domain
    /// edge, in nodes. `None` for periodic grids.
    pub fn collar_nodes(&self) -> Option<usize> {
        match self.boundary {
            Boundary::Periodic => None,
            Boundary::Fixed { active_min, active_max } => {
                let left = active_min[0] - self.origin[0];
                let right = self.origin[0] + self.dims[0] as f64 * self.h - active_max[0];
                Some((left.min(right).max(0.0) / self.h).floor() as usize)
            }
        }
    }

    /// Index of the cell containing `pos` (periodic wrap, else clamped).
    pub fn cell_of(&self, pos: [f64; 2]) -> usize {
        let mut idx = [0usize; 2];
        for a in 0..2 {
            let n = self.dims[a] as i64;
            let raw = ((pos[a] - self.origin[a]) / self.h).floor() as i64;
            idx[a] = if self.is_periodic() {
                raw.rem_euclid(n) as usize
            } else {
                raw.clamp(0, n - 1) as usize
            };
        }
        self.index(idx[0], idx[1])
    }

    /// Neighbor index at offset `z` with periodic wrap; `None` if the
    /// offset leaves a non-periodic domain.
    #[inline]
    pub fn offset_index(&self, node: usize, z: [i64; 2]) -> Option<usize> {
        let (ix, iy) = self.coords(node);
        let (nx, ny) = (self.dims[0] as i64, self.dims[1] as i64);
        let (jx, jy) = (ix as i64 + z[0], iy as i64 + z[1]);
        if self.is_periodic() {
            Some(self.index((jx.rem_euclid(nx)) as usize, (jy.rem_euclid(ny)) as usize))
        } else if jx >= 0 && jx < nx && jy >= 0 && jy < ny {
            Some(self.index(jx as usize, jy as usize))
        } else {
            None
        }
    }
}

//! Simplex-valued density fields on a spatial grid.

use crate::grid::SpatialGrid;
use crate::{Error, Result};

/// Mesoscopic strategy profile `f(u, i)`: for every grid node a
/// probability vector over strategies, stored node-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    grid: SpatialGrid,
    n_strategies: usize,
    values: Vec<f64>,
}

impl DensityField {
    /// Spatially constant profile.
    pub fn constant(grid: SpatialGrid, probs: &[f64]) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len() * probs.len());
        for _ in 0..grid.len() {
            values.extend_from_slice(probs);
        }
        Self::from_raw(grid, probs.len(), values)
    }

    /// Profile from a function of position returning the per-strategy
    /// densities at that node.
    pub fn from_fn<F>(grid: SpatialGrid, n_strategies: usize, mut f: F) -> Result<Self>
    where
        F: FnMut([f64; 2]) -> Vec<f64>,
    {
        let mut values = Vec::with_capacity(grid.len() * n_strategies);
        for node in 0..grid.len() {
            let v = f(grid.position(node));
            debug_assert_eq!(v.len(), n_strategies);
            values.extend_from_slice(&v);
        }
        Self::from_raw(grid, n_strategies, values)
    }

    /// Two-strategy profile from the strategy-1 density `p(u)`.
    pub fn from_scalar<F>(grid: SpatialGrid, mut p: F) -> Result<Self>
    where
        F: FnMut([f64; 2]) -> f64,
    {
        Self::from_fn(grid, 2, |pos| {
            let v = p(pos);
            vec![v, 1.0 - v]
        })
    }

    pub fn from_raw(grid: SpatialGrid, n_strategies: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() * n_strategies {
            return Err(Error::Config(format!(
                "field has {} values, expected {} nodes x {} strategies",
                values.len(),
                grid.len(),
                n_strategies
            )));
        }
        let field = Self { grid, n_strategies, values };
        field.validate_simplex(1e-9)?;
        Ok(field)
    }

    /// Check membership in the simplex at every node.
    pub fn validate_simplex(&self, tol: f64) -> Result<()> {
        for node in 0..self.grid.len() {
            let v = self.node(node);
            let sum: f64 = v.iter().sum();
            if (sum - 1.0).abs() > tol || v.iter().any(|&x| !(-tol..=1.0 + tol).contains(&x)) {
                return Err(Error::ProfileNotSimplex { node, sum });
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn num_strategies(&self) -> usize {
        self.n_strategies
    }

    #[inline]
    pub fn node(&self, node: usize) -> &[f64] {
        &self.values[node * self.n_strategies..(node + 1) * self.n_strategies]
    }

    #[inline]
    pub fn node_mut(&mut self, node: usize) -> &mut [f64] {
        &mut self.values[node * self.n_strategies..(node + 1) * self.n_strategies]
    }

    #[inline]
    pub fn get(&self, node: usize, strategy: usize) -> f64 {
        self.values[node * self.n_strategies + strategy]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Copy one strategy channel into `out`.
    pub fn channel(&self, strategy: usize, out: &mut [f64]) {
        for (node, o) in out.iter_mut().enumerate() {
            *o = self.get(node, strategy);
        }
    }

    /// Mean of a channel over the domain.
    pub fn spatial_average(&self, strategy: usize) -> f64 {
        let n = self.grid.len() as f64;
        (0..self.grid.len()).map(|i| self.get(i, strategy)).sum::<f64>() / n
    }

    /// Spatial variance of a channel.
    pub fn spatial_variance(&self, strategy: usize) -> f64 {
        let mean = self.spatial_average(strategy);
        let n = self.grid.len() as f64;
        (0..self.grid.len())
            .map(|i| (self.get(i, strategy) - mean).powi(2))
            .sum::<f64>()
            / n
    }

    /// `int sum_i |f - g| du`.
    pub fn l1_distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.values.len(), other.values.len());
        let cell = self.grid.cell_volume();
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * cell
    }

    /// Largest pointwise deviation across nodes and strategies.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Worst node-wise deviation of `sum_i f(u, i)` from 1.
    pub fn max_mass_drift(&self) -> f64 {
        (0..self.grid.len())
            .map(|n| (self.node(n).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Complex DFT amplitude of a channel at integer mode `k`,
    /// normalized so a pure `a cos(k x)` component reports `a`.
    pub fn mode_amplitude(&self, strategy: usize, k: [i64; 2]) -> f64 {
        let [nx, ny] = self.grid.dims();
        let tau = std::f64::consts::TAU;
        let (mut re, mut im) = (0.0, 0.0);
        for node in 0..self.grid.len() {
            let (ix, iy) = self.grid.coords(node);
            let phase = tau
                * (k[0] as f64 * ix as f64 / nx as f64 + k[1] as f64 * iy as f64 / ny as f64);
            let v = self.get(node, strategy);
            re += v * phase.cos();
            im -= v * phase.sin();
        }
        let n = self.grid.len() as f64;
        let norm = if k == [0, 0] { 1.0 } else { 2.0 };
        norm * (re * re + im * im).sqrt() / n
    }

    /// Mode class `(|kx|, |ky|)` with the largest summed DFT amplitude,
    /// excluding the mean. Used to identify the wavenumber a pattern
    /// locked onto.
    pub fn dominant_mode(&self, strategy: usize) -> (usize, usize) {
        let [nx, ny] = self.grid.dims();
        let kx_max = nx / 2;
        let ky_max = ny / 2;
        let mut best = (0usize, 0usize);
        let mut best_amp = -1.0;
        for ky in 0..=ky_max {
            for kx in 0..=kx_max {
                if kx == 0 && ky == 0 {
                    continue;
                }
                // Sum the amplitude over the sign class of (kx, ky).
                let mut amp = self.mode_amplitude(strategy, [kx as i64, ky as i64]);
                if ky > 0 && kx > 0 {
                    amp += self.mode_amplitude(strategy, [kx as i64, -(ky as i64)]);
                }
                if amp > best_amp {
                    best_amp = amp;
                    best = (kx, ky);
                }
            }
        }
        best
    }

    /// Clip into `[0, 1]`, renormalize each node, and return the largest
    /// adjustment made.
    pub fn project_simplex(&mut self) -> f64 {
        let mut worst: f64 = 0.0;
        for node in 0..self.grid.len() {
            let v = self.node_mut(node);
            let mut sum = 0.0;
            for x in v.iter_mut() {
                let clipped = x.clamp(0.0, 1.0);
                worst = worst.max((clipped - *x).abs());
                *x = clipped;
                sum += *x;
            }
            if sum > 0.0 {
                worst = worst.max((sum - 1.0).abs());
                for x in v.iter_mut() {
                    *x /= sum;
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn constant_field_valid() {
        let grid = SpatialGrid::periodic_1d(16, -PI, PI).unwrap();
        let f = DensityField::constant(grid, &[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert!((f.spatial_average(0) - 1.0 / 3.0).abs() < 1e-15);
        assert!(f.max_mass_drift() < 1e-15);
    }

    #[test]
    fn rejects_non_simplex() {
        let grid = SpatialGrid::periodic_1d(4, 0.0, 1.0).unwrap();
        assert!(DensityField::constant(grid, &[0.7, 0.7]).is_err());
    }

    #[test]
    fn mode_amplitude_reads_cosine() {
        let grid = SpatialGrid::periodic_1d(128, -PI, PI).unwrap();
        let f = DensityField::from_scalar(grid, |p| 0.5 + 0.01 * (3.0 * p[0]).cos()).unwrap();
        assert!((f.mode_amplitude(0, [3, 0]) - 0.01).abs() < 1e-12);
        assert!(f.mode_amplitude(0, [2, 0]) < 1e-12);
    }

    #[test]
    fn dominant_mode_2d() {
        let grid = SpatialGrid::periodic_2d(32, -PI, PI).unwrap();
        let f = DensityField::from_scalar(grid, |p| {
            0.5 + 0.05 * (2.0 * p[0]).cos() * (2.0 * p[1]).cos()
        })
        .unwrap();
        assert_eq!(f.dominant_mode(0), (2, 2));
    }

    #[test]
    fn l1_distance_scales_with_cell_volume() {
        let grid = SpatialGrid::periodic_1d(10, 0.0, 1.0).unwrap();
        let a = DensityField::constant(grid.clone(), &[0.5, 0.5]).unwrap();
        let b = DensityField::constant(grid, &[0.6, 0.4]).unwrap();
        // |0.1| + |0.1| per node, integrated over unit length.
        assert!((a.l1_distance(&b) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn projection_restores_simplex() {
        let grid = SpatialGrid::periodic_1d(4, 0.0, 1.0).unwrap();
        let mut f = DensityField::constant(grid, &[0.5, 0.5]).unwrap();
        f.values_mut()[0] = 0.5 + 1e-13;
        let drift = f.project_simplex();
        assert!(drift > 0.0 && drift < 1e-12);
        f.validate_simplex(1e-12).unwrap();
    }
}

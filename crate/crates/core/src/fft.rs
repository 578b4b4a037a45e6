//! Convolution engine for the nonlocal term `J * f`.
//!
//! Periodic grids use circular FFT convolution with a cached kernel
//! spectrum; fixed-boundary grids quadrature the convolution directly
//! over the kernel support with offsets truncated at the domain edge.

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::grid::SpatialGrid;
use crate::kernel::DiscreteKernel;

pub struct Convolver {
    grid: SpatialGrid,
    inner: Inner,
}

enum Inner {
    Fft {
        kernel_hat: Vec<Complex64>,
        fwd_x: Arc<dyn Fft<f64>>,
        inv_x: Arc<dyn Fft<f64>>,
        fwd_y: Option<Arc<dyn Fft<f64>>>,
        inv_y: Option<Arc<dyn Fft<f64>>>,
        buf: Vec<Complex64>,
        col: Vec<Complex64>,
    },
    Direct {
        kernel: DiscreteKernel,
    },
}

impl Convolver {
    /// FFT-backed convolver; periodic grids only.
    pub fn new_fft(grid: &SpatialGrid, kernel: &DiscreteKernel) -> Option<Self> {
        if !grid.is_periodic() {
            return None;
        }
        let [nx, ny] = grid.dims();
        let mut planner = FftPlanner::new();
        let fwd_x = planner.plan_fft_forward(nx);
        let inv_x = planner.plan_fft_inverse(nx);
        let (fwd_y, inv_y) = if ny > 1 {
            (Some(planner.plan_fft_forward(ny)), Some(planner.plan_fft_inverse(ny)))
        } else {
            (None, None)
        };

        // Kernel image with offsets wrapped onto the grid.
        let mut img = vec![Complex64::ZERO; nx * ny];
        for (z, w) in kernel.support() {
            let ix = z[0].rem_euclid(nx as i64) as usize;
            let iy = z[1].rem_euclid(ny as i64) as usize;
            img[iy * nx + ix] += Complex64::new(w, 0.0);
        }
        let mut me = Self {
            grid: grid.clone(),
            inner: Inner::Fft {
                kernel_hat: Vec::new(),
                fwd_x,
                inv_x,
                fwd_y,
                inv_y,
                buf: vec![Complex64::ZERO; nx * ny],
                col: vec![Complex64::ZERO; ny],
            },
        };
        me.forward(&mut img);
        if let Inner::Fft { kernel_hat, .. } = &mut me.inner {
            *kernel_hat = img;
        }
        Some(me)
    }

    /// Direct-sum convolver; works with any boundary condition.
    pub fn new_direct(grid: &SpatialGrid, kernel: &DiscreteKernel) -> Self {
        Self { grid: grid.clone(), inner: Inner::Direct { kernel: kernel.clone() } }
    }

    /// Preferred engine for a grid: FFT when periodic, direct otherwise.
    pub fn new(grid: &SpatialGrid, kernel: &DiscreteKernel) -> Self {
        Self::new_fft(grid, kernel).unwrap_or_else(|| Self::new_direct(grid, kernel))
    }

    /// Compute `out[i] = sum_z W(z) channel[i + z]` (circular on periodic
    /// grids, truncated at the edge otherwise).
    pub fn convolve(&mut self, channel: &[f64], out: &mut [f64]) {
        debug_assert_eq!(channel.len(), self.grid.len());
        debug_assert_eq!(out.len(), self.grid.len());
        match &mut self.inner {
            Inner::Direct { kernel } => {
                for (i, o) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (z, w) in kernel.support() {
                        if let Some(j) = self.grid.offset_index(i, z) {
                            acc += w * channel[j];
                        }
                    }
                    *o = acc;
                }
            }
            Inner::Fft { .. } => {
                let n = self.grid.len();
                {
                    let Inner::Fft { buf, .. } = &mut self.inner else { unreachable!() };
                    for (b, &c) in buf.iter_mut().zip(channel) {
                        *b = Complex64::new(c, 0.0);
                    }
                }
                let mut work = std::mem::take(self.buf_mut());
                self.forward(&mut work);
                {
                    let Inner::Fft { kernel_hat, .. } = &self.inner else { unreachable!() };
                    for (w, k) in work.iter_mut().zip(kernel_hat) {
                        *w *= k;
                    }
                }
                self.inverse(&mut work);
                let scale = 1.0 / n as f64;
                for (o, w) in out.iter_mut().zip(&work) {
                    *o = w.re * scale;
                }
                *self.buf_mut() = work;
            }
        }
    }

    fn buf_mut(&mut self) -> &mut Vec<Complex64> {
        match &mut self.inner {
            Inner::Fft { buf, .. } => buf,
            Inner::Direct { .. } => unreachable!(),
        }
    }

    fn forward(&mut self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    fn inverse(&mut self, data: &mut [Complex64]) {
        self.transform(data, true);
    }

    // Row transforms, then column transforms when 2-D. The inverse pair
    // leaves a factor nx * ny which `convolve` divides out once.
    fn transform(&mut self, data: &mut [Complex64], inverse: bool) {
        let [nx, ny] = self.grid.dims();
        let Inner::Fft { fwd_x, inv_x, fwd_y, inv_y, col, .. } = &mut self.inner else {
            unreachable!()
        };
        let fx = if inverse { inv_x } else { fwd_x };
        for row in data.chunks_exact_mut(nx) {
            fx.process(row);
        }
        if ny > 1 {
            let fy = if inverse { inv_y } else { fwd_y }.as_ref().expect("2-D plans");
            for x in 0..nx {
                for y in 0..ny {
                    col[y] = data[y * nx + x];
                }
                fy.process(col);
                for y in 0..ny {
                    data[y * nx + x] = col[y];
                }
            }
        }
    }
}

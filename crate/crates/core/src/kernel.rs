//! Interaction kernels, their lattice discretizations, and Fourier
//! coefficients.
//!
//! A [`Kernel`] is a nonnegative, symmetric, normalized interaction
//! profile `J`. The microscopic process weights neighbors by the Kac
//! form `W(z) = gamma^d J(gamma z)`; the mesoscopic equations quadrature
//! the convolution `J * f` with grid weights `J(h z) h^d`. Gaussian
//! profiles are truncated where `J` drops below `1e-12` of its peak (or
//! at half the torus / the frozen collar, whichever is smaller) and the
//! weights are renormalized to sum to exactly 1, with the
//! pre-normalization sum recorded.

use crate::grid::SpatialGrid;
use crate::{Error, Result};

const PROFILE_CUT: f64 = 1e-12;

/// Kernel profile shapes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// `J(x) ~ exp(-b |x|^2)`.
    Gaussian { b: f64 },
    /// Constant over the whole domain (the mean-field case).
    Uniform,
    /// Indicator of the ball `|x| < radius`.
    IndicatorBall { radius: f64 },
}

/// Continuous interaction profile on a domain of given extent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    pub profile: Profile,
    pub dim: usize,
    pub domain_length: f64,
}

impl Kernel {
    pub fn new(profile: Profile, dim: usize, domain_length: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Config(format!("kernel dimension {dim} not in {{1, 2}}")));
        }
        match profile {
            Profile::Gaussian { b } if !(b > 0.0) => {
                return Err(Error::Config(format!("gaussian width b = {b} must be positive")))
            }
            Profile::IndicatorBall { radius } if !(radius > 0.0) => {
                return Err(Error::Config(format!("ball radius {radius} must be positive")))
            }
            _ => {}
        }
        Ok(Self { profile, dim, domain_length })
    }

    pub fn gaussian(b: f64, dim: usize, domain_length: f64) -> Result<Self> {
        Self::new(Profile::Gaussian { b }, dim, domain_length)
    }

    pub fn uniform(dim: usize, domain_length: f64) -> Result<Self> {
        Self::new(Profile::Uniform, dim, domain_length)
    }

    /// Normalized density value `J(|x|)` with `int J = 1` over the plane
    /// (uniform: over the domain). The 2-D Gaussian is the radial product
    /// `exp(-b |x|^2)`.
    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        match self.profile {
            Profile::Gaussian { b } => (-b * r * r).exp() / self.normalization(),
            Profile::Uniform => 1.0 / self.normalization(),
            Profile::IndicatorBall { radius } => {
                if r.abs() < radius {
                    1.0 / self.normalization()
                } else {
                    0.0
                }
            }
        }
    }

    /// `int J_raw` over the support: the constant dividing the raw profile.
    fn normalization(&self) -> f64 {
        use std::f64::consts::PI;
        match (self.profile, self.dim) {
            (Profile::Gaussian { b }, 1) => (PI / b).sqrt(),
            (Profile::Gaussian { b }, _) => PI / b,
            (Profile::Uniform, d) => self.domain_length.powi(d as i32),
            (Profile::IndicatorBall { radius }, 1) => 2.0 * radius,
            (Profile::IndicatorBall { radius }, _) => PI * radius * radius,
        }
    }

    /// Radius beyond which the profile is treated as zero.
    pub fn natural_cutoff(&self) -> f64 {
        match self.profile {
            Profile::Gaussian { b } => (-(PROFILE_CUT.ln()) / b).sqrt(),
            Profile::Uniform => self.domain_length,
            Profile::IndicatorBall { radius } => radius,
        }
    }

    /// Kac discretization on a periodic lattice: `W(z) = gamma^d J(gamma z)`
    /// over offsets inside the truncated support, renormalized to sum 1.
    ///
    /// Soft profiles are capped at half the torus; a hard-support ball
    /// wider than half the torus is an error (wraparound would
    /// double-count interactions).
    pub fn kac_discretize(&self, gamma: f64, dims: [usize; 2]) -> Result<DiscreteKernel> {
        let half = dims
            .iter()
            .take(self.dim)
            .map(|&n| (n.max(1) - 1) / 2)
            .min()
            .unwrap_or(0);
        self.discretize(gamma, half, Some(dims), true)
    }

    /// Kac discretization for a fixed-boundary lattice: the support is
    /// capped at the frozen collar width (in sites) so that every active
    /// site's neighborhood stays inside the simulated region.
    pub fn kac_discretize_collared(&self, gamma: f64, collar_sites: usize) -> Result<DiscreteKernel> {
        if matches!(self.profile, Profile::Uniform) {
            return Err(Error::Config(
                "uniform kernel is not supported with fixed boundary conditions".into(),
            ));
        }
        self.discretize(gamma, collar_sites, None, false)
    }

    /// Grid discretization for the mesoscopic convolution:
    /// `W(z) = J(h z) h^d` over grid offsets, renormalized to sum 1.
    pub fn grid_discretize(&self, grid: &SpatialGrid) -> Result<DiscreteKernel> {
        if grid.dim() != self.dim {
            return Err(Error::Config(format!(
                "kernel dimension {} does not match grid dimension {}",
                self.dim,
                grid.dim()
            )));
        }
        let kd = if grid.is_periodic() {
            let half = grid
                .dims()
                .iter()
                .take(self.dim)
                .map(|&n| (n.max(1) - 1) / 2)
                .min()
                .unwrap_or(0);
            self.discretize(grid.spacing(), half, Some(grid.dims()), true)?
        } else {
            if matches!(self.profile, Profile::Uniform) {
                return Err(Error::Config(
                    "uniform kernel is not supported with fixed boundary conditions".into(),
                ));
            }
            let collar = grid.collar_nodes().unwrap_or(0);
            self.discretize(grid.spacing(), collar, None, false)?
        };
        // The convolution quadrature needs a few samples across the support.
        if !matches!(self.profile, Profile::Uniform) {
            let samples = 2 * kd.max_offset() + 1;
            if samples < 5 {
                return Err(Error::ResolutionTooCoarse { samples });
            }
        }
        Ok(kd)
    }

    fn discretize(
        &self,
        spacing: f64,
        cap_sites: usize,
        full_dims: Option<[usize; 2]>,
        torus: bool,
    ) -> Result<DiscreteKernel> {
        if !(spacing > 0.0) {
            return Err(Error::Config(format!("non-positive lattice spacing {spacing}")));
        }
        let (lo, hi, radius_applied) = match (self.profile, full_dims) {
            // The uniform kernel covers every torus offset exactly once.
            (Profile::Uniform, Some(dims)) => {
                let mut lo = [0i64; 2];
                let mut hi = [0i64; 2];
                for a in 0..self.dim {
                    let n = dims[a] as i64;
                    lo[a] = -(n - 1) / 2;
                    hi[a] = n / 2;
                }
                (lo, hi, self.domain_length)
            }
            (Profile::Uniform, None) => {
                return Err(Error::Config(
                    "uniform kernel requires a periodic lattice".into(),
                ))
            }
            _ => {
                // Outermost offset carrying nonzero weight: strict for the
                // hard-support ball (J vanishes at |x| >= R).
                let natural_sites = match self.profile {
                    Profile::IndicatorBall { radius } => {
                        ((radius / spacing).ceil() as usize).saturating_sub(1)
                    }
                    _ => (self.natural_cutoff() / spacing).ceil() as usize,
                };
                if matches!(self.profile, Profile::IndicatorBall { .. }) && natural_sites > cap_sites
                {
                    if torus {
                        return Err(Error::SupportExceedsTorus {
                            support: natural_sites,
                            half: cap_sites,
                        });
                    }
                    return Err(Error::Config(format!(
                        "ball kernel support ({natural_sites} sites) exceeds the frozen collar \
                         ({cap_sites} sites)"
                    )));
                }
                let k = natural_sites.min(cap_sites) as i64;
                let mut lo = [0i64; 2];
                let mut hi = [0i64; 2];
                for a in 0..self.dim {
                    lo[a] = -k;
                    hi[a] = k;
                }
                (lo, hi, k as f64 * spacing)
            }
        };

        let cols = (hi[0] - lo[0] + 1) as usize;
        let rows = (hi[1] - lo[1] + 1) as usize;
        let scale = spacing.powi(self.dim as i32);
        let mut weights = vec![0.0; cols * rows];
        let mut sum = 0.0;
        for zy in lo[1]..=hi[1] {
            for zx in lo[0]..=hi[0] {
                let r = ((zx as f64 * spacing).powi(2) + (zy as f64 * spacing).powi(2)).sqrt();
                let w = scale * self.value(r);
                weights[((zy - lo[1]) * cols as i64 + (zx - lo[0])) as usize] = w;
                sum += w;
            }
        }
        if sum <= 0.0 {
            return Err(Error::Config("kernel discretization has zero mass".into()));
        }
        for w in &mut weights {
            *w /= sum;
        }
        Ok(DiscreteKernel {
            dim: self.dim,
            lo,
            hi,
            weights,
            pre_normalization_sum: sum,
            truncation_radius: radius_applied,
            spacing,
        })
    }

    /// Continuous Fourier transform `Jhat(w) = int J(x) cos(w x) dx / int J`
    /// by Simpson quadrature over the truncated support (1-D profiles).
    pub fn continuous_fourier(&self, w: f64) -> f64 {
        let r = match self.profile {
            Profile::Uniform => self.domain_length / 2.0,
            _ => self.natural_cutoff().min(self.domain_length / 2.0),
        };
        let n = 4000; // even
        let h = 2.0 * r / n as f64;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..=n {
            let x = -r + i as f64 * h;
            let c = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let j = self.value(x);
            num += c * j * (w * x).cos();
            den += c * j;
        }
        num / den
    }

    /// Fourier coefficients in the convention `Jhat(k) = int J(u)
    /// exp(2 pi i k u) du` with `u` in the domain's native units — the
    /// form in which the dispersion relations are stated.
    pub fn unit_period_coeffs(&self, k_max: usize) -> FourierCoeffs {
        let values = (0..=k_max)
            .map(|k| self.continuous_fourier(2.0 * std::f64::consts::PI * k as f64))
            .collect();
        FourierCoeffs { dims: None, k_max: [k_max, 0], values }
    }

    /// Second moment `J2 = int |w|^2 J(w) dw / int J` by product Simpson
    /// quadrature over the truncated support.
    pub fn second_moment(&self) -> f64 {
        let r = match self.profile {
            Profile::Uniform => self.domain_length / 2.0,
            _ => self.natural_cutoff().min(self.domain_length / 2.0),
        };
        let n = 2000;
        let h = 2.0 * r / n as f64;
        let simpson = |i: usize| -> f64 {
            if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            }
        };
        let mut num = 0.0;
        let mut den = 0.0;
        if self.dim == 1 {
            for i in 0..=n {
                let x = -r + i as f64 * h;
                let j = self.value(x) * simpson(i);
                num += j * x * x;
                den += j;
            }
        } else {
            for iy in 0..=n {
                let y = -r + iy as f64 * h;
                for ix in 0..=n {
                    let x = -r + ix as f64 * h;
                    let rr = (x * x + y * y).sqrt();
                    let j = self.value(rr) * simpson(ix) * simpson(iy);
                    num += j * (x * x + y * y);
                    den += j;
                }
            }
        }
        num / den
    }
}

/// A kernel discretized onto lattice offsets, normalized to sum exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteKernel {
    dim: usize,
    lo: [i64; 2],
    hi: [i64; 2],
    weights: Vec<f64>,
    pre_normalization_sum: f64,
    truncation_radius: f64,
    spacing: f64,
}

impl DiscreteKernel {
    /// Identity kernel (single zero offset); `J * f = f`.
    pub fn identity() -> Self {
        Self {
            dim: 1,
            lo: [0, 0],
            hi: [0, 0],
            weights: vec![1.0],
            pre_normalization_sum: 1.0,
            truncation_radius: 0.0,
            spacing: 1.0,
        }
    }

    #[inline]
    fn cols(&self) -> usize {
        (self.hi[0] - self.lo[0] + 1) as usize
    }

    /// Weight at offset `z`, zero outside the stored box.
    #[inline]
    pub fn weight(&self, z: [i64; 2]) -> f64 {
        if z[0] < self.lo[0] || z[0] > self.hi[0] || z[1] < self.lo[1] || z[1] > self.hi[1] {
            return 0.0;
        }
        self.weights[((z[1] - self.lo[1]) * self.cols() as i64 + (z[0] - self.lo[0])) as usize]
    }

    /// Iterate `(offset, weight)` over the support.
    pub fn support(&self) -> impl Iterator<Item = ([i64; 2], f64)> + '_ {
        let cols = self.cols() as i64;
        self.weights.iter().enumerate().filter_map(move |(idx, &w)| {
            if w == 0.0 {
                return None;
            }
            let zx = self.lo[0] + (idx as i64 % cols);
            let zy = self.lo[1] + (idx as i64 / cols);
            Some(([zx, zy], w))
        })
    }

    /// Number of stored offsets.
    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    /// Largest absolute offset along any axis.
    pub fn max_offset(&self) -> usize {
        let m = self.lo.iter().map(|z| z.unsigned_abs()).max().unwrap_or(0);
        m.max(self.hi.iter().map(|z| *z as u64).max().unwrap_or(0)) as usize
    }

    /// Sum of weights before renormalization (quadrature mass).
    pub fn pre_normalization_sum(&self) -> f64 {
        self.pre_normalization_sum
    }

    /// Truncation radius actually applied, in mesoscopic length units.
    pub fn truncation_radius(&self) -> f64 {
        self.truncation_radius
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Discrete Fourier transform of the weight vector over the grid's
    /// modes, `Jhat(k) = sum_z W(z) exp(2 pi i k . z / N)`. Imaginary
    /// parts (which vanish by symmetry) are checked below `1e-10` and
    /// discarded.
    pub fn fourier_coeffs(&self, grid: &SpatialGrid) -> Result<FourierCoeffs> {
        if !grid.is_periodic() {
            return Err(Error::NonPeriodicGrid);
        }
        let dims = grid.dims();
        let kx_max = dims[0] / 2;
        let ky_max = if self.dim == 2 { dims[1] / 2 } else { 0 };
        let tau = std::f64::consts::TAU;
        let mut values = Vec::with_capacity((kx_max + 1) * (ky_max + 1));
        for ky in 0..=ky_max {
            for kx in 0..=kx_max {
                let mut re = 0.0;
                let mut im = 0.0;
                for (z, w) in self.support() {
                    let phase = tau
                        * (kx as f64 * z[0] as f64 / dims[0] as f64
                            + ky as f64 * z[1] as f64 / dims[1] as f64);
                    re += w * phase.cos();
                    im += w * phase.sin();
                }
                debug_assert!(im.abs() < 1e-10, "asymmetric kernel: imag {im} at k=({kx},{ky})");
                values.push(re);
            }
        }
        Ok(FourierCoeffs { dims: Some(dims), k_max: [kx_max, ky_max], values })
    }
}

/// Real Fourier coefficients `Jhat(k)` of a symmetric kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoeffs {
    /// Grid dims when computed from a lattice transform (modes wrap);
    /// `None` for quadrature coefficients at fixed wavenumbers.
    dims: Option<[usize; 2]>,
    k_max: [usize; 2],
    values: Vec<f64>,
}

impl FourierCoeffs {
    /// Coefficient at a (possibly negative) 1-D mode index.
    #[inline]
    pub fn at(&self, k: i64) -> f64 {
        self.at2([k, 0])
    }

    /// Coefficient at a 2-D mode; symmetry `Jhat(k) = Jhat(-k)` and, for
    /// grid transforms, periodicity in the mode index are applied.
    pub fn at2(&self, k: [i64; 2]) -> f64 {
        let fold = |k: i64, axis: usize| -> usize {
            let k = match self.dims {
                Some(d) => {
                    let n = d[axis] as i64;
                    let m = k.rem_euclid(n);
                    if m > n / 2 {
                        m - n
                    } else {
                        m
                    }
                }
                None => k,
            };
            k.unsigned_abs() as usize
        };
        let (ix, iy) = (fold(k[0], 0), fold(k[1], 1));
        assert!(
            ix <= self.k_max[0] && iy <= self.k_max[1],
            "mode ({},{}) beyond stored cutoff {:?}",
            k[0],
            k[1],
            self.k_max
        );
        self.values[iy * (self.k_max[0] + 1) + ix]
    }

    pub fn k_max(&self) -> usize {
        self.k_max[0]
    }
}

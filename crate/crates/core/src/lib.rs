//! Spatial evolutionary game dynamics across three model tiers.
//!
//! The crate simulates populations of agents on a lattice who revise their
//! strategies in a normal-form game after sampling neighbors through a
//! long-range (Kac) interaction kernel, and provides the deterministic
//! equations that approximate those processes:
//!
//! * [`micro`] — exact event-driven simulation of the continuous-time Markov
//!   process on periodic or fixed-boundary lattices,
//! * [`ide`] — the mesoscopic integro-differential equations solved on 1-D
//!   and 2-D grids (nonlocal convolution via FFT),
//! * [`meanfield`] — the aggregate (lumped) Markov chain for uniform
//!   interactions and the classical mean-field ODEs,
//! * [`stability`] — homogeneous stationary solutions, dispersion relations
//!   and exact solutions of the linearized equations.
//!
//! [`game`], [`rates`] and [`kernel`] hold the shared vocabulary: payoff
//! matrices, strategy-revision rate rules, and interaction kernels with
//! their discretizations and Fourier coefficients.

pub mod error;
pub mod field;
pub mod fft;
pub mod game;
pub mod grid;
pub mod ide;
pub mod kernel;
pub mod meanfield;
pub mod micro;
pub mod rates;
pub mod response;
pub mod rng;
pub mod stability;

pub use error::Error;
pub use field::DensityField;
pub use game::{CoordinationParams, Game};
pub use grid::{Boundary, SpatialGrid};
pub use ide::{Dynamic, IdeSystem, Kappa};
pub use kernel::{DiscreteKernel, FourierCoeffs, Kernel};
pub use rates::RateRule;
pub use response::ResponseFunction;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors shared by all model tiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a coordination game: {0}")]
    NotACoordinationGame(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error(
        "kernel support ({support} sites) exceeds half the torus ({half} sites); \
         wraparound would double-count interactions"
    )]
    SupportExceedsTorus { support: usize, half: usize },

    #[error("grid too coarse for kernel: {samples} samples across support, need at least 5")]
    ResolutionTooCoarse { samples: usize },

    #[error("fourier coefficients require a periodic grid")]
    NonPeriodicGrid,

    #[error("profile is not simplex-valued at node {node}: sum = {sum}")]
    ProfileNotSimplex { node: usize, sum: f64 },

    #[error("negative end time: {0}")]
    NegativeTime(f64),

    #[error("simplex violation of {drift:.3e} at step {step} (t = {time}); integration unstable")]
    SimplexViolation { step: usize, time: f64, drift: f64 },

    #[error("dynamic/game mismatch: {0}")]
    DynamicMismatch(String),

    #[error("p0 = {p0} is not a stationary root: residual {residual:.3e}")]
    NotAStationaryRoot { p0: f64, residual: f64 },

    #[error("dispersion cross-check failed at k = {k}: closed form {closed}, general {general}")]
    DispersionMismatch { k: i64, closed: f64, general: f64 },

    #[error("{0}")]
    Config(String),
}

//! Experiment layer on top of the `gamefields` crate: configuration
//! files, run orchestration, persistence (snapshots, CSV tables,
//! manifests with content hashes) and plot emission.

pub mod config;
pub mod experiments;
pub mod manifest;
pub mod metrics;
pub mod plot;
pub mod snapshot;
pub mod stats;

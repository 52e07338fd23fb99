//! Spatiotemporal clustering of gridded daily temperature data.
//!
//! Two methods are provided over the same per-cell annual-mean inputs:
//! centroid-based k-means ([`kmeans`]) and a watershed/frequent-focus
//! core miner ([`mistic`]). [`analysis`] compares the resulting labelings
//! and summarizes clusters against terrain.
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common `f64` instantiations.

pub mod analysis;
pub mod error;
pub mod grid;
mod hungarian;
pub mod ingest;
pub mod kmeans;
pub mod mistic;
pub mod scalar;
pub mod synth;
pub mod zones;

pub use error::{Error, Result};
pub use grid::{CalendarSpec, CellIndex, GridGeometry, GridMode, Units};
pub use scalar::Scalar;
pub use zones::ZoneMap;

pub type ScalarField = grid::ScalarField<f64>;
pub type ScalarField32 = grid::ScalarField<f32>;
pub type DailySeriesGrid = ingest::DailySeriesGrid<f64>;
pub type DailySeriesGrid32 = ingest::DailySeriesGrid<f32>;
pub type AnnualMeanStack = ingest::AnnualMeanStack<f64>;
pub type AnnualMeanStack32 = ingest::AnnualMeanStack<f32>;
pub type FeatureMatrix = kmeans::FeatureMatrix<f64>;
pub type ClusterMap = kmeans::ClusterMap<f64>;
pub type FocusPoint = mistic::FocusPoint<f64>;
pub type MisticResult = mistic::MisticResult<f64>;

/// Exact recurrence frequency (`count / total_years`).
pub type Frequency = num_rational::Ratio<u32>;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use stclust_core::kmeans::{DEFAULT_MAX_ITER, DEFAULT_RESTARTS};
use stclust_core::mistic::{DEFAULT_MIN_YEARS, DEFAULT_THETA_DOM, DEFAULT_THETA_HIGH};

use crate::svg::DEFAULT_CELL_PX;

#[derive(Debug, Parser)]
#[command(
    name = "stclust",
    version,
    about = "Spatio-temporal clustering of gridded daily temperature data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a dataset directory and list every problem found.
    Validate(ValidateArgs),
    /// Cluster annual-mean series with k-means for one or more k.
    Kmeans(KmeansArgs),
    /// Yearly watershed zones, recurring foci, cores and the consensus map.
    Mistic(MisticArgs),
    /// Agreement between two label files plus per-cluster summaries.
    Compare(CompareArgs),
    /// Draw a label file as an SVG map.
    Render(RenderArgs),
    /// Write the synthetic demo dataset with two planted recurring maxima.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ValidateArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Also write `validation.json` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KmeansArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Comma-separated cluster counts.
    #[arg(long, value_delimiter = ',', default_value = "8,10,12")]
    pub k: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1.0)]
    pub min_valid_fraction: f64,
    #[arg(long, default_value_t = DEFAULT_CELL_PX)]
    pub cell_px: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationArg {
    Maxima,
    Minima,
    /// Minima when the variable name contains "min", otherwise maxima.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Cc,
    Cr,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MisticArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = OrientationArg::Auto)]
    pub orientation: OrientationArg,
    #[arg(long, default_value_t = DEFAULT_MIN_YEARS)]
    pub min_years: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Cc)]
    pub mode: ModeArg,
    /// Chebyshev grouping radius in cells; required with `--mode cr`.
    #[arg(long)]
    pub radius: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_THETA_HIGH)]
    pub theta_high: f64,
    #[arg(long, default_value_t = DEFAULT_THETA_DOM)]
    pub theta_dom: f64,
    #[arg(long, default_value_t = 1.0)]
    pub min_valid_fraction: f64,
    #[arg(long, default_value_t = DEFAULT_CELL_PX)]
    pub cell_px: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    /// First label file (`row,col,label`).
    pub a: PathBuf,
    /// Second label file.
    pub b: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Dataset the labels were computed from; supplies the grid and value statistics.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Elevation grid in meters; needs `--dataset`.
    #[arg(long, requires = "dataset")]
    pub elevation: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub min_valid_fraction: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RenderArgs {
    /// Label file to draw.
    pub labels: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Take the grid from this dataset instead of the label file's run_meta.json.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long, default_value_t = DEFAULT_CELL_PX)]
    pub cell_px: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2023)]
    pub seed: u64,
    /// Grid rows and columns.
    #[arg(long, default_value_t = 31)]
    pub size: usize,
    #[arg(long, default_value_t = 31)]
    pub years: usize,
    /// Years in which the second maximum sits on its home cell.
    #[arg(long, default_value_t = 15)]
    pub b_years: usize,
}

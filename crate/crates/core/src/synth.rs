//! Synthetic daily temperature datasets with planted recurring extrema.
//!
//! Two bumps are planted on a smooth background: bump A sits at the same
//! cell every year, bump B sits at its home cell only in some years and one
//! cell away otherwise. Each year one bump is slightly taller than the
//! other.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::Result;
use crate::grid::{days_in_year, CalendarSpec, CellIndex, GridGeometry, GridMode, ScalarField, Units};
use crate::ingest::{DailySeriesGrid, YearSeries};
use crate::zones::ZoneMap;

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedConfig {
    pub variable: String,
    pub nrows: usize,
    pub ncols: usize,
    pub first_year: i32,
    pub years: usize,
    pub calendar: CalendarSpec,
    pub units: Units,
    /// Peak height of each bump above the background.
    pub amplitude: f64,
    /// Daily noise standard deviation as a fraction of `amplitude`.
    pub noise_fraction: f64,
    /// Years in which bump B sits exactly on its home cell.
    pub b_years: usize,
    /// Relative height swing: each year one bump is scaled by `1 + swing`, the other by `1 - swing`.
    pub swing: f64,
    pub seed: u64,
}

impl Default for PlantedConfig {
    fn default() -> Self {
        Self {
            variable: "tmax".into(),
            nrows: 31,
            ncols: 31,
            first_year: 1989,
            years: 31,
            calendar: CalendarSpec::Fixed360,
            units: Units::Celsius,
            amplitude: 10.0,
            noise_fraction: 0.1,
            b_years: 15,
            swing: 0.1,
            seed: 2023,
        }
    }
}

impl PlantedConfig {
    pub fn bump_a(&self) -> CellIndex {
        CellIndex::new(self.nrows / 4, self.ncols / 4)
    }

    pub fn bump_b(&self) -> CellIndex {
        CellIndex::new(self.nrows - 1 - self.nrows / 4, self.ncols - 1 - self.ncols / 4)
    }

    pub fn geometry(&self) -> Result<GridGeometry> {
        GridGeometry::new(GridMode::Geographic, 6.5, 66.5, 1.0, 1.0, self.nrows, self.ncols)
    }
}

#[derive(Debug, Clone)]
pub struct PlantedDataset {
    pub series: DailySeriesGrid<f64>,
    pub elevation: ScalarField<f64>,
    /// Cells nearer bump A's home are 0, the rest 1.
    pub truth: ZoneMap,
    /// Years in which bump B sat on its home cell.
    pub b_present: Vec<i32>,
}

fn dist(a: CellIndex, r: f64, c: f64) -> f64 {
    ((a.row as f64 - r).powi(2) + (a.col as f64 - c).powi(2)).sqrt()
}

const JITTER: [(isize, isize); 8] = [(-1, 0), (0, 1), (1, 0), (0, -1), (-1, -1), (-1, 1), (1, 1), (1, -1)];

pub fn planted_dataset(cfg: &PlantedConfig) -> Result<PlantedDataset> {
    let g = cfg.geometry()?;
    let (a, b) = (cfg.bump_a(), cfg.bump_b());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut order: Vec<usize> = (0..cfg.years).collect();
    order.shuffle(&mut rng);
    let mut present = vec![false; cfg.years];
    for &y in order.iter().take(cfg.b_years.min(cfg.years)) {
        present[y] = true;
    }
    // one bump a little taller than the other
    let heights: Vec<(f64, f64)> = (0..cfg.years)
        .map(|_| {
            if rng.random::<bool>() {
                (1.0 + cfg.swing, 1.0 - cfg.swing)
            } else {
                (1.0 - cfg.swing, 1.0 + cfg.swing)
            }
        })
        .collect();
    let year_seeds: Vec<u64> = (0..cfg.years).map(|_| rng.random()).collect();

    let decay = cfg.nrows.max(cfg.ncols) as f64 / 2.5;
    let offset = match cfg.units {
        Units::Kelvin => 273.15,
        _ => 0.0,
    };
    let background = 24.0 + offset;

    let mut jitter_slot = 0usize;
    let b_centres: Vec<(f64, f64)> = (0..cfg.years)
        .map(|y| {
            if present[y] {
                (b.row as f64, b.col as f64)
            } else {
                let (dr, dc) = JITTER[jitter_slot % JITTER.len()];
                jitter_slot += 1;
                (b.row as f64 + dr as f64, b.col as f64 + dc as f64)
            }
        })
        .collect();

    let sigma = cfg.noise_fraction * cfg.amplitude;
    let years: Vec<YearSeries<f64>> = (0..cfg.years)
        .into_par_iter()
        .map(|y| {
            let year = cfg.first_year + y as i32;
            let ndays = days_in_year(cfg.calendar, year);
            let (br, bc) = b_centres[y];
            let (ha, hb) = heights[y];
            let signal: Vec<f64> = g
                .cells()
                .map(|cell| {
                    background
                        + ha * cfg.amplitude * (-dist(cell, a.row as f64, a.col as f64) / decay).exp()
                        + hb * cfg.amplitude * (-dist(cell, br, bc) / decay).exp()
                })
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(year_seeds[y]);
            let noise = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE)).expect("finite sigma");
            let mut values = Vec::with_capacity(ndays * g.len());
            for d in 0..ndays {
                let season = 6.0 * (std::f64::consts::TAU * d as f64 / ndays as f64).sin();
                for &s in &signal {
                    let v = s + season + noise.sample(&mut rng);
                    values.push((v * 1000.0).round() / 1000.0);
                }
            }
            YearSeries::from_flat(year, g.len(), values)
        })
        .collect::<Result<_>>()?;
    let series = DailySeriesGrid::new(cfg.variable.clone(), g, cfg.calendar, cfg.units, years)?;

    let elevation = ScalarField::from_fn(g, Units::Meters, |cell| {
        let da = dist(cell, a.row as f64, a.col as f64);
        (250.0 + 2600.0 * (-(da / 5.0).powi(2)).exp() + 15.0 * cell.col as f64).round()
    })?;
    let truth = ZoneMap::from_entries(
        g,
        g.cells().map(|cell| {
            let da = dist(cell, a.row as f64, a.col as f64);
            let db = dist(cell, b.row as f64, b.col as f64);
            (cell, u32::from(db < da))
        }),
    )?;
    let b_present = (0..cfg.years)
        .filter(|&y| present[y])
        .map(|y| cfg.first_year + y as i32)
        .collect();
    Ok(PlantedDataset {
        series,
        elevation,
        truth,
        b_present,
    })
}

//! JSON report layouts.

use serde::Serialize;
use stclust_core::kmeans::{ClusterMap, Convergence};
use stclust_core::mistic::{Core, DominanceThresholds, MisticParams, MisticResult};
use stclust_core::CellIndex;

/// `"count/total"` unreduced, plus its value.
fn ratio(count: u32, total: u32) -> (String, f64) {
    (format!("{count}/{total}"), f64::from(count) / f64::from(total))
}

#[derive(Debug, Serialize)]
pub struct KmeansRun {
    pub k: usize,
    pub inertia: f64,
    pub iterations: usize,
    /// Seed of the restart that was kept.
    pub seed: u64,
    pub convergence: Convergence,
    pub cluster_sizes: Vec<usize>,
}

impl KmeansRun {
    pub fn new(map: &ClusterMap<f64>) -> Self {
        let mut cluster_sizes = vec![0; map.k];
        for (_, l) in map.zones.entries() {
            cluster_sizes[l as usize] += 1;
        }
        Self {
            k: map.k,
            inertia: map.inertia,
            iterations: map.iterations,
            seed: map.seed,
            convergence: map.convergence,
            cluster_sizes,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct KmeansReport {
    pub variable: String,
    pub years: Vec<i32>,
    pub cells: usize,
    pub features: &'static str,
    pub standardized: bool,
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    pub runs: Vec<KmeansRun>,
}

#[derive(Debug, Serialize)]
pub struct FocusEntry {
    pub row: usize,
    pub col: usize,
    pub count: u32,
    pub frequency: String,
    pub frequency_value: f64,
    pub frequent: bool,
}

#[derive(Debug, Serialize)]
pub struct YearFocus {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct YearFoci {
    pub year: i32,
    pub foci: Vec<YearFocus>,
}

#[derive(Debug, Serialize)]
pub struct FociReport {
    pub total_years: u32,
    pub min_years: u32,
    pub frequent_count: usize,
    pub foci: Vec<FocusEntry>,
    pub years: Vec<YearFoci>,
}

impl FociReport {
    pub fn new(result: &MisticResult<f64>) -> Self {
        let t = &result.table;
        let foci: Vec<FocusEntry> = t
            .iter()
            .map(|(cell, count)| {
                let (frequency, frequency_value) = ratio(count, t.total_years());
                FocusEntry {
                    row: cell.row,
                    col: cell.col,
                    count,
                    frequency,
                    frequency_value,
                    frequent: t.is_frequent(cell),
                }
            })
            .collect();
        let years = result
            .years
            .iter()
            .zip(&result.yearly_foci)
            .map(|(&year, foci)| YearFoci {
                year,
                foci: foci
                    .iter()
                    .map(|f| YearFocus {
                        row: f.cell.row,
                        col: f.cell.col,
                        value: f.value,
                    })
                    .collect(),
            })
            .collect();
        Self {
            total_years: t.total_years(),
            min_years: t.min_years(),
            frequent_count: t.frequent_cells().len(),
            foci,
            years,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CoreMemberEntry {
    pub row: usize,
    pub col: usize,
    pub count: u32,
    pub frequency: String,
    pub frequency_value: f64,
}

#[derive(Debug, Serialize)]
pub struct CoreEntry {
    pub id: u32,
    pub class: &'static str,
    pub representative: CellIndex,
    pub members: Vec<CoreMemberEntry>,
    pub extent_size: usize,
}

impl CoreEntry {
    fn new(core: &Core, total_years: u32) -> Self {
        Self {
            id: core.id,
            class: core.dominance.code(),
            representative: core.representative(),
            members: core
                .members
                .iter()
                .map(|m| {
                    let (frequency, frequency_value) = ratio(m.count, total_years);
                    CoreMemberEntry {
                        row: m.cell.row,
                        col: m.cell.col,
                        count: m.count,
                        frequency,
                        frequency_value,
                    }
                })
                .collect(),
            extent_size: core.extent.len(),
        }
    }
}

/// Radius 1 is reported as `cc`, since it groups exactly the 8-adjacent foci.
#[derive(Debug, Serialize)]
pub struct CoresReport {
    pub mode: &'static str,
    pub radius: Option<usize>,
    pub total_years: u32,
    pub min_years: u32,
    pub thresholds: DominanceThresholds,
    pub notices: Vec<String>,
    pub cores: Vec<CoreEntry>,
}

impl CoresReport {
    pub fn new(result: &MisticResult<f64>, params: &MisticParams) -> Self {
        let mode = params.mode.canonical();
        Self {
            mode: mode.tag(),
            radius: mode.radius(),
            total_years: result.table.total_years(),
            min_years: result.table.min_years(),
            thresholds: params.thresholds,
            notices: result.notices.clone(),
            cores: result
                .cores
                .iter()
                .map(|c| CoreEntry::new(c, result.table.total_years()))
                .collect(),
        }
    }
}

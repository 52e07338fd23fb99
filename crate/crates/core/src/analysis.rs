//! Agreement between two labelings and per-cluster terrain/value summaries.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::ScalarField;
use crate::hungarian;
use crate::ingest::AnnualMeanStack;
use crate::scalar::Scalar;
use crate::zones::ZoneMap;

/// Mean-elevation bands reported for each set of clusters, in meters.
pub const LOW_ELEVATION_M: f64 = 1500.0;
pub const HIGH_ELEVATION_M: f64 = 2000.0;

/// Cell counts per `(label in A, label in B)` over cells labeled in both maps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContingencyTable {
    pub rows: Vec<u32>,
    pub cols: Vec<u32>,
    pub counts: Vec<Vec<u64>>,
    pub total: u64,
    /// Cells labeled only in A / only in B; excluded from the counts.
    pub only_a: u64,
    pub only_b: u64,
    pub warnings: Vec<String>,
}

impl ContingencyTable {
    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        (0..self.cols.len())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }
}

pub fn contingency(a: &ZoneMap, b: &ZoneMap) -> Result<ContingencyTable> {
    if a.geometry() != b.geometry() {
        let (ga, gb) = (a.geometry(), b.geometry());
        return Err(Error::Shape(format!(
            "label maps differ in geometry ({}x{} vs {}x{})",
            ga.nrows, ga.ncols, gb.nrows, gb.ncols
        )));
    }
    let mut pairs: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    let (mut only_a, mut only_b) = (0u64, 0u64);
    for (la, lb) in a.labels().iter().zip(b.labels()) {
        match (la, lb) {
            (Some(x), Some(y)) => *pairs.entry((*x, *y)).or_insert(0) += 1,
            (Some(_), None) => only_a += 1,
            (None, Some(_)) => only_b += 1,
            (None, None) => {}
        }
    }
    let rows: Vec<u32> = {
        let mut v: Vec<u32> = pairs.keys().map(|k| k.0).collect();
        v.dedup();
        v
    };
    let cols: Vec<u32> = {
        let mut v: Vec<u32> = pairs.keys().map(|k| k.1).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut counts = vec![vec![0u64; cols.len()]; rows.len()];
    for (&(x, y), &n) in &pairs {
        let i = rows.binary_search(&x).expect("row label present");
        let j = cols.binary_search(&y).expect("col label present");
        counts[i][j] = n;
    }
    let total = pairs.values().sum();
    let mut warnings = Vec::new();
    if total == 0 {
        warnings.push("the two maps share no labeled cells".to_string());
    }
    Ok(ContingencyTable {
        rows,
        cols,
        counts,
        total,
        only_a,
        only_b,
        warnings,
    })
}

fn pairs_of(n: u64) -> f64 {
    (n as f64) * (n.saturating_sub(1) as f64) / 2.0
}

/// Adjusted Rand index of the two partitions in `table`.
///
/// Identical partitions (up to relabeling) give exactly 1; when the maximum
/// index equals its expectation the value is defined as 0.
pub fn adjusted_rand(table: &ContingencyTable) -> Result<f64> {
    if table.total < 2 {
        return Err(Error::EmptyDomain(format!(
            "adjusted Rand index needs at least 2 jointly labeled cells, got {}",
            table.total
        )));
    }
    let index: f64 = table.counts.iter().flatten().map(|&n| pairs_of(n)).sum();
    let sum_a: f64 = table.row_sums().into_iter().map(pairs_of).sum();
    let sum_b: f64 = table.col_sums().into_iter().map(pairs_of).sum();
    let expected = sum_a * sum_b / pairs_of(table.total);
    let max = 0.5 * (sum_a + sum_b);
    if max == expected {
        return Ok(0.0);
    }
    Ok((index - expected) / (max - expected))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JaccardMatch {
    /// `None` when the B label has no partner.
    pub a: Option<u32>,
    /// `None` when the A label has no partner.
    pub b: Option<u32>,
    pub jaccard: f64,
}

/// One-to-one matching of A and B labels maximizing total Jaccard overlap.
///
/// Matched pairs come first in A-label order, then unmatched A labels, then
/// unmatched B labels, each with score 0.
pub fn matched_jaccard(table: &ContingencyTable) -> Vec<JaccardMatch> {
    let ra = table.row_sums();
    let cb = table.col_sums();
    let jac: Vec<Vec<f64>> = table
        .counts
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &n)| {
                    let union = ra[i] + cb[j] - n;
                    if union == 0 {
                        0.0
                    } else {
                        n as f64 / union as f64
                    }
                })
                .collect()
        })
        .collect();
    let assignment = hungarian::maximize(&jac);
    let mut out = Vec::new();
    let mut used_b = vec![false; table.cols.len()];
    for (i, j) in assignment.iter().enumerate() {
        if let Some(j) = *j {
            used_b[j] = true;
            out.push(JaccardMatch {
                a: Some(table.rows[i]),
                b: Some(table.cols[j]),
                jaccard: jac[i][j],
            });
        }
    }
    for (i, j) in assignment.iter().enumerate() {
        if j.is_none() {
            out.push(JaccardMatch {
                a: Some(table.rows[i]),
                b: None,
                jaccard: 0.0,
            });
        }
    }
    for (j, used) in used_b.iter().enumerate() {
        if !used {
            out.push(JaccardMatch {
                a: None,
                b: Some(table.cols[j]),
                jaccard: 0.0,
            });
        }
    }
    out
}

/// Contingency table, ARI and matched Jaccard scores for two labelings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub contingency: ContingencyTable,
    pub adjusted_rand: Option<f64>,
    pub matches: Vec<JaccardMatch>,
    pub mean_matched_jaccard: Option<f64>,
}

pub fn compare(a: &ZoneMap, b: &ZoneMap) -> Result<ComparisonReport> {
    let contingency = contingency(a, b)?;
    let adjusted_rand = (contingency.total >= 2)
        .then(|| adjusted_rand(&contingency))
        .transpose()?;
    let matches = matched_jaccard(&contingency);
    let mean_matched_jaccard =
        (!matches.is_empty()).then(|| matches.iter().map(|m| m.jaccard).sum::<f64>() / matches.len() as f64);
    Ok(ComparisonReport {
        contingency,
        adjusted_rand,
        matches,
        mean_matched_jaccard,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterSummary {
    pub label: u32,
    pub cells: usize,
    pub mean_elevation_m: Option<f64>,
    pub mean_slope_deg: Option<f64>,
    pub value_min: Option<f64>,
    pub value_mean: Option<f64>,
    pub value_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryReport {
    pub clusters: Vec<ClusterSummary>,
    pub labeled_cells: usize,
    pub low_elevation_m: f64,
    pub high_elevation_m: f64,
    /// Share of clusters (with terrain) whose mean elevation is below the low band.
    pub fraction_below_low: Option<f64>,
    /// Share of clusters (with terrain) whose mean elevation is above the high band.
    pub fraction_above_high: Option<f64>,
}

#[derive(Default)]
struct Running {
    n: usize,
    sum: f64,
    min: f64,
    max: f64,
}

impl Running {
    fn push(&mut self, v: f64) {
        if self.n == 0 {
            self.min = v;
            self.max = v;
        } else {
            self.min = self.min.min(v);
            self.max = self.max.max(v);
        }
        self.n += 1;
        self.sum += v;
    }

    fn mean(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum / self.n as f64)
    }
}

/// Per-cluster terrain means and value statistics over all stack years.
pub fn cluster_summary<T: Scalar>(
    map: &ZoneMap,
    elevation: Option<&ScalarField<T>>,
    slope: Option<&ScalarField<T>>,
    stack: Option<&AnnualMeanStack<T>>,
) -> Result<SummaryReport> {
    let g = map.geometry();
    let mismatch = |what: &str| Error::Shape(format!("{what} grid differs from the label map"));
    if elevation.is_some_and(|e| e.geometry() != g) {
        return Err(mismatch("elevation"));
    }
    if slope.is_some_and(|s| s.geometry() != g) {
        return Err(mismatch("slope"));
    }
    if stack.is_some_and(|s| s.geometry() != g) {
        return Err(mismatch("annual stack"));
    }

    let mut by_label: BTreeMap<u32, (usize, Running, Running, Running)> = BTreeMap::new();
    for (cell, label) in map.entries() {
        let entry = by_label.entry(label).or_default();
        entry.0 += 1;
        if let Some(v) = elevation.and_then(|e| e.get(cell)) {
            entry.1.push(v.as_f64());
        }
        if let Some(v) = slope.and_then(|s| s.get(cell)) {
            entry.2.push(v.as_f64());
        }
        if let Some(stack) = stack {
            for f in stack.fields() {
                if let Some(v) = f.get(cell) {
                    entry.3.push(v.as_f64());
                }
            }
        }
    }
    let clusters: Vec<ClusterSummary> = by_label
        .into_iter()
        .map(|(label, (cells, elev, slope, vals))| ClusterSummary {
            label,
            cells,
            mean_elevation_m: elev.mean(),
            mean_slope_deg: slope.mean(),
            value_min: (vals.n > 0).then_some(vals.min),
            value_mean: vals.mean(),
            value_max: (vals.n > 0).then_some(vals.max),
        })
        .collect();
    let with_terrain: Vec<f64> = clusters.iter().filter_map(|c| c.mean_elevation_m).collect();
    let share = |pred: &dyn Fn(f64) -> bool| {
        (!with_terrain.is_empty())
            .then(|| with_terrain.iter().filter(|&&e| pred(e)).count() as f64 / with_terrain.len() as f64)
    };
    Ok(SummaryReport {
        labeled_cells: map.labeled_count(),
        fraction_below_low: share(&|e| e < LOW_ELEVATION_M),
        fraction_above_high: share(&|e| e > HIGH_ELEVATION_M),
        low_elevation_m: LOW_ELEVATION_M,
        high_elevation_m: HIGH_ELEVATION_M,
        clusters,
    })
}

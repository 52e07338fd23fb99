//! Lloyd's k-means over per-cell annual-mean series.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{CellIndex, GridGeometry};
use crate::ingest::AnnualMeanStack;
use crate::scalar::Scalar;
use crate::zones::ZoneMap;

pub const DEFAULT_MAX_ITER: usize = 300;
pub const DEFAULT_RESTARTS: usize = 10;

const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

/// One feature vector per valid cell, stored row-major (`cells.len() x dim`).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T> {
    geometry: GridGeometry,
    cells: Vec<CellIndex>,
    dim: usize,
    data: Vec<T>,
    means: Vec<T>,
    scales: Vec<T>,
}

impl<T: Scalar> FeatureMatrix<T> {
    /// Wraps raw vectors with an identity standardization record.
    pub fn from_rows(geometry: GridGeometry, cells: Vec<CellIndex>, rows: Vec<Vec<T>>) -> Result<Self> {
        if cells.len() != rows.len() {
            return Err(Error::Shape(format!(
                "{} cells for {} vectors",
                cells.len(),
                rows.len()
            )));
        }
        if rows.is_empty() {
            return Err(Error::EmptyDomain("no feature vectors".into()));
        }
        let dim = rows[0].len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Shape("feature vectors must share a non-zero length".into()));
        }
        for c in &cells {
            geometry.check(*c)?;
        }
        Ok(Self {
            geometry,
            cells,
            dim,
            data: rows.into_iter().flatten().collect(),
            means: vec![T::zero(); dim],
            scales: vec![T::one(); dim],
        })
    }

    /// 1-D features laid out along a single grid row; handy for small examples.
    pub fn from_points(points: &[T]) -> Result<Self> {
        let g = GridGeometry::planar(1, points.len().max(1), 1.0)?;
        let cells = (0..points.len()).map(|c| CellIndex::new(0, c)).collect();
        Self::from_rows(g, cells, points.iter().map(|&p| vec![p]).collect())
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn cells(&self) -> &[CellIndex] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn means(&self) -> &[T] {
        &self.means
    }

    pub fn scales(&self) -> &[T] {
        &self.scales
    }
}

/// One vector per cell valid in every year; component `j` is year `j`'s mean.
///
/// With `standardize`, each component is z-scored across cells; a component
/// with no spread gets scale 1 and becomes all zeros.
pub fn build_features<T: Scalar>(stack: &AnnualMeanStack<T>, standardize: bool) -> Result<FeatureMatrix<T>> {
    let g = *stack.geometry();
    let cells: Vec<CellIndex> = g.cells().filter(|&c| stack.mask()[g.index(c)]).collect();
    if cells.is_empty() {
        return Err(Error::EmptyDomain("no cell is valid in every year".into()));
    }
    let rows: Vec<Vec<T>> = cells
        .iter()
        .map(|&c| {
            stack
                .fields()
                .iter()
                .map(|f| f.get(c).expect("combined mask implies validity"))
                .collect()
        })
        .collect();
    let mut fm = FeatureMatrix::from_rows(g, cells, rows)?;
    if standardize {
        let n = T::lit(fm.len() as f64);
        for j in 0..fm.dim {
            let column = || (0..fm.len()).map(|i| fm.data[i * fm.dim + j]);
            let lo = column().fold(T::infinity(), T::min);
            let hi = column().fold(T::neg_infinity(), T::max);
            let (mean, scale) = if lo == hi {
                (lo, T::one())
            } else {
                let mean = column().sum::<T>() / n;
                let var = column().map(|v| (v - mean) * (v - mean)).sum::<T>() / n;
                let sd = var.sqrt();
                (mean, if sd > T::zero() { sd } else { T::one() })
            };
            for i in 0..fm.len() {
                let v = &mut fm.data[i * fm.dim + j];
                *v = (*v - mean) / scale;
            }
            fm.means[j] = mean;
            fm.scales[j] = scale;
        }
    }
    Ok(fm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Convergence {
    /// Assignment identical to the previous iteration.
    Stable,
    /// Inertia improved by less than the tolerance.
    Tolerance,
    /// Iteration budget exhausted.
    MaxIter,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterMap<T> {
    pub zones: ZoneMap,
    pub k: usize,
    pub centroids: Vec<Vec<T>>,
    pub inertia: T,
    pub iterations: usize,
    pub seed: u64,
    pub convergence: Convergence,
    /// Inertia after each iteration's centroid update.
    pub inertia_history: Vec<T>,
}

#[inline]
fn sq_dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

/// Nearest centroid, ties to the lowest id.
fn nearest<T: Scalar>(x: &[T], centroids: &[Vec<T>]) -> (u32, T) {
    let mut best = (0u32, sq_dist(x, &centroids[0]));
    for (j, c) in centroids.iter().enumerate().skip(1) {
        let d = sq_dist(x, c);
        if d < best.1 {
            best = (j as u32, d);
        }
    }
    best
}

fn kmeans_plus_plus<T: Scalar>(fm: &FeatureMatrix<T>, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<T>> {
    let n = fm.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centroids = vec![fm.row(first).to_vec()];
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(fm.row(i), fm.row(first)).as_f64()).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if w > 0.0 && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            // Rounding can leave `target` at the very top of the range.
            pick.unwrap_or_else(|| d2.iter().rposition(|&w| w > 0.0).expect("total > 0"))
        } else {
            (0..n).find(|&i| !chosen[i]).expect("k <= n leaves an unchosen point")
        };
        chosen[pick] = true;
        let c = fm.row(pick).to_vec();
        for (i, slot) in d2.iter_mut().enumerate() {
            *slot = slot.min(sq_dist(fm.row(i), &c).as_f64());
        }
        centroids.push(c);
    }
    centroids
}

fn update_centroids<T: Scalar>(fm: &FeatureMatrix<T>, labels: &[u32], k: usize) -> Vec<Vec<T>> {
    let mut sums = vec![vec![T::zero(); fm.dim]; k];
    let mut counts = vec![0usize; k];
    for (i, &l) in labels.iter().enumerate() {
        counts[l as usize] += 1;
        for (s, &x) in sums[l as usize].iter_mut().zip(fm.row(i)) {
            *s = *s + x;
        }
    }
    sums.into_iter()
        .zip(counts)
        .map(|(s, n)| {
            let n = T::lit(n as f64);
            s.into_iter().map(|v| v / n).collect()
        })
        .collect()
}

fn inertia_of<T: Scalar>(fm: &FeatureMatrix<T>, labels: &[u32], centroids: &[Vec<T>]) -> T {
    labels.iter().enumerate().fold(T::zero(), |acc, (i, &l)| {
        acc + sq_dist(fm.row(i), &centroids[l as usize])
    })
}

/// Gives every empty cluster the point farthest from its current centroid,
/// taken from a cluster that can spare one.
fn repair_empty<T: Scalar>(fm: &FeatureMatrix<T>, labels: &mut [u32], dists: &mut [T], centroids: &mut [Vec<T>]) {
    let k = centroids.len();
    let mut counts = vec![0usize; k];
    for &l in labels.iter() {
        counts[l as usize] += 1;
    }
    for j in 0..k {
        if counts[j] > 0 {
            continue;
        }
        let mut far: Option<usize> = None;
        for i in 0..labels.len() {
            if counts[labels[i] as usize] > 1 && far.is_none_or(|f| dists[i] > dists[f]) {
                far = Some(i);
            }
        }
        let i = far.expect("k <= n guarantees a donor cluster");
        counts[labels[i] as usize] -= 1;
        counts[j] = 1;
        labels[i] = j as u32;
        dists[i] = T::zero();
        centroids[j] = fm.row(i).to_vec();
    }
}

/// Lloyd iterations from a k-means++ start.
///
/// Stops when the assignment repeats, when inertia improves by less than
/// `tol`, or after `max_iter` iterations.
pub fn run_kmeans<T: Scalar>(
    fm: &FeatureMatrix<T>,
    k: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<ClusterMap<T>> {
    let n = fm.len();
    if k < 1 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    if k > n {
        return Err(Error::Parameter(format!("k = {k} exceeds the {n} available cells")));
    }
    if max_iter < 1 {
        return Err(Error::Parameter("max_iter must be at least 1".into()));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::Parameter(format!("tol must be non-negative, got {tol}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = kmeans_plus_plus(fm, k, &mut rng);
    let mut labels: Option<Vec<u32>> = None;
    let mut history: Vec<T> = Vec::new();
    let mut convergence = Convergence::MaxIter;
    let mut iterations = 0;

    for it in 1..=max_iter {
        iterations = it;
        let (mut next, mut dists): (Vec<u32>, Vec<T>) =
            (0..n).into_par_iter().map(|i| nearest(fm.row(i), &centroids)).unzip();
        repair_empty(fm, &mut next, &mut dists, &mut centroids);
        centroids = update_centroids(fm, &next, k);
        let inertia = inertia_of(fm, &next, &centroids);
        if let Some(&prev) = history.last() {
            let slack = T::lit(1e-12) * (prev.abs() + T::one());
            debug_assert!(inertia <= prev + slack, "inertia rose from {prev} to {inertia}");
        }
        let improvement = history.last().map(|&p| (p - inertia).as_f64());
        history.push(inertia);
        let stable = labels.as_ref() == Some(&next);
        labels = Some(next);
        if stable {
            convergence = Convergence::Stable;
            break;
        }
        if improvement.is_some_and(|d| d < tol) {
            convergence = Convergence::Tolerance;
            break;
        }
    }

    let labels = labels.expect("at least one iteration ran");
    let g = *fm.geometry();
    let zones = ZoneMap::from_entries(g, fm.cells().iter().copied().zip(labels.iter().copied()))?;
    Ok(ClusterMap {
        zones,
        k,
        inertia: *history.last().expect("history is non-empty"),
        centroids,
        iterations,
        seed,
        convergence,
        inertia_history: history,
    })
}

/// Seed used for restart `r`; restart 0 uses the base seed itself.
pub fn restart_seed(seed: u64, r: usize) -> u64 {
    seed.wrapping_add((r as u64).wrapping_mul(SEED_STRIDE))
}

/// Best-of-`restarts` k-means for each `k`, ascending by `k`.
pub fn sweep_k<T: Scalar>(
    fm: &FeatureMatrix<T>,
    ks: &[usize],
    seed: u64,
    restarts: usize,
    max_iter: usize,
    tol: f64,
) -> Result<Vec<ClusterMap<T>>> {
    if ks.is_empty() {
        return Err(Error::Parameter("no k values requested".into()));
    }
    if restarts < 1 {
        return Err(Error::Parameter("restarts must be at least 1".into()));
    }
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.into_iter()
        .map(|k| {
            let runs = (0..restarts)
                .into_par_iter()
                .map(|r| run_kmeans(fm, k, restart_seed(seed, r), max_iter, tol))
                .collect::<Result<Vec<_>>>()?;
            let best = runs
                .into_iter()
                .reduce(|best, run| if run.inertia < best.inertia { run } else { best })
                .expect("restarts >= 1");
            Ok(best)
        })
        .collect()
}

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::grid::{CellIndex, GridGeometry};

/// Per-cell integer labels over a grid. Masked or unreached cells carry `None`.
///
/// `anchors[label]` is the focus cell that seeded the zone, when the labeling
/// came from a seeded process; k-means maps have no anchors.
#[derive(Debug, Clone, PartialEq)]
pub struct ZoneMap {
    geometry: GridGeometry,
    labels: Vec<Option<u32>>,
    anchors: Vec<CellIndex>,
    unreached: Vec<CellIndex>,
}

impl ZoneMap {
    pub fn new(geometry: GridGeometry, labels: Vec<Option<u32>>, anchors: Vec<CellIndex>) -> Result<Self> {
        if labels.len() != geometry.len() {
            return Err(Error::Shape(format!(
                "expected {} labels, got {}",
                geometry.len(),
                labels.len()
            )));
        }
        if let Some(a) = anchors.iter().find(|a| !geometry.contains(**a)) {
            return Err(Error::OutOfBounds {
                cell: *a,
                nrows: geometry.nrows,
                ncols: geometry.ncols,
            });
        }
        Ok(Self {
            geometry,
            labels,
            anchors,
            unreached: Vec::new(),
        })
    }

    pub fn unlabeled(geometry: GridGeometry) -> Self {
        Self {
            geometry,
            labels: vec![None; geometry.len()],
            anchors: Vec::new(),
            unreached: Vec::new(),
        }
    }

    /// Builds a map from sparse `(cell, label)` entries; other cells stay unlabeled.
    pub fn from_entries(geometry: GridGeometry, entries: impl IntoIterator<Item = (CellIndex, u32)>) -> Result<Self> {
        let mut labels = vec![None; geometry.len()];
        for (cell, label) in entries {
            geometry.check(cell)?;
            labels[geometry.index(cell)] = Some(label);
        }
        Self::new(geometry, labels, Vec::new())
    }

    pub(crate) fn with_unreached(mut self, unreached: Vec<CellIndex>) -> Self {
        self.unreached = unreached;
        self
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn labels(&self) -> &[Option<u32>] {
        &self.labels
    }

    pub fn label(&self, cell: CellIndex) -> Option<u32> {
        self.labels[self.geometry.index(cell)]
    }

    pub fn anchors(&self) -> &[CellIndex] {
        &self.anchors
    }

    pub fn anchor(&self, label: u32) -> Option<CellIndex> {
        self.anchors.get(label as usize).copied()
    }

    /// Valid cells that no seed could reach through the unmasked domain.
    pub fn unreached(&self) -> &[CellIndex] {
        &self.unreached
    }

    pub fn labeled_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }

    /// Distinct labels in ascending order.
    pub fn label_set(&self) -> Vec<u32> {
        self.labels
            .iter()
            .flatten()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Labeled cells in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (CellIndex, u32)> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, l)| l.map(|l| (self.geometry.cell(i), l)))
    }

    pub fn cells_with(&self, label: u32) -> impl Iterator<Item = CellIndex> + '_ {
        self.entries().filter(move |&(_, l)| l == label).map(|(c, _)| c)
    }
}

//! Mining spatio-temporally invariant cores from yearly fields.
//!
//! Each year's field is split into zones by flooding outward from its focus
//! points (local extrema). Focus cells that recur across years are grouped
//! into cores, classified by how dominant their members are, and the yearly
//! zones are folded into one consensus map of core ids.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, VecDeque};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ring, CellIndex, ScalarField};
use crate::ingest::AnnualMeanStack;
use crate::scalar::Scalar;
use crate::zones::ZoneMap;

/// Default theta for highly dominating points.
pub const DEFAULT_THETA_HIGH: f64 = 0.60;
/// Default theta for dominating points: 12 of 31 years.
pub const DEFAULT_THETA_DOM: f64 = 12.0 / 31.0;
/// Default recurrence needed for a focus cell to count as frequent.
pub const DEFAULT_MIN_YEARS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Maxima,
    Minima,
}

impl Orientation {
    /// Minima for minimum-temperature variables (`tmin`, `tasmin`), maxima otherwise.
    pub fn for_variable(name: &str) -> Self {
        if name.to_ascii_lowercase().contains("min") {
            Orientation::Minima
        } else {
            Orientation::Maxima
        }
    }

    /// True when `a` is strictly more extreme than `b`.
    #[inline]
    fn beats<T: Scalar>(self, a: T, b: T) -> bool {
        match self {
            Orientation::Maxima => a > b,
            Orientation::Minima => a < b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FocusPoint<T> {
    pub cell: CellIndex,
    pub year: i32,
    pub value: T,
}

/// Strict local extrema of a field, in row-major order.
///
/// An 8-connected plateau of equal values whose whole boundary is strictly
/// less extreme yields one focus at its smallest `(row, col)`. A plateau that
/// covers every valid cell yields none.
pub fn detect_focus_points<T: Scalar>(
    field: &ScalarField<T>,
    orientation: Orientation,
    year: i32,
) -> Result<Vec<FocusPoint<T>>> {
    let g = *field.geometry();
    let total = field.valid_count();
    if total == 0 {
        return Err(Error::EmptyDomain(format!("year {year}: field has no valid cells")));
    }
    let mask = field.mask();
    let values = field.values();
    let mut seen = vec![false; g.len()];
    let mut foci = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..g.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        let v = values[start];
        let mut size = 0usize;
        let mut extremal = true;
        seen[start] = true;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            size += 1;
            for n in ring(&g, g.cell(i)) {
                let j = g.index(n);
                if !mask[j] {
                    continue;
                }
                let w = values[j];
                if w == v {
                    if !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                } else if !orientation.beats(v, w) {
                    extremal = false;
                }
            }
        }
        if extremal && size < total {
            foci.push(FocusPoint {
                cell: g.cell(start),
                year,
                value: v,
            });
        }
    }
    Ok(foci)
}

struct FloodEntry<T> {
    priority: T,
    cell: CellIndex,
    seq: u64,
    label: u32,
}

impl<T: Scalar> PartialEq for FloodEntry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: Scalar> Eq for FloodEntry<T> {}

impl<T: Scalar> PartialOrd for FloodEntry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for FloodEntry<T> {
    // Max-heap order: most extreme value, then smallest cell, then earliest push.
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .partial_cmp(&other.priority)
            .expect("valid field values are finite")
            .then_with(|| Reverse(self.cell).cmp(&Reverse(other.cell)))
            .then_with(|| Reverse(self.seq).cmp(&Reverse(other.seq)))
    }
}

/// Priority-flood zones grown from `foci`; zone `i` is seeded by `foci[i]`.
///
/// Valid cells that no focus can reach through valid 8-connectivity stay
/// unlabeled and are listed by [`ZoneMap::unreached`].
pub fn watershed_zones<T: Scalar>(
    field: &ScalarField<T>,
    foci: &[FocusPoint<T>],
    orientation: Orientation,
) -> Result<ZoneMap> {
    if foci.is_empty() {
        return Err(Error::Parameter("watershed needs at least one focus".into()));
    }
    let g = *field.geometry();
    let mut seen_anchor = BTreeSet::new();
    for f in foci {
        g.check(f.cell)?;
        if !field.is_valid(f.cell) {
            return Err(Error::Parameter(format!("focus {} lies on a masked cell", f.cell)));
        }
        if !seen_anchor.insert(f.cell) {
            return Err(Error::Parameter(format!("focus {} given twice", f.cell)));
        }
    }
    let priority = |v: T| match orientation {
        Orientation::Maxima => v,
        Orientation::Minima => -v,
    };
    let mut labels: Vec<Option<u32>> = vec![None; g.len()];
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    for (label, f) in foci.iter().enumerate() {
        let value = field.get(f.cell).expect("checked valid");
        heap.push(FloodEntry {
            priority: priority(value),
            cell: f.cell,
            seq,
            label: label as u32,
        });
        seq += 1;
    }
    while let Some(entry) = heap.pop() {
        let i = g.index(entry.cell);
        if labels[i].is_some() {
            continue;
        }
        labels[i] = Some(entry.label);
        for n in ring(&g, entry.cell) {
            let j = g.index(n);
            if labels[j].is_some() {
                continue;
            }
            if let Some(v) = field.get(n) {
                heap.push(FloodEntry {
                    priority: priority(v),
                    cell: n,
                    seq,
                    label: entry.label,
                });
                seq += 1;
            }
        }
    }
    let unreached = g
        .cells()
        .filter(|&c| field.is_valid(c) && labels[g.index(c)].is_none())
        .collect();
    let anchors = foci.iter().map(|f| f.cell).collect();
    Ok(ZoneMap::new(g, labels, anchors)?.with_unreached(unreached))
}

/// Exact-location recurrence counts of focus cells across years.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FocusFrequencyTable {
    total_years: u32,
    min_years: u32,
    counts: BTreeMap<CellIndex, u32>,
}

impl FocusFrequencyTable {
    pub fn total_years(&self) -> u32 {
        self.total_years
    }

    pub fn min_years(&self) -> u32 {
        self.min_years
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, cell: CellIndex) -> Option<u32> {
        self.counts.get(&cell).copied()
    }

    /// `count / total_years`, exact.
    pub fn frequency(&self, cell: CellIndex) -> Option<Ratio<u32>> {
        self.count(cell).map(|c| Ratio::new(c, self.total_years))
    }

    pub fn is_frequent(&self, cell: CellIndex) -> bool {
        self.count(cell).is_some_and(|c| c >= self.min_years)
    }

    /// Observed cells with their counts, row-major.
    pub fn iter(&self) -> impl Iterator<Item = (CellIndex, u32)> + '_ {
        self.counts.iter().map(|(&c, &n)| (c, n))
    }

    pub fn frequent_cells(&self) -> Vec<CellIndex> {
        self.iter()
            .filter(|&(_, n)| n >= self.min_years)
            .map(|(c, _)| c)
            .collect()
    }
}

/// Counts in how many years each cell was a focus.
pub fn mine_frequent_foci<T>(
    yearly_foci: &[Vec<FocusPoint<T>>],
    total_years: u32,
    min_years: u32,
) -> Result<FocusFrequencyTable> {
    if total_years < 1 || min_years < 1 {
        return Err(Error::Parameter(format!(
            "total_years ({total_years}) and min_years ({min_years}) must be at least 1"
        )));
    }
    if yearly_foci.len() > total_years as usize {
        return Err(Error::Parameter(format!(
            "{} years of foci exceed total_years = {total_years}",
            yearly_foci.len()
        )));
    }
    let mut counts = BTreeMap::new();
    for year in yearly_foci {
        let cells: BTreeSet<CellIndex> = year.iter().map(|f| f.cell).collect();
        for c in cells {
            *counts.entry(c).or_insert(0) += 1;
        }
    }
    Ok(FocusFrequencyTable {
        total_years,
        min_years,
        counts,
    })
}

/// How focus cells are grouped into cores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoreMode {
    /// CC: 8-connected focus cells.
    Contiguous,
    /// CR: focus cells within this Chebyshev distance, transitively.
    Radius(usize),
}

impl CoreMode {
    /// Radius 1 is 8-adjacency, so it is reported as contiguous.
    pub fn canonical(self) -> Self {
        match self {
            CoreMode::Radius(1) => CoreMode::Contiguous,
            m => m,
        }
    }

    fn reach(self) -> usize {
        match self {
            CoreMode::Contiguous => 1,
            CoreMode::Radius(r) => r,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            CoreMode::Contiguous => "cc",
            CoreMode::Radius(_) => "cr",
        }
    }

    pub fn radius(self) -> Option<usize> {
        match self {
            CoreMode::Contiguous => None,
            CoreMode::Radius(r) => Some(r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dominance {
    /// Has a highly dominating member.
    #[serde(rename = "CHD")]
    HighlyDominating,
    /// Has a dominating member, none highly dominating.
    #[serde(rename = "CLD")]
    LessDominating,
    /// No dominating member.
    #[serde(rename = "CND")]
    NonDominating,
}

impl Dominance {
    pub fn code(self) -> &'static str {
        match self {
            Dominance::HighlyDominating => "CHD",
            Dominance::LessDominating => "CLD",
            Dominance::NonDominating => "CND",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DominanceThresholds {
    pub theta_high: f64,
    pub theta_dom: f64,
}

impl Default for DominanceThresholds {
    fn default() -> Self {
        Self {
            theta_high: DEFAULT_THETA_HIGH,
            theta_dom: DEFAULT_THETA_DOM,
        }
    }
}

impl DominanceThresholds {
    pub fn validate(&self) -> Result<()> {
        let ok = self.theta_dom > 0.0 && self.theta_dom <= self.theta_high && self.theta_high <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "thresholds need 0 < theta_dom <= theta_high <= 1, got theta_dom = {}, theta_high = {}",
                self.theta_dom, self.theta_high
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoreMember {
    pub cell: CellIndex,
    pub count: u32,
    pub frequency: Ratio<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Core {
    pub id: u32,
    /// Sorted by cell.
    pub members: Vec<CoreMember>,
    pub mode: CoreMode,
    pub dominance: Dominance,
    /// Cells of every yearly zone anchored at a member, sorted.
    pub extent: Vec<CellIndex>,
}

impl Core {
    pub fn contains(&self, cell: CellIndex) -> bool {
        self.members.binary_search_by(|m| m.cell.cmp(&cell)).is_ok()
    }

    pub fn max_frequency(&self) -> Ratio<u32> {
        self.members
            .iter()
            .map(|m| m.frequency)
            .max()
            .expect("cores are non-empty")
    }

    /// Most recurrent member, ties to the smallest cell.
    pub fn representative(&self) -> CellIndex {
        self.members
            .iter()
            .max_by(|a, b| a.count.cmp(&b.count).then(b.cell.cmp(&a.cell)))
            .expect("cores are non-empty")
            .cell
    }

    pub fn chebyshev_to(&self, cell: CellIndex) -> usize {
        self.members
            .iter()
            .map(|m| m.cell.chebyshev(&cell))
            .min()
            .expect("cores are non-empty")
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn meets(frequency: Ratio<u32>, theta: f64) -> bool {
    *frequency.numer() as f64 / *frequency.denom() as f64 >= theta
}

/// Dominance class of a core from its members' recurrence frequencies.
pub fn classify_core(core: &Core, table: &FocusFrequencyTable, thresholds: &DominanceThresholds) -> Result<Dominance> {
    thresholds.validate()?;
    let freqs: Vec<Ratio<u32>> = core.members.iter().filter_map(|m| table.frequency(m.cell)).collect();
    Ok(if freqs.iter().any(|&f| meets(f, thresholds.theta_high)) {
        Dominance::HighlyDominating
    } else if freqs.iter().any(|&f| meets(f, thresholds.theta_dom)) {
        Dominance::LessDominating
    } else {
        Dominance::NonDominating
    })
}

/// Groups every observed focus cell into cores and classifies them.
///
/// Ids run in order of decreasing best member frequency, ties broken by the
/// smallest member cell.
pub fn build_cores(
    table: &FocusFrequencyTable,
    mode: CoreMode,
    yearly_zones: &[ZoneMap],
    thresholds: &DominanceThresholds,
) -> Result<Vec<Core>> {
    if mode == CoreMode::Radius(0) {
        return Err(Error::Parameter("core radius must be at least 1".into()));
    }
    thresholds.validate()?;
    let mode = mode.canonical();
    let cells: Vec<(CellIndex, u32)> = table.iter().collect();
    if cells.is_empty() {
        return Ok(Vec::new());
    }
    let reach = mode.reach();
    let mut parent: Vec<usize> = (0..cells.len()).collect();
    for a in 0..cells.len() {
        for b in a + 1..cells.len() {
            // cells are sorted by row, so later rows only move further away
            if cells[b].0.row > cells[a].0.row + reach {
                break;
            }
            if cells[a].0.chebyshev(&cells[b].0) <= reach {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<CoreMember>> = BTreeMap::new();
    for (i, &(cell, count)) in cells.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(CoreMember {
            cell,
            count,
            frequency: Ratio::new(count, table.total_years()),
        });
    }

    let mut cores: Vec<Core> = groups
        .into_values()
        .map(|members| Core {
            id: 0,
            members,
            mode,
            dominance: Dominance::NonDominating,
            extent: Vec::new(),
        })
        .collect();
    cores.sort_by(|a, b| {
        b.max_frequency()
            .cmp(&a.max_frequency())
            .then(a.members[0].cell.cmp(&b.members[0].cell))
    });

    let mut owner: BTreeMap<CellIndex, usize> = BTreeMap::new();
    for (k, core) in cores.iter_mut().enumerate() {
        core.id = k as u32;
        for m in &core.members {
            owner.insert(m.cell, k);
        }
    }
    let mut extents: Vec<BTreeSet<CellIndex>> = vec![BTreeSet::new(); cores.len()];
    for zones in yearly_zones {
        for (cell, label) in zones.entries() {
            if let Some(&k) = zones.anchor(label).and_then(|a| owner.get(&a)) {
                extents[k].insert(cell);
            }
        }
    }
    for (core, extent) in cores.iter_mut().zip(extents) {
        let mut extent = extent;
        extent.extend(core.members.iter().map(|m| m.cell));
        core.extent = extent.into_iter().collect();
        core.dominance = classify_core(core, table, thresholds)?;
    }
    Ok(cores)
}

/// Per-cell most frequent core across the yearly zone maps.
///
/// A zone maps to the core holding its anchor, or else to the core with the
/// Chebyshev-nearest member (ties to the smaller id). Ties between cores in
/// the vote go to the smaller id.
pub fn consensus_zone_map(yearly_zones: &[ZoneMap], cores: &[Core]) -> Result<ZoneMap> {
    let first = yearly_zones
        .first()
        .ok_or_else(|| Error::Parameter("consensus needs at least one yearly zone map".into()))?;
    if cores.is_empty() {
        return Err(Error::Parameter("consensus needs at least one core".into()));
    }
    let g = *first.geometry();
    if yearly_zones.iter().any(|z| z.geometry() != &g) {
        return Err(Error::Shape("yearly zone maps differ in geometry".into()));
    }
    let core_of = |cell: CellIndex| -> u32 {
        cores
            .iter()
            .find(|c| c.contains(cell))
            .or_else(|| cores.iter().min_by_key(|c| (c.chebyshev_to(cell), c.id)))
            .expect("cores non-empty")
            .id
    };
    let mut votes: Vec<BTreeMap<u32, u32>> = vec![BTreeMap::new(); g.len()];
    for zones in yearly_zones {
        let translation = zones
            .label_set()
            .into_iter()
            .map(|l| {
                zones
                    .anchor(l)
                    .map(|a| (l, core_of(a)))
                    .ok_or_else(|| Error::Parameter(format!("zone {l} has no anchor focus")))
            })
            .collect::<Result<BTreeMap<u32, u32>>>()?;
        for (cell, label) in zones.entries() {
            *votes[g.index(cell)].entry(translation[&label]).or_insert(0) += 1;
        }
    }
    let labels = votes
        .into_iter()
        .map(|v| {
            // ascending ids: keep the first maximum
            v.into_iter()
                .fold(None, |best: Option<(u32, u32)>, (id, n)| match best {
                    Some((_, m)) if m >= n => best,
                    _ => Some((id, n)),
                })
                .map(|(id, _)| id)
        })
        .collect();
    let mut ordered: Vec<&Core> = cores.iter().collect();
    ordered.sort_by_key(|c| c.id);
    let dense = ordered.iter().enumerate().all(|(i, c)| c.id as usize == i);
    let anchors = if dense {
        ordered.iter().map(|c| c.representative()).collect()
    } else {
        Vec::new()
    };
    ZoneMap::new(g, labels, anchors)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MisticParams {
    pub orientation: Orientation,
    pub min_years: u32,
    pub mode: CoreMode,
    pub thresholds: DominanceThresholds,
}

impl Default for MisticParams {
    fn default() -> Self {
        Self {
            orientation: Orientation::Maxima,
            min_years: DEFAULT_MIN_YEARS,
            mode: CoreMode::Contiguous,
            thresholds: DominanceThresholds::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MisticResult<T> {
    pub years: Vec<i32>,
    pub yearly_foci: Vec<Vec<FocusPoint<T>>>,
    pub yearly_zones: Vec<ZoneMap>,
    pub table: FocusFrequencyTable,
    pub cores: Vec<Core>,
    pub consensus: ZoneMap,
    /// Conditions worth surfacing to a user (years without foci, unreached cells).
    pub notices: Vec<String>,
}

impl<T> MisticResult<T> {
    pub fn has_foci(&self) -> bool {
        !self.table.is_empty()
    }
}

/// Runs focus detection and zoning per year, then mining, cores and consensus.
pub fn run_mistic<T: Scalar>(stack: &AnnualMeanStack<T>, params: &MisticParams) -> Result<MisticResult<T>> {
    if stack.is_empty() {
        return Err(Error::EmptyDomain("annual stack is empty".into()));
    }
    params.thresholds.validate()?;
    if params.min_years < 1 {
        return Err(Error::Parameter("min_years must be at least 1".into()));
    }
    if params.mode == CoreMode::Radius(0) {
        return Err(Error::Parameter("core radius must be at least 1".into()));
    }
    let g = *stack.geometry();
    let per_year = stack
        .fields()
        .par_iter()
        .zip(stack.years().par_iter())
        .map(|(field, &year)| {
            let foci = detect_focus_points(field, params.orientation, year)?;
            let zones = if foci.is_empty() {
                ZoneMap::unlabeled(g)
            } else {
                watershed_zones(field, &foci, params.orientation)?
            };
            Ok((foci, zones))
        })
        .collect::<Result<Vec<_>>>()?;
    let (yearly_foci, yearly_zones): (Vec<_>, Vec<_>) = per_year.into_iter().unzip();

    let mut notices = Vec::new();
    for ((year, foci), zones) in stack.years().iter().zip(&yearly_foci).zip(&yearly_zones) {
        if foci.is_empty() {
            notices.push(format!("year {year}: no foci detected"));
        }
        if !zones.unreached().is_empty() {
            notices.push(format!(
                "year {year}: {} valid cell(s) unreachable from any focus",
                zones.unreached().len()
            ));
        }
    }

    let table = mine_frequent_foci(&yearly_foci, stack.len() as u32, params.min_years)?;
    let cores = build_cores(&table, params.mode, &yearly_zones, &params.thresholds)?;
    let consensus = if cores.is_empty() {
        notices.push("no foci detected in any year; consensus map is empty".into());
        ZoneMap::unlabeled(g)
    } else {
        consensus_zone_map(&yearly_zones, &cores)?
    };
    Ok(MisticResult {
        years: stack.years().to_vec(),
        yearly_foci,
        yearly_zones,
        table,
        cores,
        consensus,
        notices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridGeometry, Units};
    use proptest::prelude::*;

    fn field(nrows: usize, ncols: usize, values: Vec<f64>) -> ScalarField<f64> {
        ScalarField::from_values(GridGeometry::planar(nrows, ncols, 1.0).unwrap(), values, Units::Celsius).unwrap()
    }

    fn cells(foci: &[FocusPoint<f64>]) -> Vec<(usize, usize)> {
        foci.iter().map(|f| (f.cell.row, f.cell.col)).collect()
    }

    fn focus(r: usize, c: usize) -> FocusPoint<f64> {
        FocusPoint {
            cell: CellIndex::new(r, c),
            year: 0,
            value: 0.0,
        }
    }

    fn table(entries: &[((usize, usize), u32)], total: u32, min_years: u32) -> FocusFrequencyTable {
        FocusFrequencyTable {
            total_years: total,
            min_years,
            counts: entries.iter().map(|&((r, c), n)| (CellIndex::new(r, c), n)).collect(),
        }
    }

    #[test]
    fn single_peak_is_one_focus() {
        let f = field(3, 3, vec![1.0, 1.0, 1.0, 1.0, 5.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(
            cells(&detect_focus_points(&f, Orientation::Maxima, 0).unwrap()),
            vec![(1, 1)]
        );
        // the ring is one plateau whose only boundary cell is higher
        let minima = detect_focus_points(&f, Orientation::Minima, 0).unwrap();
        assert_eq!(cells(&minima), vec![(0, 0)]);
    }

    #[test]
    fn constant_field_has_no_foci() {
        let f = field(4, 4, vec![2.5; 16]);
        assert!(detect_focus_points(&f, Orientation::Maxima, 0).unwrap().is_empty());
        assert!(detect_focus_points(&f, Orientation::Minima, 0).unwrap().is_empty());
    }

    #[test]
    fn two_strict_maxima_in_a_row() {
        let f = field(1, 3, vec![3.0, 1.0, 3.0]);
        assert_eq!(
            cells(&detect_focus_points(&f, Orientation::Maxima, 0).unwrap()),
            vec![(0, 0), (0, 2)]
        );
        assert_eq!(
            cells(&detect_focus_points(&f, Orientation::Minima, 0).unwrap()),
            vec![(0, 1)]
        );
    }

    #[test]
    fn plateau_yields_its_smallest_cell() {
        let f = field(2, 4, vec![1.0, 4.0, 4.0, 1.0, 1.0, 1.0, 4.0, 0.0]);
        assert_eq!(
            cells(&detect_focus_points(&f, Orientation::Maxima, 0).unwrap()),
            vec![(0, 1)]
        );
    }

    #[test]
    fn fully_masked_field_is_an_error() {
        let g = GridGeometry::planar(2, 2, 1.0).unwrap();
        let f = ScalarField::new(g, vec![0.0; 4], vec![false; 4], Units::Celsius).unwrap();
        assert!(matches!(
            detect_focus_points(&f, Orientation::Maxima, 0),
            Err(Error::EmptyDomain(_))
        ));
    }

    #[test]
    fn row_tie_goes_to_first_seed() {
        let f = field(1, 3, vec![3.0, 1.0, 3.0]);
        let foci = detect_focus_points(&f, Orientation::Maxima, 0).unwrap();
        let z = watershed_zones(&f, &foci, Orientation::Maxima).unwrap();
        assert_eq!(z.labels(), &[Some(0), Some(0), Some(1)]);
        assert_eq!(z.anchors(), &[CellIndex::new(0, 0), CellIndex::new(0, 2)]);
    }

    #[test]
    fn single_focus_floods_everything() {
        let f = field(3, 4, (0..12).map(|i| (i * 7 % 5) as f64).collect());
        let z = watershed_zones(&f, &[focus(1, 1)], Orientation::Minima).unwrap();
        assert_eq!(z.labeled_count(), 12);
        assert_eq!(z.label_set(), vec![0]);
    }

    #[test]
    fn masked_gap_leaves_cells_unreached() {
        let g = GridGeometry::planar(1, 5, 1.0).unwrap();
        let mask = vec![true, true, false, true, true];
        let f = ScalarField::new(g, vec![5.0, 4.0, 0.0, 1.0, 2.0], mask, Units::Celsius).unwrap();
        let z = watershed_zones(&f, &[focus(0, 0)], Orientation::Maxima).unwrap();
        assert_eq!(z.unreached(), &[CellIndex::new(0, 3), CellIndex::new(0, 4)]);
        assert_eq!(z.label(CellIndex::new(0, 2)), None);
        assert!(watershed_zones(&f, &[], Orientation::Maxima).is_err());
        assert!(watershed_zones(&f, &[focus(0, 2)], Orientation::Maxima).is_err());
    }

    #[test]
    fn recurrence_threshold_boundary() {
        let mut years: Vec<Vec<FocusPoint<f64>>> = vec![Vec::new(); 31];
        for (y, foci) in years.iter_mut().enumerate() {
            if y < 12 {
                foci.push(focus(0, 0));
            }
            if y < 11 {
                foci.push(focus(3, 3));
            }
            foci.push(focus(5, 5));
        }
        let t = mine_frequent_foci(&years, 31, 12).unwrap();
        assert!(t.is_frequent(CellIndex::new(0, 0)));
        assert_eq!(t.frequency(CellIndex::new(0, 0)), Some(Ratio::new(12, 31)));
        assert!((12.0f64 / 31.0 - 0.3871).abs() < 1e-4);
        assert_eq!(t.count(CellIndex::new(3, 3)), Some(11));
        assert!(!t.is_frequent(CellIndex::new(3, 3)));
        assert_eq!(t.frequency(CellIndex::new(5, 5)), Some(Ratio::new(1, 1)));
        assert_eq!(t.frequent_cells(), vec![CellIndex::new(0, 0), CellIndex::new(5, 5)]);
    }

    #[test]
    fn contiguous_grouping() {
        let t = table(&[((0, 0), 3), ((0, 1), 1), ((5, 5), 2)], 4, 1);
        let cores = build_cores(&t, CoreMode::Contiguous, &[], &DominanceThresholds::default()).unwrap();
        assert_eq!(cores.len(), 2);
        let members: Vec<Vec<CellIndex>> = cores
            .iter()
            .map(|c| c.members.iter().map(|m| m.cell).collect())
            .collect();
        assert_eq!(members[0], vec![CellIndex::new(0, 0), CellIndex::new(0, 1)]);
        assert_eq!(members[1], vec![CellIndex::new(5, 5)]);
    }

    #[test]
    fn radius_grouping() {
        let t = table(&[((0, 0), 1), ((0, 2), 1)], 2, 1);
        let th = DominanceThresholds::default();
        assert_eq!(build_cores(&t, CoreMode::Radius(2), &[], &th).unwrap().len(), 1);
        assert_eq!(build_cores(&t, CoreMode::Radius(1), &[], &th).unwrap().len(), 2);
        assert!(build_cores(&t, CoreMode::Radius(0), &[], &th).is_err());
        assert!(build_cores(&table(&[], 3, 1), CoreMode::Contiguous, &[], &th)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn core_ids_follow_frequency() {
        let t = table(&[((0, 0), 2), ((9, 9), 7), ((4, 4), 7)], 10, 1);
        let cores = build_cores(&t, CoreMode::Contiguous, &[], &DominanceThresholds::default()).unwrap();
        let firsts: Vec<CellIndex> = cores.iter().map(|c| c.members[0].cell).collect();
        assert_eq!(
            firsts,
            vec![CellIndex::new(4, 4), CellIndex::new(9, 9), CellIndex::new(0, 0)]
        );
    }

    fn core_with(freqs: &[u32], total: u32) -> (Core, FocusFrequencyTable) {
        let entries: Vec<((usize, usize), u32)> = freqs.iter().enumerate().map(|(i, &n)| ((0, 2 * i), n)).collect();
        let t = table(&entries, total, 1);
        let mut cores = build_cores(&t, CoreMode::Radius(100), &[], &DominanceThresholds::default()).unwrap();
        (cores.remove(0), t)
    }

    #[test]
    fn dominance_classes() {
        let th = DominanceThresholds::default();
        let (c, t) = core_with(&[90, 20], 100);
        assert_eq!(classify_core(&c, &t, &th).unwrap(), Dominance::HighlyDominating);
        let (c, t) = core_with(&[45], 100);
        assert_eq!(classify_core(&c, &t, &th).unwrap(), Dominance::LessDominating);
        let (c, t) = core_with(&[10, 30], 100);
        assert_eq!(classify_core(&c, &t, &th).unwrap(), Dominance::NonDominating);
        let (c, t) = core_with(&[12], 31);
        assert_eq!(c.dominance, Dominance::LessDominating);
        let bad = DominanceThresholds {
            theta_high: 0.3,
            theta_dom: 0.5,
        };
        assert!(classify_core(&c, &t, &bad).is_err());
    }

    fn zone_map_1x3(labels: [u32; 3], anchors: Vec<(usize, usize)>) -> ZoneMap {
        let g = GridGeometry::planar(1, 3, 1.0).unwrap();
        ZoneMap::new(
            g,
            labels.iter().map(|&l| Some(l)).collect(),
            anchors.into_iter().map(CellIndex::from).collect(),
        )
        .unwrap()
    }

    #[test]
    fn consensus_majority_and_ties() {
        let t = table(&[((0, 0), 3), ((0, 2), 2)], 3, 1);
        let cores = build_cores(&t, CoreMode::Contiguous, &[], &DominanceThresholds::default()).unwrap();
        let a = zone_map_1x3([0, 0, 1], vec![(0, 0), (0, 2)]);
        let b = zone_map_1x3([0, 1, 1], vec![(0, 0), (0, 2)]);
        let maj = consensus_zone_map(&[a.clone(), a.clone(), b.clone()], &cores).unwrap();
        assert_eq!(maj.labels(), &[Some(0), Some(0), Some(1)]);
        let tie = consensus_zone_map(&[b.clone(), a.clone()], &cores).unwrap();
        assert_eq!(tie.label(CellIndex::new(0, 1)), Some(0));
        let same = consensus_zone_map(&[b.clone(), b.clone(), b.clone()], &cores).unwrap();
        assert_eq!(same.labels(), b.labels());
        assert!(consensus_zone_map(&[], &cores).is_err());
        assert!(consensus_zone_map(&[b], &[]).is_err());
    }

    #[test]
    fn orphan_anchor_goes_to_nearest_core() {
        let t = table(&[((0, 0), 1)], 1, 1);
        let cores = build_cores(&t, CoreMode::Contiguous, &[], &DominanceThresholds::default()).unwrap();
        let z = zone_map_1x3([0, 0, 1], vec![(0, 0), (0, 2)]);
        let c = consensus_zone_map(&[z], &cores).unwrap();
        assert_eq!(c.labels(), &[Some(0), Some(0), Some(0)]);
    }

    #[test]
    fn single_year_single_peak() {
        let g = GridGeometry::planar(5, 5, 1.0).unwrap();
        let f = ScalarField::from_fn(g, Units::Celsius, |c| {
            -((c.row as f64 - 2.0).powi(2) + (c.col as f64 - 1.0).powi(2))
        })
        .unwrap();
        let stack = AnnualMeanStack::new("tmax", vec![2001], vec![f]).unwrap();
        let out = run_mistic(
            &stack,
            &MisticParams {
                min_years: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(out.cores.len(), 1);
        assert_eq!(out.cores[0].dominance, Dominance::HighlyDominating);
        assert_eq!(out.cores[0].max_frequency(), Ratio::new(1, 1));
        assert_eq!(out.consensus.labels(), out.yearly_zones[0].labels());
        assert_eq!(out.cores[0].extent.len(), 25);
    }

    #[test]
    fn constant_stack_reports_no_foci() {
        let g = GridGeometry::planar(3, 3, 1.0).unwrap();
        let fields = vec![ScalarField::filled(g, 4.0f64, Units::Celsius); 3];
        let stack = AnnualMeanStack::new("tmax", vec![1, 2, 3], fields).unwrap();
        let out = run_mistic(&stack, &MisticParams::default()).unwrap();
        assert!(!out.has_foci());
        assert!(out.cores.is_empty());
        assert_eq!(out.consensus.labeled_count(), 0);
        assert!(out.notices.iter().any(|n| n.contains("no foci")));
    }

    fn random_field(vals: &[f64], n: usize) -> ScalarField<f64> {
        field(n, n, vals[..n * n].to_vec())
    }

    proptest! {
        #[test]
        fn zones_match_foci(vals in proptest::collection::vec(0.0f64..100.0, 64), n in 2usize..9) {
            let f = random_field(&vals, n);
            let foci = detect_focus_points(&f, Orientation::Maxima, 0).unwrap();
            prop_assume!(!foci.is_empty());
            let z = watershed_zones(&f, &foci, Orientation::Maxima).unwrap();
            prop_assert_eq!(z.labeled_count(), n * n);
            prop_assert_eq!(z.label_set().len(), foci.len());
            for (l, fp) in foci.iter().enumerate() {
                prop_assert_eq!(z.label(fp.cell), Some(l as u32));
            }
        }

        #[test]
        fn zones_are_invariant_under_monotone_maps(vals in proptest::collection::vec(-3.0f64..3.0, 49)) {
            let f = random_field(&vals, 7);
            let h = f.map(|x| x * x * x + 7.0).unwrap();
            for o in [Orientation::Maxima, Orientation::Minima] {
                let a = detect_focus_points(&f, o, 0).unwrap();
                let b = detect_focus_points(&h, o, 0).unwrap();
                prop_assert_eq!(cells(&a), cells(&b));
                if !a.is_empty() {
                    let (za, zb) = (watershed_zones(&f, &a, o).unwrap(), watershed_zones(&h, &b, o).unwrap());
                    prop_assert_eq!(za.labels(), zb.labels());
                }
            }
        }

        #[test]
        fn cc_equals_cr1_and_partitions(raw in proptest::collection::btree_set((0usize..8, 0usize..8), 1..20)) {
            let entries: Vec<((usize, usize), u32)> = raw.iter().enumerate().map(|(i, &rc)| (rc, (i % 5) as u32 + 1)).collect();
            let t = table(&entries, 5, 2);
            let th = DominanceThresholds::default();
            let cc = build_cores(&t, CoreMode::Contiguous, &[], &th).unwrap();
            let cr = build_cores(&t, CoreMode::Radius(1), &[], &th).unwrap();
            prop_assert_eq!(&cc, &cr);
            let total: usize = cc.iter().map(|c| c.members.len()).sum();
            prop_assert_eq!(total, raw.len());
        }

        #[test]
        fn counts_ignore_year_order(raw in proptest::collection::vec(proptest::collection::vec((0usize..4, 0usize..4), 0..6), 1..10)) {
            let years: Vec<Vec<FocusPoint<f64>>> = raw.iter().map(|y| y.iter().map(|&(r, c)| focus(r, c)).collect()).collect();
            let mut rev = years.clone();
            rev.reverse();
            let n = years.len() as u32;
            prop_assert_eq!(mine_frequent_foci(&years, n, 1).unwrap(), mine_frequent_foci(&rev, n, 1).unwrap());
        }
    }
}

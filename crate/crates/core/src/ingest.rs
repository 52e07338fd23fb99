//! The on-disk dataset directory, annual means and regridding.
//!
//! A dataset directory holds `manifest.json`, one `data/<year>.csv` per year
//! (one line per day, each line the row-major grid) and optionally
//! `elevation.csv` (one line per grid row).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{days_in_year, CalendarSpec, CellIndex, GridGeometry, GridMode, ScalarField, Units};
use crate::scalar::Scalar;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const DATA_DIR: &str = "data";
pub const ELEVATION_FILE: &str = "elevation.csv";

/// Valid cell fraction of a target cell below which resampled output is masked.
pub const MIN_COVERAGE: f64 = 0.5;

/// Sentinels inside this range could be real temperatures in either scale.
const PHYSICAL_RANGE: (f64, f64) = (-150.0, 400.0);

/// Violations listed per file before the rest are summarized.
const MAX_REPORTED_PER_FILE: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub variable: String,
    pub units: Units,
    pub calendar: CalendarSpec,
    pub geometry: GridGeometry,
    pub missing_value: f64,
    pub years: Vec<i32>,
}

impl DatasetManifest {
    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if !self.units.is_temperature() {
            problems.push(format!("units must be celsius or kelvin, got {:?}", self.units));
        }
        if let Err(e) = self.geometry.validate() {
            problems.push(e.to_string());
        }
        let (lo, hi) = PHYSICAL_RANGE;
        if !self.missing_value.is_finite() || (lo..=hi).contains(&self.missing_value) {
            problems.push(format!(
                "missing_value {} could be a physical temperature; it must lie outside [{lo}, {hi}]",
                self.missing_value
            ));
        }
        if self.years.is_empty() {
            problems.push("years list is empty".into());
        }
        if let Some(w) = self.years.windows(2).find(|w| w[0] >= w[1]) {
            problems.push(format!("years must be strictly increasing ({} then {})", w[0], w[1]));
        }
        problems
    }

    pub fn payload_path(&self, root: &Path, year: i32) -> PathBuf {
        root.join(DATA_DIR).join(format!("{year}.csv"))
    }
}

/// Daily layers of one year, day-major then row-major. Missing values are NaN.
#[derive(Debug, Clone)]
pub struct YearSeries<T> {
    pub year: i32,
    ndays: usize,
    values: Vec<T>,
}

/// Two missing values compare equal.
#[allow(clippy::eq_op)] // `x != x` only for NaN
impl<T: PartialEq> PartialEq for YearSeries<T> {
    fn eq(&self, other: &Self) -> bool {
        self.year == other.year
            && self.ndays == other.ndays
            && self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| a == b || (a != a && b != b))
    }
}

impl<T: Scalar> YearSeries<T> {
    /// `layers[d]` is day `d`'s row-major grid, `None` marking missing cells.
    pub fn from_layers(year: i32, ncells: usize, layers: &[Vec<Option<T>>]) -> Result<Self> {
        let mut values = Vec::with_capacity(layers.len() * ncells);
        for (d, layer) in layers.iter().enumerate() {
            if layer.len() != ncells {
                return Err(Error::Shape(format!(
                    "year {year} day {d}: {} cells, expected {ncells}",
                    layer.len()
                )));
            }
            for v in layer {
                match v {
                    Some(x) if x.is_finite() => values.push(*x),
                    Some(_) => {
                        return Err(Error::Shape(format!("year {year} day {d}: non-finite value")));
                    }
                    None => values.push(T::nan()),
                }
            }
        }
        Ok(Self {
            year,
            ndays: layers.len(),
            values,
        })
    }

    /// Day-major, row-major values with NaN marking missing cells.
    pub fn from_flat(year: i32, ncells: usize, values: Vec<T>) -> Result<Self> {
        if ncells == 0 || !values.len().is_multiple_of(ncells) {
            return Err(Error::Shape(format!(
                "year {year}: {} values do not split into layers of {ncells}",
                values.len()
            )));
        }
        if values.iter().any(|v| v.is_infinite()) {
            return Err(Error::Shape(format!("year {year}: infinite value")));
        }
        Ok(Self {
            year,
            ndays: values.len() / ncells,
            values,
        })
    }

    pub fn ndays(&self) -> usize {
        self.ndays
    }

    pub fn day(&self, d: usize) -> &[T] {
        let n = self.values.len() / self.ndays.max(1);
        &self.values[d * n..(d + 1) * n]
    }

    pub fn value(&self, d: usize, cell_index: usize) -> Option<T> {
        let v = self.day(d)[cell_index];
        (!v.is_nan()).then_some(v)
    }
}

/// A multi-year stack of daily grids under a declared calendar.
#[derive(Debug, Clone, PartialEq)]
pub struct DailySeriesGrid<T> {
    pub variable: String,
    geometry: GridGeometry,
    calendar: CalendarSpec,
    units: Units,
    years: Vec<YearSeries<T>>,
}

impl<T: Scalar> DailySeriesGrid<T> {
    pub fn new(
        variable: impl Into<String>,
        geometry: GridGeometry,
        calendar: CalendarSpec,
        units: Units,
        years: Vec<YearSeries<T>>,
    ) -> Result<Self> {
        geometry.validate()?;
        if !units.is_temperature() {
            return Err(Error::Units(format!(
                "daily series must be a temperature, got {units:?}"
            )));
        }
        if let Some(w) = years.windows(2).find(|w| w[0].year >= w[1].year) {
            return Err(Error::Parameter(format!(
                "years must be strictly increasing ({} then {})",
                w[0].year, w[1].year
            )));
        }
        for y in &years {
            let expected = days_in_year(calendar, y.year);
            if y.ndays != expected {
                return Err(Error::Validation(vec![day_count_message(y.year, expected, y.ndays)]));
            }
            if y.values.len() != y.ndays * geometry.len() {
                return Err(Error::Shape(format!(
                    "year {}: layer size does not match the grid",
                    y.year
                )));
            }
        }
        Ok(Self {
            variable: variable.into(),
            geometry,
            calendar,
            units,
            years,
        })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn calendar(&self) -> CalendarSpec {
        self.calendar
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.years.iter().map(|y| y.year)
    }

    pub fn year_series(&self) -> &[YearSeries<T>] {
        &self.years
    }

    pub fn year(&self, year: i32) -> Option<&YearSeries<T>> {
        self.years.iter().find(|y| y.year == year)
    }
}

fn day_count_message(year: i32, expected: usize, found: usize) -> String {
    format!("year {year}: expected {expected} daily lines, found {found}")
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn load_manifest(root: &Path) -> Result<DatasetManifest> {
    let path = root.join(MANIFEST_FILE);
    let text = read_text(&path)?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path, source })
}

/// Outcome of checking a dataset directory; `series` is present only when no violations were found.
#[derive(Debug)]
pub struct DatasetCheck<T> {
    pub manifest: DatasetManifest,
    pub violations: Vec<String>,
    pub series: Option<DailySeriesGrid<T>>,
}

struct ViolationLog<'a> {
    out: &'a mut Vec<String>,
    file: String,
    count: usize,
}

impl<'a> ViolationLog<'a> {
    fn new(out: &'a mut Vec<String>, file: String) -> Self {
        Self { out, file, count: 0 }
    }

    fn push(&mut self, msg: String) {
        if self.count < MAX_REPORTED_PER_FILE {
            self.out.push(format!("{}: {msg}", self.file));
        }
        self.count += 1;
    }
}

impl Drop for ViolationLog<'_> {
    fn drop(&mut self) {
        if self.count > MAX_REPORTED_PER_FILE {
            self.out.push(format!(
                "{}: ... and {} more violation(s)",
                self.file,
                self.count - MAX_REPORTED_PER_FILE
            ));
        }
    }
}

fn parse_year<T: Scalar>(
    text: &str,
    manifest: &DatasetManifest,
    year: i32,
    violations: &mut Vec<String>,
) -> Option<YearSeries<T>> {
    let ncells = manifest.geometry.len();
    let expected_days = days_in_year(manifest.calendar, year);
    let mut log = ViolationLog::new(violations, format!("{DATA_DIR}/{year}.csv"));
    if text.contains('\r') {
        log.push("CR characters found; lines must end with LF only".into());
    }
    let body = text.strip_suffix('\n').unwrap_or(text);
    let lines: Vec<&str> = if body.is_empty() {
        Vec::new()
    } else {
        body.split('\n').collect()
    };
    if lines.len() != expected_days {
        log.push(day_count_message(year, expected_days, lines.len()));
    }
    let sentinel = manifest.missing_value;
    let mut values = Vec::with_capacity(lines.len() * ncells);
    for (day, line) in lines.iter().enumerate() {
        let line = line.trim_end_matches('\r');
        let mut n = 0usize;
        for (i, tok) in line.split(',').enumerate() {
            n += 1;
            match tok.parse::<f64>() {
                Ok(v) if v == sentinel => values.push(T::nan()),
                Ok(v) if v.is_finite() => match tok.parse::<T>() {
                    Ok(x) => values.push(x),
                    Err(_) => {
                        log.push(format!("day {day}: value {tok:?} not representable"));
                        values.push(T::nan());
                    }
                },
                Ok(_) => {
                    log.push(format!(
                        "day {day}, cell {}: non-finite value {tok:?} is not the missing_value sentinel",
                        cell_label(&manifest.geometry, i)
                    ));
                    values.push(T::nan());
                }
                Err(_) => {
                    log.push(format!(
                        "day {day}, cell {}: cannot parse {tok:?} as a number",
                        cell_label(&manifest.geometry, i)
                    ));
                    values.push(T::nan());
                }
            }
        }
        if n != ncells {
            log.push(format!(
                "day {day}: {n} values, expected {ncells} ({}x{})",
                manifest.geometry.nrows, manifest.geometry.ncols
            ));
            values.resize((day + 1) * ncells, T::nan());
        }
    }
    let ok = log.count == 0;
    drop(log);
    ok.then_some(YearSeries {
        year,
        ndays: lines.len(),
        values,
    })
}

fn cell_label(g: &GridGeometry, i: usize) -> String {
    if i < g.len() {
        g.cell(i).to_string()
    } else {
        format!("#{i}")
    }
}

/// Checks every file of a dataset directory and reports all violations found.
///
/// Only a missing or unreadable manifest is an error; problems in payload
/// files are collected as violations.
pub fn check_dataset<T: Scalar>(root: &Path) -> Result<DatasetCheck<T>> {
    let manifest = load_manifest(root)?;
    let mut violations: Vec<String> = manifest
        .validate()
        .into_iter()
        .map(|v| format!("{MANIFEST_FILE}: {v}"))
        .collect();
    if !violations.is_empty() {
        return Ok(DatasetCheck {
            manifest,
            violations,
            series: None,
        });
    }

    let parsed: Vec<(Option<YearSeries<T>>, Vec<String>)> = manifest
        .years
        .par_iter()
        .map(|&year| {
            let mut v = Vec::new();
            let path = manifest.payload_path(root, year);
            let series = match fs::read_to_string(&path) {
                Ok(text) => parse_year(&text, &manifest, year, &mut v),
                Err(e) => {
                    v.push(format!("{DATA_DIR}/{year}.csv: cannot read payload ({e})"));
                    None
                }
            };
            (series, v)
        })
        .collect();

    let mut years = Vec::with_capacity(parsed.len());
    for (series, v) in parsed {
        violations.extend(v);
        years.extend(series);
    }

    let elevation = root.join(ELEVATION_FILE);
    if elevation.exists() {
        if let Err(e) = load_elevation::<T>(&elevation, &manifest.geometry, manifest.missing_value) {
            violations.push(format!("{ELEVATION_FILE}: {e}"));
        }
    }

    let series = if violations.is_empty() {
        Some(DailySeriesGrid::new(
            manifest.variable.clone(),
            manifest.geometry,
            manifest.calendar,
            manifest.units,
            years,
        )?)
    } else {
        None
    };
    Ok(DatasetCheck {
        manifest,
        violations,
        series,
    })
}

/// Loads and validates a dataset directory.
pub fn load_dataset<T: Scalar>(root: &Path) -> Result<DailySeriesGrid<T>> {
    let check = check_dataset(root)?;
    match check.series {
        Some(series) => Ok(series),
        None => Err(Error::Validation(check.violations)),
    }
}

/// Writes a dataset directory; missing cells are written as `missing_value`.
pub fn write_dataset<T: Scalar>(
    root: &Path,
    series: &DailySeriesGrid<T>,
    missing_value: f64,
) -> Result<DatasetManifest> {
    let manifest = DatasetManifest {
        variable: series.variable.clone(),
        units: series.units,
        calendar: series.calendar,
        geometry: series.geometry,
        missing_value,
        years: series.years().collect(),
    };
    let problems = manifest.validate();
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    let data = root.join(DATA_DIR);
    fs::create_dir_all(&data).map_err(|e| Error::io(&data, e))?;
    let path = root.join(MANIFEST_FILE);
    let mut json = serde_json::to_string_pretty(&manifest).map_err(|source| Error::Json {
        path: path.clone(),
        source,
    })?;
    json.push('\n');
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;

    let sentinel = format_value(missing_value);
    series.years.par_iter().try_for_each(|y| {
        let mut out = String::with_capacity(y.values.len() * 8);
        for d in 0..y.ndays {
            for (i, v) in y.day(d).iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if v.is_nan() {
                    out.push_str(&sentinel);
                } else {
                    let _ = write!(out, "{v}");
                }
            }
            out.push('\n');
        }
        let path = manifest.payload_path(root, y.year);
        fs::write(&path, out).map_err(|e| Error::io(&path, e))
    })?;
    Ok(manifest)
}

fn format_value(v: f64) -> String {
    format!("{v}")
}

/// Reads an elevation grid in meters (`nrows` lines of `ncols` values).
pub fn load_elevation<T: Scalar>(path: &Path, geometry: &GridGeometry, missing_value: f64) -> Result<ScalarField<T>> {
    let text = read_text(path)?;
    let body = text.strip_suffix('\n').unwrap_or(&text);
    let lines: Vec<&str> = if body.is_empty() {
        Vec::new()
    } else {
        body.split('\n').collect()
    };
    let mut problems = Vec::new();
    if lines.len() != geometry.nrows {
        problems.push(format!("expected {} rows, found {}", geometry.nrows, lines.len()));
    }
    let mut values = vec![T::zero(); geometry.len()];
    let mut mask = vec![false; geometry.len()];
    for (r, line) in lines.iter().enumerate().take(geometry.nrows) {
        let toks: Vec<&str> = line.split(',').collect();
        if toks.len() != geometry.ncols {
            problems.push(format!("row {r}: {} values, expected {}", toks.len(), geometry.ncols));
            continue;
        }
        for (c, tok) in toks.iter().enumerate() {
            let i = geometry.index(CellIndex::new(r, c));
            match tok.trim().parse::<f64>() {
                Ok(v) if v == missing_value => {}
                Ok(v) if v.is_finite() => {
                    values[i] = T::lit(v);
                    mask[i] = true;
                }
                _ => problems.push(format!("row {r}, col {c}: invalid value {tok:?}")),
            }
        }
    }
    if !problems.is_empty() {
        return Err(Error::Validation(problems));
    }
    ScalarField::new(*geometry, values, mask, Units::Meters)
}

pub fn write_elevation<T: Scalar>(path: &Path, field: &ScalarField<T>, missing_value: f64) -> Result<()> {
    let g = field.geometry();
    let mut out = String::new();
    for r in 0..g.nrows {
        for c in 0..g.ncols {
            if c > 0 {
                out.push(',');
            }
            match field.get(CellIndex::new(r, c)) {
                Some(v) => {
                    let _ = write!(out, "{v}");
                }
                None => out.push_str(&format_value(missing_value)),
            }
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Annual mean per location over one year's valid days.
///
/// A cell is masked when its fraction of valid days falls below `min_valid_fraction`.
pub fn annual_mean<T: Scalar>(
    series: &DailySeriesGrid<T>,
    year: i32,
    min_valid_fraction: f64,
) -> Result<ScalarField<T>> {
    if !(min_valid_fraction > 0.0 && min_valid_fraction <= 1.0) {
        return Err(Error::Parameter(format!(
            "min_valid_fraction must be in (0, 1], got {min_valid_fraction}"
        )));
    }
    let ys = series
        .year(year)
        .ok_or_else(|| Error::Lookup(format!("year {year} is not in the series")))?;
    let n = series.geometry.len();
    let mut sum = vec![T::zero(); n];
    let mut lo = vec![T::infinity(); n];
    let mut hi = vec![T::neg_infinity(); n];
    let mut count = vec![0usize; n];
    for d in 0..ys.ndays {
        for (i, &v) in ys.day(d).iter().enumerate() {
            if !v.is_nan() {
                sum[i] = sum[i] + v;
                lo[i] = lo[i].min(v);
                hi[i] = hi[i].max(v);
                count[i] += 1;
            }
        }
    }
    let ndays = ys.ndays as f64;
    let mut values = vec![T::zero(); n];
    let mut mask = vec![false; n];
    for i in 0..n {
        if count[i] > 0 && count[i] as f64 / ndays >= min_valid_fraction {
            let mean = sum[i] / T::lit(count[i] as f64);
            values[i] = mean.max(lo[i]).min(hi[i]);
            mask[i] = true;
        }
    }
    ScalarField::new(series.geometry, values, mask, series.units)
}

/// One annual-mean field per year, with the combined mask.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnualMeanStack<T> {
    pub variable: String,
    geometry: GridGeometry,
    units: Units,
    years: Vec<i32>,
    fields: Vec<ScalarField<T>>,
    mask: Vec<bool>,
}

impl<T: Scalar> AnnualMeanStack<T> {
    /// Assembles a stack from per-year fields sharing one geometry and unit.
    pub fn new(variable: impl Into<String>, years: Vec<i32>, fields: Vec<ScalarField<T>>) -> Result<Self> {
        let first = fields
            .first()
            .ok_or_else(|| Error::EmptyDomain("annual stack needs at least one year".into()))?;
        if years.len() != fields.len() {
            return Err(Error::Shape(format!(
                "{} years for {} fields",
                years.len(),
                fields.len()
            )));
        }
        if let Some(w) = years.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::Parameter(format!(
                "years must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        let geometry = *first.geometry();
        let units = first.units();
        if fields.iter().any(|f| f.geometry() != &geometry || f.units() != units) {
            return Err(Error::Shape("annual fields differ in geometry or units".into()));
        }
        let mask = (0..geometry.len())
            .map(|i| fields.iter().all(|f| f.mask()[i]))
            .collect();
        Ok(Self {
            variable: variable.into(),
            geometry,
            units,
            years,
            fields,
            mask,
        })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn years(&self) -> &[i32] {
        &self.years
    }

    pub fn fields(&self) -> &[ScalarField<T>] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    /// Valid in every year.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Applies `f` to every valid value of every year.
    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        let fields = self.fields.iter().map(|x| x.map(&f)).collect::<Result<Vec<_>>>()?;
        Self::new(self.variable.clone(), self.years.clone(), fields)
    }
}

pub fn build_annual_stack<T: Scalar>(
    series: &DailySeriesGrid<T>,
    min_valid_fraction: f64,
) -> Result<AnnualMeanStack<T>> {
    if series.years.is_empty() {
        return Err(Error::EmptyDomain("series has no years".into()));
    }
    let fields = series
        .years
        .par_iter()
        .map(|y| annual_mean(series, y.year, min_valid_fraction))
        .collect::<Result<Vec<_>>>()?;
    AnnualMeanStack::new(series.variable.clone(), series.years().collect(), fields)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleMethod {
    #[default]
    AreaWeighted,
    Nearest,
}

/// Overlap measure of an interval pair along one axis.
///
/// Latitude extents in geographic mode are measured as `sin(hi) - sin(lo)`,
/// so products of the two axes are proportional to true spherical area and
/// add up exactly across any partition of a cell.
fn axis_measure(mode: GridMode, latitude: bool, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    match (mode, latitude) {
        (GridMode::Geographic, true) => {
            let lo = lo.clamp(-90.0, 90.0).to_radians();
            let hi = hi.clamp(-90.0, 90.0).to_radians();
            (hi.sin() - lo.sin()).max(0.0)
        }
        _ => hi - lo,
    }
}

fn overlaps(
    mode: GridMode,
    latitude: bool,
    target: (f64, f64),
    source_bounds: impl Iterator<Item = (f64, f64)>,
) -> Vec<(usize, f64)> {
    source_bounds
        .enumerate()
        .filter_map(|(i, (lo, hi))| {
            let w = axis_measure(mode, latitude, lo.max(target.0), hi.min(target.1));
            (w > 0.0).then_some((i, w))
        })
        .collect()
}

/// Regrids a field onto `target`.
///
/// Target cells whose valid source coverage is below half their area are masked.
pub fn resample<T: Scalar>(
    field: &ScalarField<T>,
    target: &GridGeometry,
    method: ResampleMethod,
) -> Result<ScalarField<T>> {
    let src = field.geometry();
    target.validate()?;
    if src.mode != target.mode {
        return Err(Error::Geometry(format!(
            "cannot resample {:?} grid onto {:?} grid",
            src.mode, target.mode
        )));
    }
    let mode = src.mode;
    let row_overlaps: Vec<Vec<(usize, f64)>> = (0..target.nrows)
        .map(|r| {
            overlaps(
                mode,
                true,
                target.row_bounds(r),
                (0..src.nrows).map(|s| src.row_bounds(s)),
            )
        })
        .collect();
    let col_overlaps: Vec<Vec<(usize, f64)>> = (0..target.ncols)
        .map(|c| {
            overlaps(
                mode,
                false,
                target.col_bounds(c),
                (0..src.ncols).map(|s| src.col_bounds(s)),
            )
        })
        .collect();
    if row_overlaps.iter().all(Vec::is_empty) || col_overlaps.iter().all(Vec::is_empty) {
        return Err(Error::Coverage("source and target grids do not overlap".into()));
    }

    let n = target.len();
    let mut values = vec![T::zero(); n];
    let mut mask = vec![false; n];
    for (r, row_src) in row_overlaps.iter().enumerate() {
        let (rlo, rhi) = target.row_bounds(r);
        let row_area = axis_measure(mode, true, rlo, rhi);
        for (c, col_src) in col_overlaps.iter().enumerate() {
            let (clo, chi) = target.col_bounds(c);
            let area = row_area * axis_measure(mode, false, clo, chi);
            let mut covered = 0.0;
            let mut mean = T::zero();
            for &(sr, wr) in row_src {
                for &(sc, wc) in col_src {
                    if let Some(v) = field.get(CellIndex::new(sr, sc)) {
                        let w = wr * wc;
                        covered += w;
                        // Running weighted mean: a constant input stays exactly constant.
                        mean = mean + T::lit(w / covered) * (v - mean);
                    }
                }
            }
            if area <= 0.0 || covered / area < MIN_COVERAGE {
                continue;
            }
            let i = target.index(CellIndex::new(r, c));
            match method {
                ResampleMethod::AreaWeighted => {
                    values[i] = mean;
                    mask[i] = true;
                }
                ResampleMethod::Nearest => {
                    let sr = ((target.row_center(r) - src.origin_lat) / src.cell_dlat).round();
                    let sc = ((target.col_center(c) - src.origin_lon) / src.cell_dlon).round();
                    if sr < 0.0 || sc < 0.0 {
                        continue;
                    }
                    let cell = CellIndex::new(sr as usize, sc as usize);
                    if let Some(v) = src.contains(cell).then(|| field.get(cell)).flatten() {
                        values[i] = v;
                        mask[i] = true;
                    }
                }
            }
        }
    }
    ScalarField::new(*target, values, mask, field.units())
}

/// Area-weighted mean of the valid cells of a field, with the same area
/// measure used by [`resample`].
pub fn area_weighted_mean<T: Scalar>(field: &ScalarField<T>) -> Option<f64> {
    let g = field.geometry();
    let mut sum = 0.0;
    let mut total = 0.0;
    for cell in g.cells() {
        if let Some(v) = field.get(cell) {
            let (rlo, rhi) = g.row_bounds(cell.row);
            let (clo, chi) = g.col_bounds(cell.col);
            let w = axis_measure(g.mode, true, rlo, rhi) * axis_measure(g.mode, false, clo, chi);
            sum += w * v.as_f64();
            total += w;
        }
    }
    (total > 0.0).then(|| sum / total)
}

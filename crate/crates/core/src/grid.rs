//! Grid geometry, masked scalar fields, calendars and 8-connected neighborhoods.
//!
//! Cell `(row, col)` has its center at `origin + (row * cell_dlat, col * cell_dlon)`:
//! the origin names the center of cell `(0, 0)` and rows advance in the direction
//! of increasing latitude (or northing, in planar mode).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Meters per degree of latitude on a spherical Earth of radius 6371 km.
pub const METERS_PER_DEGREE: f64 = 111_195.0;

/// Offset between the Kelvin and Celsius scales.
pub const KELVIN_OFFSET: f64 = 273.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    /// Coordinates in degrees of latitude/longitude.
    Geographic,
    /// Coordinates in meters on a flat plane.
    Planar,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridGeometry {
    pub mode: GridMode,
    pub origin_lat: f64,
    pub origin_lon: f64,
    pub cell_dlat: f64,
    pub cell_dlon: f64,
    pub nrows: usize,
    pub ncols: usize,
}

impl GridGeometry {
    pub fn new(
        mode: GridMode,
        origin_lat: f64,
        origin_lon: f64,
        cell_dlat: f64,
        cell_dlon: f64,
        nrows: usize,
        ncols: usize,
    ) -> Result<Self> {
        let geometry = Self {
            mode,
            origin_lat,
            origin_lon,
            cell_dlat,
            cell_dlon,
            nrows,
            ncols,
        };
        geometry.validate()?;
        Ok(geometry)
    }

    /// A planar grid with square cells of `cell_size` meters, origin at (0, 0).
    pub fn planar(nrows: usize, ncols: usize, cell_size: f64) -> Result<Self> {
        Self::new(GridMode::Planar, 0.0, 0.0, cell_size, cell_size, nrows, ncols)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.origin_lat, self.origin_lon, self.cell_dlat, self.cell_dlon]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Geometry("non-finite coordinate".into()));
        }
        if self.cell_dlat <= 0.0 || self.cell_dlon <= 0.0 {
            return Err(Error::Geometry(format!(
                "cell size must be positive, got {}x{}",
                self.cell_dlat, self.cell_dlon
            )));
        }
        if self.nrows == 0 || self.ncols == 0 {
            return Err(Error::Geometry(format!(
                "grid must have at least one cell, got {}x{}",
                self.nrows, self.ncols
            )));
        }
        if self.mode == GridMode::Geographic {
            let first = self.origin_lat;
            let last = self.row_center(self.nrows - 1);
            if !(-90.0..=90.0).contains(&first) || !(-90.0..=90.0).contains(&last) {
                return Err(Error::Geometry(format!(
                    "cell centers span latitude {first}..{last}, outside [-90, 90]"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nrows * self.ncols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    pub fn contains(&self, cell: CellIndex) -> bool {
        cell.row < self.nrows && cell.col < self.ncols
    }

    pub fn check(&self, cell: CellIndex) -> Result<()> {
        if self.contains(cell) {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                cell,
                nrows: self.nrows,
                ncols: self.ncols,
            })
        }
    }

    #[inline]
    pub fn index(&self, cell: CellIndex) -> usize {
        cell.row * self.ncols + cell.col
    }

    #[inline]
    pub fn cell(&self, index: usize) -> CellIndex {
        CellIndex::new(index / self.ncols, index % self.ncols)
    }

    pub fn cells(&self) -> impl Iterator<Item = CellIndex> + '_ {
        (0..self.len()).map(move |i| self.cell(i))
    }

    pub fn row_center(&self, row: usize) -> f64 {
        self.origin_lat + row as f64 * self.cell_dlat
    }

    pub fn col_center(&self, col: usize) -> f64 {
        self.origin_lon + col as f64 * self.cell_dlon
    }

    /// Lower and upper edge of a row along the latitude/northing axis.
    pub fn row_bounds(&self, row: usize) -> (f64, f64) {
        let c = self.row_center(row);
        (c - 0.5 * self.cell_dlat, c + 0.5 * self.cell_dlat)
    }

    pub fn col_bounds(&self, col: usize) -> (f64, f64) {
        let c = self.col_center(col);
        (c - 0.5 * self.cell_dlon, c + 0.5 * self.cell_dlon)
    }

    /// Same shape and coordinates (exact comparison).
    pub fn same_grid(&self, other: &GridGeometry) -> bool {
        self == other
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellIndex {
    pub row: usize,
    pub col: usize,
}

impl CellIndex {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    pub fn chebyshev(&self, other: &CellIndex) -> usize {
        self.row.abs_diff(other.row).max(self.col.abs_diff(other.col))
    }
}

impl From<(usize, usize)> for CellIndex {
    fn from((row, col): (usize, usize)) -> Self {
        Self::new(row, col)
    }
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    Celsius,
    Kelvin,
    Meters,
    DegreesSlope,
    Dimensionless,
}

impl Units {
    pub fn is_temperature(self) -> bool {
        matches!(self, Units::Celsius | Units::Kelvin)
    }
}

/// Row-major grid of values with a validity mask (`true` = valid).
///
/// Equality ignores whatever is stored under masked cells.
#[derive(Debug, Clone)]
pub struct ScalarField<T> {
    geometry: GridGeometry,
    values: Vec<T>,
    mask: Vec<bool>,
    units: Units,
}

impl<T: PartialEq> PartialEq for ScalarField<T> {
    fn eq(&self, other: &Self) -> bool {
        self.geometry == other.geometry
            && self.units == other.units
            && self.mask == other.mask
            && self
                .values
                .iter()
                .zip(&other.values)
                .zip(&self.mask)
                .all(|((a, b), &valid)| !valid || a == b)
    }
}

impl<T: Scalar> ScalarField<T> {
    /// Builds a field, checking lengths and that every valid value is finite.
    pub fn new(geometry: GridGeometry, values: Vec<T>, mask: Vec<bool>, units: Units) -> Result<Self> {
        let n = geometry.len();
        if values.len() != n || mask.len() != n {
            return Err(Error::Shape(format!(
                "expected {n} values and mask entries, got {} and {}",
                values.len(),
                mask.len()
            )));
        }
        if let Some(i) = (0..n).find(|&i| mask[i] && !values[i].is_finite()) {
            return Err(Error::Shape(format!(
                "valid cell {} holds a non-finite value",
                geometry.cell(i)
            )));
        }
        Ok(Self {
            geometry,
            values,
            mask,
            units,
        })
    }

    /// Fully valid field.
    pub fn from_values(geometry: GridGeometry, values: Vec<T>, units: Units) -> Result<Self> {
        let mask = vec![true; values.len()];
        Self::new(geometry, values, mask, units)
    }

    pub fn filled(geometry: GridGeometry, value: T, units: Units) -> Self {
        let n = geometry.len();
        Self {
            geometry,
            values: vec![value; n],
            mask: vec![true; n],
            units,
        }
    }

    /// Builds a fully valid field by evaluating `f` at every cell.
    pub fn from_fn(geometry: GridGeometry, units: Units, mut f: impl FnMut(CellIndex) -> T) -> Result<Self> {
        let values = geometry.cells().map(&mut f).collect();
        Self::from_values(geometry, values, units)
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_valid(&self, cell: CellIndex) -> bool {
        self.mask[self.geometry.index(cell)]
    }

    /// Value at a valid cell, `None` when masked.
    pub fn get(&self, cell: CellIndex) -> Option<T> {
        let i = self.geometry.index(cell);
        self.mask[i].then(|| self.values[i])
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Masks one cell. Its stored value is left in place but never read.
    pub fn mask_cell(&mut self, cell: CellIndex) {
        let i = self.geometry.index(cell);
        self.mask[i] = false;
    }

    /// Applies `f` to every valid value; masked cells are untouched.
    pub fn map(&self, mut f: impl FnMut(T) -> T) -> Result<Self> {
        let values = self
            .values
            .iter()
            .zip(&self.mask)
            .map(|(&v, &m)| if m { f(v) } else { v })
            .collect();
        Self::new(self.geometry, values, self.mask.clone(), self.units)
    }

    pub fn with_units(mut self, units: Units) -> Self {
        self.units = units;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CalendarSpec {
    #[serde(rename = "gregorian")]
    Gregorian,
    #[serde(rename = "360_day")]
    Fixed360,
}

pub fn is_leap_year(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

pub fn days_in_year(calendar: CalendarSpec, year: i32) -> usize {
    match calendar {
        CalendarSpec::Fixed360 => 360,
        CalendarSpec::Gregorian if is_leap_year(year) => 366,
        CalendarSpec::Gregorian => 365,
    }
}

/// Month (1..=12) and day of month (1..=31) for a 0-based day ordinal.
pub fn month_day(calendar: CalendarSpec, year: i32, ordinal: usize) -> Result<(u32, u32)> {
    let ndays = days_in_year(calendar, year);
    if ordinal >= ndays {
        return Err(Error::Parameter(format!(
            "day ordinal {ordinal} out of range for {year} ({ndays} days)"
        )));
    }
    match calendar {
        CalendarSpec::Fixed360 => Ok(((ordinal / 30) as u32 + 1, (ordinal % 30) as u32 + 1)),
        CalendarSpec::Gregorian => {
            let feb = if is_leap_year(year) { 29 } else { 28 };
            let lengths = [31, feb, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];
            let mut rest = ordinal;
            for (m, &len) in lengths.iter().enumerate() {
                if rest < len {
                    return Ok((m as u32 + 1, rest as u32 + 1));
                }
                rest -= len;
            }
            unreachable!("ordinal already bounded by the year length")
        }
    }
}

/// Inverse of [`month_day`].
pub fn ordinal_of(calendar: CalendarSpec, year: i32, month: u32, day: u32) -> Result<usize> {
    let bad = || Error::Parameter(format!("no date {year}-{month:02}-{day:02} in {calendar:?} calendar"));
    if !(1..=12).contains(&month) || day == 0 {
        return Err(bad());
    }
    match calendar {
        CalendarSpec::Fixed360 => {
            if day > 30 {
                return Err(bad());
            }
            Ok((month as usize - 1) * 30 + day as usize - 1)
        }
        CalendarSpec::Gregorian => {
            let feb = if is_leap_year(year) { 29 } else { 28 };
            let lengths = [31, feb, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31];
            if day as usize > lengths[month as usize - 1] {
                return Err(bad());
            }
            Ok(lengths[..month as usize - 1].iter().sum::<usize>() + day as usize - 1)
        }
    }
}

const NEIGHBOR_OFFSETS: [(isize, isize); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

/// In-bounds 8-neighbors in row-major order (NW, N, NE, W, E, SW, S, SE), ignoring the mask.
pub(crate) fn ring(geometry: &GridGeometry, cell: CellIndex) -> impl Iterator<Item = CellIndex> + '_ {
    NEIGHBOR_OFFSETS.iter().filter_map(move |&(dr, dc)| {
        let r = cell.row.checked_add_signed(dr)?;
        let c = cell.col.checked_add_signed(dc)?;
        (r < geometry.nrows && c < geometry.ncols).then_some(CellIndex::new(r, c))
    })
}

/// Unmasked in-bounds 8-neighbors of `cell`, row-major.
pub fn neighbors8(geometry: &GridGeometry, mask: &[bool], cell: CellIndex) -> Result<Vec<CellIndex>> {
    geometry.check(cell)?;
    if mask.len() != geometry.len() {
        return Err(Error::Shape(format!(
            "mask has {} entries for a grid of {}",
            mask.len(),
            geometry.len()
        )));
    }
    Ok(ring(geometry, cell).filter(|&n| mask[geometry.index(n)]).collect())
}

/// Converts a Kelvin field to Celsius; Celsius input is returned unchanged.
pub fn to_celsius<T: Scalar>(field: &ScalarField<T>) -> Result<ScalarField<T>> {
    match field.units() {
        Units::Celsius => Ok(field.clone()),
        Units::Kelvin => {
            let offset = T::lit(KELVIN_OFFSET);
            Ok(field.map(|v| v - offset)?.with_units(Units::Celsius))
        }
        other => Err(Error::Units(format!("cannot convert {other:?} to celsius"))),
    }
}

/// Terrain slope in degrees from a 3x3 Horn stencil.
///
/// Border cells and cells with any masked stencil member are masked.
pub fn slope_field<T: Scalar>(elevation: &ScalarField<T>) -> Result<ScalarField<T>> {
    if elevation.units() != Units::Meters {
        return Err(Error::Units(format!(
            "slope needs elevation in meters, got {:?}",
            elevation.units()
        )));
    }
    let g = *elevation.geometry();
    if g.nrows < 3 || g.ncols < 3 {
        return Err(Error::Size(format!(
            "slope needs at least a 3x3 grid, got {}x{}",
            g.nrows, g.ncols
        )));
    }
    let n = g.len();
    let mut values = vec![T::zero(); n];
    let mut mask = vec![false; n];
    let two = T::lit(2.0);
    let eight = T::lit(8.0);
    for r in 1..g.nrows - 1 {
        let (dy, dx) = match g.mode {
            GridMode::Planar => (g.cell_dlat, g.cell_dlon),
            GridMode::Geographic => {
                let lat = g.row_center(r).to_radians();
                (
                    g.cell_dlat * METERS_PER_DEGREE,
                    g.cell_dlon * METERS_PER_DEGREE * lat.cos(),
                )
            }
        };
        if dx <= 0.0 {
            // Longitude spacing collapses at the poles.
            continue;
        }
        let (dy, dx) = (T::lit(dy), T::lit(dx));
        for c in 1..g.ncols - 1 {
            let z = |dr: usize, dc: usize| elevation.get(CellIndex::new(r + dr - 1, c + dc - 1));
            let mut w = [T::zero(); 9];
            let mut complete = true;
            for (k, slot) in w.iter_mut().enumerate() {
                match z(k / 3, k % 3) {
                    Some(v) => *slot = v,
                    None => {
                        complete = false;
                        break;
                    }
                }
            }
            if !complete {
                continue;
            }
            // w[0..3] is the row below the center (lower row index), w[6..9] the row above.
            let dzdx = ((w[2] + two * w[5] + w[8]) - (w[0] + two * w[3] + w[6])) / (eight * dx);
            let dzdy = ((w[6] + two * w[7] + w[8]) - (w[0] + two * w[1] + w[2])) / (eight * dy);
            let i = g.index(CellIndex::new(r, c));
            values[i] = (dzdx * dzdx + dzdy * dzdy).sqrt().atan().to_degrees();
            mask[i] = true;
        }
    }
    ScalarField::new(g, values, mask, Units::DegreesSlope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn full(n: usize) -> Vec<bool> {
        vec![true; n]
    }

    #[test]
    fn interior_cell_has_eight_neighbors() {
        let g = GridGeometry::planar(3, 3, 1.0).unwrap();
        let ns = neighbors8(&g, &full(9), CellIndex::new(1, 1)).unwrap();
        assert_eq!(ns.len(), 8);
        assert_eq!(ns[0], CellIndex::new(0, 0));
        assert_eq!(ns[7], CellIndex::new(2, 2));
    }

    #[test]
    fn corner_cell_has_three_neighbors() {
        let g = GridGeometry::planar(3, 3, 1.0).unwrap();
        let ns = neighbors8(&g, &full(9), CellIndex::new(0, 0)).unwrap();
        assert_eq!(
            ns,
            vec![CellIndex::new(0, 1), CellIndex::new(1, 0), CellIndex::new(1, 1)]
        );
    }

    #[test]
    fn masked_neighbor_is_dropped() {
        let g = GridGeometry::planar(3, 3, 1.0).unwrap();
        let mut mask = full(9);
        mask[2] = false;
        let ns = neighbors8(&g, &mask, CellIndex::new(1, 1)).unwrap();
        assert_eq!(ns.len(), 7);
        assert!(!ns.contains(&CellIndex::new(0, 2)));
    }

    #[test]
    fn out_of_bounds_cell_is_rejected() {
        let g = GridGeometry::planar(3, 3, 1.0).unwrap();
        let err = neighbors8(&g, &full(9), CellIndex::new(3, 0)).unwrap_err();
        assert!(matches!(err, Error::OutOfBounds { .. }));
    }

    #[test]
    fn calendar_lengths() {
        assert_eq!(days_in_year(CalendarSpec::Fixed360, 1995), 360);
        assert_eq!(days_in_year(CalendarSpec::Gregorian, 2004), 366);
        assert_eq!(days_in_year(CalendarSpec::Gregorian, 1900), 365);
        assert_eq!(days_in_year(CalendarSpec::Gregorian, 2000), 366);
        let total: usize = (1969..=2005).map(|y| days_in_year(CalendarSpec::Gregorian, y)).sum();
        assert_eq!(total, 13_514);
    }

    #[test]
    fn month_day_round_trips() {
        for cal in [CalendarSpec::Fixed360, CalendarSpec::Gregorian] {
            for year in [1900, 1995, 2000] {
                for ord in 0..days_in_year(cal, year) {
                    let (m, d) = month_day(cal, year, ord).unwrap();
                    if cal == CalendarSpec::Fixed360 {
                        assert!(d <= 30);
                    }
                    assert_eq!(ordinal_of(cal, year, m, d).unwrap(), ord);
                }
            }
        }
        assert_eq!(month_day(CalendarSpec::Gregorian, 2000, 59).unwrap(), (2, 29));
        assert!(month_day(CalendarSpec::Fixed360, 2000, 360).is_err());
        assert!(ordinal_of(CalendarSpec::Fixed360, 2001, 2, 31).is_err());
    }

    #[test]
    fn kelvin_to_celsius() {
        let g = GridGeometry::planar(1, 3, 1.0).unwrap();
        let f = ScalarField::<f64>::new(g, vec![273.15, 300.0, 0.0], vec![true, true, false], Units::Kelvin).unwrap();
        let c = to_celsius(&f).unwrap();
        assert_eq!(c.units(), Units::Celsius);
        assert_abs_diff_eq!(c.values()[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.values()[1], 26.85, epsilon = 1e-12);
        assert_eq!(c.mask(), f.mask());
        assert_eq!(to_celsius(&c).unwrap(), c);
        let m = f.clone().with_units(Units::Meters);
        assert!(matches!(to_celsius(&m), Err(Error::Units(_))));
    }

    #[test]
    fn flat_terrain_has_zero_slope() {
        let g = GridGeometry::new(GridMode::Geographic, 10.0, 70.0, 1.0, 1.0, 5, 5).unwrap();
        let s = slope_field(&ScalarField::filled(g, 812.0f64, Units::Meters)).unwrap();
        for cell in g.cells() {
            let interior = (1..4).contains(&cell.row) && (1..4).contains(&cell.col);
            assert_eq!(s.is_valid(cell), interior);
            if interior {
                assert_eq!(s.get(cell), Some(0.0));
            }
        }
    }

    #[test]
    fn tilted_plane_slope_matches_hand_value() {
        let g = GridGeometry::planar(3, 3, 1000.0).unwrap();
        let e = ScalarField::from_fn(g, Units::Meters, |c| 100.0 * c.col as f64).unwrap();
        let s = slope_field(&e).unwrap();
        let centre = s.get(CellIndex::new(1, 1)).unwrap();
        assert_abs_diff_eq!(centre, 0.1f64.atan().to_degrees(), epsilon = 1e-12);
        assert_abs_diff_eq!(centre, 5.710593, epsilon = 1e-6);
    }

    #[test]
    fn slope_masks_incomplete_stencil() {
        let g = GridGeometry::planar(4, 4, 30.0).unwrap();
        let mut e = ScalarField::from_fn(g, Units::Meters, |c| (c.row * 3 + c.col) as f64).unwrap();
        e.mask_cell(CellIndex::new(0, 0));
        let s = slope_field(&e).unwrap();
        assert!(!s.is_valid(CellIndex::new(1, 1)));
        assert!(s.is_valid(CellIndex::new(2, 2)));
    }

    #[test]
    fn slope_rejects_small_grid_and_wrong_units() {
        let g = GridGeometry::planar(2, 5, 30.0).unwrap();
        assert!(matches!(
            slope_field(&ScalarField::filled(g, 1.0f64, Units::Meters)),
            Err(Error::Size(_))
        ));
        let g = GridGeometry::planar(3, 3, 30.0).unwrap();
        assert!(matches!(
            slope_field(&ScalarField::filled(g, 1.0f64, Units::Celsius)),
            Err(Error::Units(_))
        ));
    }

    #[test]
    fn geometry_validation() {
        assert!(GridGeometry::new(GridMode::Geographic, 89.0, 0.0, 1.0, 1.0, 3, 3).is_err());
        assert!(GridGeometry::new(GridMode::Planar, 0.0, 0.0, 0.0, 1.0, 3, 3).is_err());
        assert!(GridGeometry::new(GridMode::Planar, 0.0, 0.0, 1.0, 1.0, 0, 3).is_err());
        assert!(GridGeometry::new(GridMode::Geographic, 6.5, 66.5, 1.0, 1.0, 31, 31).is_ok());
    }

    #[test]
    fn field_rejects_non_finite_valid_values() {
        let g = GridGeometry::planar(1, 2, 1.0).unwrap();
        assert!(ScalarField::new(g, vec![1.0, f64::NAN], vec![true, true], Units::Celsius).is_err());
        assert!(ScalarField::new(g, vec![1.0, f64::NAN], vec![true, false], Units::Celsius).is_ok());
    }

    proptest! {
        #[test]
        fn neighbors_are_symmetric(nrows in 1usize..7, ncols in 1usize..7, bits in proptest::collection::vec(any::<bool>(), 36)) {
            let g = GridGeometry::planar(nrows, ncols, 1.0).unwrap();
            let mask: Vec<bool> = bits[..g.len()].to_vec();
            for a in g.cells() {
                let na = neighbors8(&g, &mask, a).unwrap();
                prop_assert!(na.len() <= 8);
                for b in g.cells() {
                    if !mask[g.index(a)] || !mask[g.index(b)] { continue; }
                    let nb = neighbors8(&g, &mask, b).unwrap();
                    prop_assert_eq!(na.contains(&b), nb.contains(&a));
                }
            }
        }

        #[test]
        fn kelvin_round_trip(vals in proptest::collection::vec(-100.0f64..500.0, 1..20)) {
            let g = GridGeometry::planar(1, vals.len(), 1.0).unwrap();
            let f = ScalarField::from_values(g, vals.clone(), Units::Kelvin).unwrap();
            let c = to_celsius(&f).unwrap();
            for (k, v) in c.values().iter().zip(&vals) {
                prop_assert!((k + KELVIN_OFFSET - v).abs() <= 1e-12);
            }
        }

        #[test]
        fn constant_elevation_is_flat(level in -500.0f64..9000.0, nrows in 3usize..8, ncols in 3usize..8) {
            let g = GridGeometry::new(GridMode::Geographic, -30.0, 10.0, 0.5, 0.5, nrows, ncols).unwrap();
            let s = slope_field(&ScalarField::filled(g, level, Units::Meters)).unwrap();
            for cell in g.cells() {
                if let Some(v) = s.get(cell) { prop_assert_eq!(v, 0.0); }
            }
        }
    }
}

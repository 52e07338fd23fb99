//! `row,col,label` CSV files. Unlabeled cells are omitted.

use std::collections::HashSet;
use std::path::Path;

use stclust_core::{CellIndex, GridGeometry, ZoneMap};

use crate::fail::{CmdResult, Failure};

const HEADER: [&str; 3] = ["row", "col", "label"];

fn csv_failure(path: &Path, e: csv::Error) -> Failure {
    if e.is_io_error() {
        Failure::io(path, e)
    } else {
        Failure::invalid(format!("{}: {e}", path.display()))
    }
}

pub fn to_csv(map: &ZoneMap) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(HEADER).expect("in-memory write");
    for (cell, label) in map.entries() {
        w.serialize((cell.row, cell.col, label)).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

pub fn read(path: &Path, geometry: &GridGeometry) -> CmdResult<ZoneMap> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_failure(path, e))?;
    let header = r.headers().map_err(|e| csv_failure(path, e))?;
    if header.iter().ne(HEADER) {
        let found: String = header.iter().collect::<Vec<_>>().join(",").chars().take(40).collect();
        return Err(Failure::invalid(format!(
            "{}: expected header row,col,label, found {found}",
            path.display()
        )));
    }
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (i, rec) in r.deserialize::<(usize, usize, u32)>().enumerate() {
        let (row, col, label) = rec.map_err(|e| csv_failure(path, e))?;
        let cell = CellIndex::new(row, col);
        if !geometry.contains(cell) {
            return Err(Failure::invalid(format!(
                "{} line {}: cell {cell} is outside the {}x{} grid",
                path.display(),
                i + 2,
                geometry.nrows,
                geometry.ncols
            )));
        }
        if !seen.insert(cell) {
            return Err(Failure::invalid(format!(
                "{} line {}: cell {cell} listed twice",
                path.display(),
                i + 2
            )));
        }
        entries.push((cell, label));
    }
    Ok(ZoneMap::from_entries(*geometry, entries)?)
}

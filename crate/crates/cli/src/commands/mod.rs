use std::path::Path;

use stclust_core::ingest::{check_dataset, DatasetManifest};
use stclust_core::DailySeriesGrid;

use crate::fail::{CmdResult, Failure};
use crate::meta::{dataset_digests, InputDigest};

pub mod compare;
pub mod kmeans;
pub mod mistic;
pub mod render;
pub mod synth;
pub mod validate;

pub(crate) struct Loaded {
    pub manifest: DatasetManifest,
    pub series: DailySeriesGrid,
    pub digests: Vec<InputDigest>,
}

/// Loads a dataset, failing with every violation listed.
pub(crate) fn load(root: &Path) -> CmdResult<Loaded> {
    let check = check_dataset::<f64>(root)?;
    let Some(series) = check.series else {
        return Err(Failure::invalid(format!(
            "{}: {} violation(s)\n  {}",
            root.display(),
            check.violations.len(),
            check.violations.join("\n  ")
        )));
    };
    let digests = dataset_digests(root, &check.manifest)?;
    Ok(Loaded {
        manifest: check.manifest,
        series,
        digests,
    })
}

pub(crate) fn notice(message: &str) {
    eprintln!("notice: {message}");
}

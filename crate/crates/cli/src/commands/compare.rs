use std::path::Path;

use serde::Serialize;
use stclust_core::analysis::{cluster_summary, compare, ComparisonReport, SummaryReport};
use stclust_core::grid::slope_field;
use stclust_core::ingest::{build_annual_stack, load_elevation};
use stclust_core::GridGeometry;

use crate::args::CompareArgs;
use crate::commands::{load, notice};
use crate::fail::{CmdResult, Failure};
use crate::labels;
use crate::meta::{digest, sibling_geometry, OutDir, RUN_META_FILE};
use crate::svg;

/// Grid for a label file: the dataset's if given, else the one in the sibling `run_meta.json`.
pub(crate) fn grid_for(labels: &Path, dataset: Option<&GridGeometry>) -> CmdResult<GridGeometry> {
    let Some(g) = dataset else {
        return sibling_geometry(labels);
    };
    let meta = labels.parent().unwrap_or(Path::new(".")).join(RUN_META_FILE);
    if meta.is_file() {
        if let Ok(recorded) = sibling_geometry(labels) {
            if recorded != *g {
                return Err(Failure::invalid(format!(
                    "{} was produced on a different grid than the dataset",
                    labels.display()
                )));
            }
        }
    }
    Ok(*g)
}

#[derive(Debug, Serialize)]
struct Comparison<'a> {
    a: String,
    b: String,
    #[serde(flatten)]
    report: &'a ComparisonReport,
}

#[derive(Debug, Serialize)]
struct Summaries {
    a: SummaryReport,
    b: SummaryReport,
    notices: Vec<String>,
}

pub fn run(args: &CompareArgs) -> CmdResult {
    let data = args.dataset.as_deref().map(load).transpose()?;
    let dg = data.as_ref().map(|d| d.manifest.geometry);
    let ga = grid_for(&args.a, dg.as_ref())?;
    let gb = grid_for(&args.b, dg.as_ref())?;
    if ga != gb {
        return Err(Failure::invalid(format!(
            "{} and {} are on different grids",
            args.a.display(),
            args.b.display()
        )));
    }
    let a = labels::read(&args.a, &ga)?;
    let b = labels::read(&args.b, &gb)?;
    let report = compare(&a, &b)?;

    let mut inputs = vec![digest(&args.a)?, digest(&args.b)?];
    let mut notices: Vec<String> = report.contingency.warnings.clone();
    let stack = match &data {
        Some(d) => {
            inputs.extend(d.digests.iter().cloned());
            Some(build_annual_stack(&d.series, args.min_valid_fraction)?)
        }
        None => None,
    };
    let elevation = match (&args.elevation, &data) {
        (Some(path), Some(d)) => {
            inputs.push(digest(path)?);
            Some(load_elevation::<f64>(path, &ga, d.manifest.missing_value)?)
        }
        _ => None,
    };
    let slope = match &elevation {
        Some(e) => match slope_field(e) {
            Ok(s) => Some(s),
            Err(err) => {
                notices.push(format!("slope unavailable: {err}"));
                None
            }
        },
        None => None,
    };
    let summaries = Summaries {
        a: cluster_summary(&a, elevation.as_ref(), slope.as_ref(), stack.as_ref())?,
        b: cluster_summary(&b, elevation.as_ref(), slope.as_ref(), stack.as_ref())?,
        notices,
    };

    let mut out = OutDir::create(&args.out)?;
    out.json(
        "comparison.json",
        &Comparison {
            a: args.a.display().to_string(),
            b: args.b.display().to_string(),
            report: &report,
        },
    )?;
    out.json("summary.json", &summaries)?;
    if elevation.is_some() {
        let svg = svg::elev_slope(&[("A", &summaries.a), ("B", &summaries.b)]);
        out.write("elev_slope.svg", svg.as_bytes())?;
    }
    out.finish("compare", args, Some(ga), &inputs)?;

    for n in &summaries.notices {
        notice(n);
    }
    match report.adjusted_rand {
        Some(ari) => println!("ARI {ari:.6} over {} shared cell(s)", report.contingency.total),
        None => println!("ARI undefined: {} shared cell(s)", report.contingency.total),
    }
    Ok(())
}

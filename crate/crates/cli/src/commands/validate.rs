use serde::Serialize;
use stclust_core::ingest::check_dataset;
use stclust_core::GridGeometry;

use crate::args::ValidateArgs;
use crate::fail::{CmdResult, Failure};
use crate::meta::{dataset_digests, OutDir};

#[derive(Debug, Serialize)]
struct ValidationReport<'a> {
    valid: bool,
    variable: &'a str,
    years: &'a [i32],
    geometry: GridGeometry,
    violations: &'a [String],
}

pub fn run(args: &ValidateArgs) -> CmdResult {
    let check = check_dataset::<f64>(&args.dataset)?;
    let m = &check.manifest;
    let valid = check.violations.is_empty();
    if let Some(dir) = &args.out {
        let mut out = OutDir::create(dir)?;
        out.json(
            "validation.json",
            &ValidationReport {
                valid,
                variable: &m.variable,
                years: &m.years,
                geometry: m.geometry,
                violations: &check.violations,
            },
        )?;
        let inputs = if valid {
            dataset_digests(&args.dataset, m)?
        } else {
            Vec::new()
        };
        out.finish("validate", args, Some(m.geometry), &inputs)?;
    }
    if !valid {
        for v in &check.violations {
            eprintln!("{v}");
        }
        return Err(Failure::invalid(format!(
            "{}: {} violation(s)",
            args.dataset.display(),
            check.violations.len()
        )));
    }
    println!(
        "{}: ok ({} {}, {} years {}..{}, {}x{} grid)",
        args.dataset.display(),
        m.variable,
        serde_json::to_value(m.units)
            .expect("units serialize")
            .as_str()
            .unwrap_or_default(),
        m.years.len(),
        m.years[0],
        m.years[m.years.len() - 1],
        m.geometry.nrows,
        m.geometry.ncols
    );
    Ok(())
}

use stclust_core::ingest::build_annual_stack;
use stclust_core::mistic::{run_mistic, CoreMode, DominanceThresholds, MisticParams, Orientation};

use crate::args::{MisticArgs, ModeArg, OrientationArg};
use crate::commands::{load, notice};
use crate::fail::{CmdResult, Failure};
use crate::labels;
use crate::meta::OutDir;
use crate::report::{CoresReport, FociReport};
use crate::svg;

pub fn params(args: &MisticArgs, variable: &str) -> CmdResult<MisticParams> {
    let orientation = match args.orientation {
        OrientationArg::Maxima => Orientation::Maxima,
        OrientationArg::Minima => Orientation::Minima,
        OrientationArg::Auto => Orientation::for_variable(variable),
    };
    let mode = match (args.mode, args.radius) {
        (ModeArg::Cc, None) => CoreMode::Contiguous,
        (ModeArg::Cc, Some(_)) => return Err(Failure::invalid("--radius applies only to --mode cr")),
        (ModeArg::Cr, Some(r)) => CoreMode::Radius(r),
        (ModeArg::Cr, None) => return Err(Failure::invalid("--mode cr needs --radius")),
    };
    let thresholds = DominanceThresholds {
        theta_high: args.theta_high,
        theta_dom: args.theta_dom,
    };
    thresholds.validate()?;
    Ok(MisticParams {
        orientation,
        min_years: args.min_years,
        mode,
        thresholds,
    })
}

pub fn run(args: &MisticArgs) -> CmdResult {
    let data = load(&args.dataset)?;
    let params = params(args, &data.manifest.variable)?;
    let stack = build_annual_stack(&data.series, args.min_valid_fraction)?;
    let result = run_mistic(&stack, &params)?;

    let mut out = OutDir::create(&args.out)?;
    for (year, zones) in result.years.iter().zip(&result.yearly_zones) {
        out.write(&format!("zones_{year}.csv"), &labels::to_csv(zones))?;
    }
    out.json("foci.json", &FociReport::new(&result))?;
    out.json("cores.json", &CoresReport::new(&result, &params))?;
    out.write("consensus.csv", &labels::to_csv(&result.consensus))?;
    let title = format!(
        "{} consensus zones ({} cores)",
        data.manifest.variable,
        result.cores.len()
    );
    out.write(
        "map_consensus.svg",
        svg::zone_map(&result.consensus, &title, args.cell_px).as_bytes(),
    )?;
    out.finish("mistic", args, Some(*stack.geometry()), &data.digests)?;

    for n in &result.notices {
        notice(n);
    }
    println!(
        "{} focus cell(s), {} frequent, {} core(s)",
        result.table.len(),
        result.table.frequent_cells().len(),
        result.cores.len()
    );
    Ok(())
}

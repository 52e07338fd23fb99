use stclust_core::ingest::{write_dataset, write_elevation, ELEVATION_FILE};
use stclust_core::synth::{planted_dataset, PlantedConfig};

use crate::args::SynthArgs;
use crate::fail::{CmdResult, Failure};
use crate::labels;
use crate::meta::OutDir;

pub const MISSING_VALUE: f64 = -9999.0;
pub const TRUTH_FILE: &str = "truth.csv";

pub fn run(args: &SynthArgs) -> CmdResult {
    if args.size < 4 || args.years < 1 || args.b_years > args.years {
        return Err(Failure::invalid(
            "need --size >= 4, --years >= 1 and --b-years <= --years",
        ));
    }
    let cfg = PlantedConfig {
        nrows: args.size,
        ncols: args.size,
        years: args.years,
        b_years: args.b_years,
        seed: args.seed,
        ..Default::default()
    };
    let ds = planted_dataset(&cfg)?;
    let mut out = OutDir::create(&args.out)?;
    let manifest = write_dataset(&args.out, &ds.series, MISSING_VALUE)?;
    write_elevation(&out.path(ELEVATION_FILE), &ds.elevation, MISSING_VALUE)?;
    out.write(TRUTH_FILE, &labels::to_csv(&ds.truth))?;
    out.finish("synth", args, Some(manifest.geometry), &[])?;
    println!(
        "wrote {} years on a {}x{} grid; bump A at {}, bump B at {} in {} year(s)",
        args.years,
        args.size,
        args.size,
        cfg.bump_a(),
        cfg.bump_b(),
        ds.b_present.len()
    );
    Ok(())
}

use stclust_core::ingest::build_annual_stack;
use stclust_core::kmeans::{build_features, sweep_k};

use crate::args::KmeansArgs;
use crate::commands::load;
use crate::fail::{CmdResult, Failure};
use crate::labels;
use crate::meta::OutDir;
use crate::report::{KmeansReport, KmeansRun};
use crate::svg;

pub fn run(args: &KmeansArgs) -> CmdResult {
    let mut ks = args.k.clone();
    ks.sort_unstable();
    ks.dedup();
    if ks.first() == Some(&0) {
        return Err(Failure::invalid("--k values must be at least 1"));
    }
    let data = load(&args.dataset)?;
    let stack = build_annual_stack(&data.series, args.min_valid_fraction)?;
    let fm = build_features(&stack, true)?;
    let maps = sweep_k(&fm, &ks, args.seed, args.restarts, args.max_iter, 0.0)?;

    let mut out = OutDir::create(&args.out)?;
    for m in &maps {
        out.write(&format!("labels_k{}.csv", m.k), &labels::to_csv(&m.zones))?;
        let title = format!("{} k-means, k = {}", data.manifest.variable, m.k);
        out.write(
            &format!("map_k{}.svg", m.k),
            svg::zone_map(&m.zones, &title, args.cell_px).as_bytes(),
        )?;
    }
    out.json(
        "kmeans_report.json",
        &KmeansReport {
            variable: data.manifest.variable.clone(),
            years: stack.years().to_vec(),
            cells: fm.len(),
            features: "annual_mean",
            standardized: true,
            seed: args.seed,
            restarts: args.restarts,
            max_iter: args.max_iter,
            runs: maps.iter().map(KmeansRun::new).collect(),
        },
    )?;
    out.finish("kmeans", args, Some(*stack.geometry()), &data.digests)?;
    for m in &maps {
        println!("k={}: inertia {:.6}, {} iteration(s)", m.k, m.inertia, m.iterations);
    }
    Ok(())
}

use crate::args::RenderArgs;
use crate::commands::compare::grid_for;
use crate::commands::load;
use crate::fail::CmdResult;
use crate::labels;
use crate::meta::{digest, OutDir};
use crate::svg;

pub fn run(args: &RenderArgs) -> CmdResult {
    let data = args.dataset.as_deref().map(load).transpose()?;
    let g = grid_for(&args.labels, data.as_ref().map(|d| &d.manifest.geometry))?;
    let map = labels::read(&args.labels, &g)?;
    let stem = args
        .labels
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "labels".into());
    let title = args.title.clone().unwrap_or_else(|| stem.clone());

    let mut inputs = vec![digest(&args.labels)?];
    if let Some(d) = &data {
        inputs.extend(d.digests.iter().cloned());
    }
    let mut out = OutDir::create(&args.out)?;
    out.write(
        &format!("{stem}.svg"),
        svg::zone_map(&map, &title, args.cell_px).as_bytes(),
    )?;
    out.finish("render", args, Some(g), &inputs)
}

//! Command implementations behind the `stclust` binary.

pub mod args;
pub mod commands;
pub mod fail;
pub mod labels;
pub mod meta;
pub mod report;
pub mod svg;

use args::{Cli, Command};
use fail::CmdResult;

pub fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Validate(a) => commands::validate::run(a),
        Command::Kmeans(a) => commands::kmeans::run(a),
        Command::Mistic(a) => commands::mistic::run(a),
        Command::Compare(a) => commands::compare::run(a),
        Command::Render(a) => commands::render::run(a),
        Command::Synth(a) => commands::synth::run(a),
    }
}

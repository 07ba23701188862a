//! Command-line orchestration for the hexwatt simulator: single runs,
//! parallel sweeps with resumable manifests, summaries, replay and plots.

pub mod args;
pub mod common;
pub mod error;
pub mod plot;
pub mod run;
pub mod sweep;

use std::path::Path;

use args::{Cli, Command};
use error::{CliError, Result};

pub fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run(a) => run::cmd_run(a),
        Command::Sweep(a) => sweep::cmd_sweep(a),
        Command::Aggregate(a) => sweep::cmd_aggregate(a),
        Command::Plot(a) => plot::cmd_plot(a).map(|_| ()),
        Command::Replay(a) => replay(&a.dir),
        Command::Topology(a) => run::cmd_topology(a),
    }
}

fn replay(dir: &Path) -> Result<()> {
    let ok = if dir.join(run::RUN_SUMMARY).exists() {
        run::replay_run(dir)?
    } else if dir.join(sweep::PLAN_FILE).exists() {
        sweep::replay_sweep(dir)?
    } else {
        return Err(CliError::MissingFile(format!(
            "{}: neither {} nor {} found",
            dir.display(),
            run::RUN_SUMMARY,
            sweep::PLAN_FILE
        )));
    };
    if ok {
        Ok(())
    } else {
        Err(CliError::Runtime("replayed metrics differ from stored results".into()))
    }
}

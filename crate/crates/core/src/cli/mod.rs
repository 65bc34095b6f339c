//! Configuration-driven runs: sweep, checks and output files.

mod checks;
mod config;
mod output;

use std::fs;

pub use checks::{run_checks, CheckOutcome, CheckStatus, Witness};
pub use config::{
    parse_check_list, parse_config, render, CheckName, OutputConfig, RunConfig, DEFAULT_BANDS,
    DEFAULT_P_STEPS,
};
pub use output::{bands_csv, bands_svg, failure_list, gaps_csv, report};

use crate::dispersion::{self, BandStructure};
use crate::error::Result;

/// Everything a run computed.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub bands: BandStructure,
    pub checks: Vec<CheckOutcome>,
}

impl RunOutcome {
    /// No requested check failed.
    pub fn success(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

/// Sweep and check without touching the filesystem.
pub fn compute(cfg: &RunConfig) -> Result<RunOutcome> {
    let bands = dispersion::sweep(&cfg.potential, cfg.field, &cfg.sweep)?;
    let checks = run_checks(cfg, &bands, &cfg.checks);
    Ok(RunOutcome { bands, checks })
}

/// Compute, then write `bands.csv`, `gaps.csv`, `report.txt` and, when
/// enabled, `bands.svg` into the output directory.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let outcome = compute(cfg)?;
    let dir = &cfg.output.dir;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("bands.csv"), bands_csv(&outcome.bands))?;
    fs::write(dir.join("gaps.csv"), gaps_csv(&outcome.bands))?;
    fs::write(dir.join("report.txt"), report(cfg, &outcome.bands, &outcome.checks))?;
    if cfg.output.svg {
        fs::write(dir.join("bands.svg"), bands_svg(&outcome.bands))?;
    }
    Ok(outcome)
}

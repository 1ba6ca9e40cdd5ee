//! Experiment runner: configuration, the named experiments, JSON manifests
//! and the consolidated report.

pub mod config;
pub mod error;
pub mod experiments;
pub mod ext;
pub mod manifest;
pub mod report;

use std::path::PathBuf;

pub use config::{ExperimentConfig, ExperimentId, FileConfig, Overrides, Params, ShearPreset};
pub use error::{CliError, Result};
pub use manifest::{Assertion, Manifest, Recorder, MANIFEST_FILE};
pub use report::{Report, ReportRow};

/// Manifest and output directory of one run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub manifest: Manifest,
    pub dir: PathBuf,
}

/// Runs one experiment on a pool of `cfg.jobs` workers and writes its
/// artifacts under `cfg.output/<experiment>`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Resource(format!("cannot start {} workers: {e}", cfg.jobs)))?;
    pool.install(|| {
        let dir = cfg.dir();
        let mut rec = Recorder::new(dir.clone())?;
        experiments::run(cfg, &mut rec)?;
        let manifest = rec.finish(cfg)?;
        Ok(Outcome { manifest, dir })
    })
}

//! JSON manifests: the resolved configuration, timings, produced files and
//! every asserted inequality with its outcome.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::ext::real;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    /// The statement being checked.
    pub reference: String,
    #[serde(with = "real")]
    pub measured: f64,
    /// Predicted value or admissible range, as text.
    pub prediction: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub experiment: String,
    pub version: String,
    pub core_version: String,
    pub config: serde_json::Value,
    pub key_parameters: String,
    pub started_unix: u64,
    /// Seconds per stage, plus `total`.
    pub timings: BTreeMap<String, f64>,
    pub assertions: Vec<Assertion>,
    pub outputs: Vec<String>,
    pub passed: bool,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let path = if path.is_dir() { path.join(MANIFEST_FILE) } else { path.to_path_buf() };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Manifest(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Manifest(format!("{}: {e}", path.display())))
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }
}

/// Collects assertions, outputs and timings while an experiment runs.
pub struct Recorder {
    dir: PathBuf,
    started: Instant,
    started_unix: u64,
    key_parameters: String,
    timings: BTreeMap<String, f64>,
    assertions: Vec<Assertion>,
    outputs: Vec<String>,
}

impl Recorder {
    pub fn new(dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir)?;
        let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Ok(Self {
            dir,
            started: Instant::now(),
            started_unix,
            key_parameters: String::new(),
            timings: BTreeMap::new(),
            assertions: Vec::new(),
            outputs: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key_parameters(&mut self, text: impl Into<String>) {
        self.key_parameters = text.into();
    }

    /// Runs `f` and records its wall time under `stage`.
    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        *self.timings.entry(stage.to_string()).or_default() += t.elapsed().as_secs_f64();
        out
    }

    pub fn check(
        &mut self,
        name: &str,
        reference: &str,
        measured: f64,
        prediction: impl Into<String>,
        passed: bool,
    ) {
        self.assertions.push(Assertion {
            name: name.into(),
            reference: reference.into(),
            measured,
            prediction: prediction.into(),
            passed,
        });
    }

    /// `measured ≤ bound`.
    pub fn at_most(&mut self, name: &str, reference: &str, measured: f64, bound: f64) {
        self.check(name, reference, measured, format!("<= {bound:e}"), measured <= bound);
    }

    /// `measured ≥ bound`.
    pub fn at_least(&mut self, name: &str, reference: &str, measured: f64, bound: f64) {
        self.check(name, reference, measured, format!(">= {bound:e}"), measured >= bound);
    }

    /// `|measured - target| ≤ tol`.
    pub fn near(&mut self, name: &str, reference: &str, measured: f64, target: f64, tol: f64) {
        let ok = (measured - target).abs() <= tol;
        self.check(name, reference, measured, format!("{target} +- {tol}"), ok);
    }

    pub fn write(&mut self, file: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf> {
        let path = self.dir.join(file);
        std::fs::write(&path, contents)?;
        self.outputs.push(file.to_string());
        Ok(path)
    }

    /// Registers a file written by other code.
    pub fn produced(&mut self, path: &Path) {
        let name = path.strip_prefix(&self.dir).unwrap_or(path);
        self.outputs.push(name.to_string_lossy().into_owned());
    }

    pub fn finish(mut self, cfg: &ExperimentConfig) -> Result<Manifest> {
        self.timings.insert("total".into(), self.started.elapsed().as_secs_f64());
        let config = serde_json::to_value(cfg).map_err(|e| CliError::Manifest(e.to_string()))?;
        let passed = self.assertions.iter().all(|a| a.passed);
        let manifest = Manifest {
            experiment: cfg.experiment.as_str().into(),
            version: env!("CARGO_PKG_VERSION").into(),
            core_version: illposed_core::VERSION.into(),
            config,
            key_parameters: self.key_parameters,
            started_unix: self.started_unix,
            timings: self.timings,
            assertions: self.assertions,
            outputs: self.outputs,
            passed,
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Manifest(e.to_string()))?;
        std::fs::write(self.dir.join(MANIFEST_FILE), text + "\n")?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentId;

    #[test]
    fn manifest_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig::with_defaults(ExperimentId::ShearGap, dir.path()).unwrap();
        let mut rec = Recorder::new(cfg.dir()).unwrap();
        rec.at_least("gap", "gap at least two", 2.0, 1.98);
        rec.at_most("unbounded", "never bounded", f64::INFINITY, 1.0);
        rec.write("a.csv", "x\n1\n").unwrap();
        let m = rec.finish(&cfg).unwrap();
        assert!(!m.passed);
        let back = Manifest::read(&cfg.dir()).unwrap();
        assert_eq!(back.assertions, m.assertions);
        assert_eq!(back.outputs, vec!["a.csv".to_string()]);
        assert_eq!(back.config["params"]["t_end"], 1.0);
        assert_eq!(back.failures().count(), 1);
    }
}

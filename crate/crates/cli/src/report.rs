//! Consolidated summary of several manifests.

use std::fmt::Write;
use std::path::PathBuf;

use crate::error::Result;
use crate::manifest::{Assertion, Manifest};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub key_parameters: String,
    pub measured: String,
    pub prediction: String,
    pub passed: bool,
    pub failed: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

impl Report {
    /// Reads every manifest (a file or a directory holding `manifest.json`)
    /// and sorts the rows by experiment id.
    pub fn from_paths(paths: &[PathBuf]) -> Result<Self> {
        let mut rows = Vec::with_capacity(paths.len());
        for p in paths {
            rows.push(row(&Manifest::read(p)?));
        }
        rows.sort_by(|a, b| a.experiment.cmp(&b.experiment));
        Ok(Self { rows })
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn table(&self) -> String {
        let header = ["experiment", "key parameters", "measured", "prediction", "status"];
        let cells: Vec<[String; 5]> = self
            .rows
            .iter()
            .map(|r| {
                let status = if r.passed { "pass".to_string() } else { format!("FAIL ({})", r.failed.join(", ")) };
                [r.experiment.clone(), r.key_parameters.clone(), r.measured.clone(), r.prediction.clone(), status]
            })
            .collect();
        let mut width = header.map(|h| h.chars().count());
        for c in &cells {
            for (w, s) in width.iter_mut().zip(c) {
                *w = (*w).max(s.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cols: &[String]| {
            let padded: Vec<String> =
                cols.iter().zip(&width).map(|(s, &w)| format!("{s}{}", " ".repeat(w - s.chars().count()))).collect();
            let _ = writeln!(out, "| {} |", padded.join(" | "));
        };
        line(&mut out, &header.map(String::from));
        let _ = writeln!(out, "|{}|", width.iter().map(|w| "-".repeat(w + 2)).collect::<Vec<_>>().join("|"));
        for c in &cells {
            line(&mut out, c);
        }
        out
    }
}

/// The row shows the first failed assertion, or the first assertion when all
/// pass.
fn row(m: &Manifest) -> ReportRow {
    let shown: Option<&Assertion> = m.failures().next().or(m.assertions.first());
    ReportRow {
        experiment: m.experiment.clone(),
        key_parameters: m.key_parameters.clone(),
        measured: shown.map(|a| format!("{}: {:.6e}", a.name, a.measured)).unwrap_or_default(),
        prediction: shown.map(|a| a.prediction.clone()).unwrap_or_default(),
        passed: m.passed && m.failures().next().is_none(),
        failed: m.failures().map(|a| a.name.clone()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_passes() {
        let r = Report::from_paths(&[]).unwrap();
        assert!(r.rows.is_empty() && r.passed());
        assert_eq!(r.table().lines().count(), 2);
    }

    #[test]
    fn missing_manifest_is_an_error() {
        assert!(Report::from_paths(&[PathBuf::from("/nonexistent/manifest.json")]).is_err());
    }
}

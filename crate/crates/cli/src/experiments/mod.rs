//! The named experiments. Each reads its resolved parameters, writes CSV
//! files through the [`Recorder`] and records one assertion per checked
//! inequality.

mod covering_audit;
mod embedding;
mod euler_growth;
mod flow_jacobian;
mod lemfi;
mod norm_scaling;
mod shear_gap;

pub use covering_audit::audit_coverings;

use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentId};
use crate::error::{CliError, Result};
use crate::manifest::Recorder;

pub fn run(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    match cfg.experiment {
        ExperimentId::ShearGap => shear_gap::run(cfg, rec),
        ExperimentId::NormScaling => norm_scaling::run(cfg, rec),
        ExperimentId::LemfiEquivalence => lemfi::run(cfg, rec),
        ExperimentId::Embedding => embedding::run(cfg, rec),
        ExperimentId::CoveringAudit => covering_audit::run(cfg, rec),
        ExperimentId::EulerGrowth => euler_growth::run(cfg, rec),
        ExperimentId::FlowJacobian => flow_jacobian::run(cfg, rec),
    }
}

/// Evaluates `f` over the sweep points; results keep the input order, so the
/// outcome does not depend on the number of workers.
pub(crate) fn sweep<T, R, F>(items: &[T], f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync + Send,
{
    items.par_iter().map(f).collect()
}

pub(crate) fn need<T: Clone>(v: &Option<T>, name: &str) -> Result<T> {
    v.clone().ok_or_else(|| CliError::Config(format!("missing parameter {name}")))
}

pub(crate) fn single<T: Clone>(v: &Option<Vec<T>>, name: &str) -> Result<T> {
    match v.as_deref() {
        Some([x]) => Ok(x.clone()),
        Some(xs) => Err(CliError::Config(format!("{name} takes a single value here, got {}", xs.len()))),
        None => Err(CliError::Config(format!("missing parameter {name}"))),
    }
}

pub(crate) fn list<T: Clone>(v: &Option<Vec<T>>, name: &str) -> Result<Vec<T>> {
    match v {
        Some(xs) if !xs.is_empty() => Ok(xs.clone()),
        _ => Err(CliError::Config(format!("{name} needs at least one value"))),
    }
}

pub(crate) fn fmt_list<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

pub(crate) fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

use serde::Serialize;

use illposed_core::funcspace::{
    alpha_mod_norm, besov_norm, bapu_json, build_alpha_covering, build_bapu, NormSpec, AREA_LAW_BOUNDS,
    ECCENTRICITY_LIMIT, KERNEL_BOUND_LIMIT, MAX_OVERLAP,
};
use illposed_core::spectral::GridSpec;

use super::embedding::{embedding_csv, record_embedding, Suite};
use super::{csv, fmt_list, list, need, sweep};
use crate::config::{ExperimentConfig, EMBEDDING_BOUND};
use crate::error::Result;
use crate::ext::format_real;
use crate::manifest::Recorder;

pub const AUDIT_CSV_HEADER: &str = "alpha,xi_max,patches,uncovered,max_overlap,area_law_min,area_law_max,\
max_eccentricity,centers_inside,partition_defect,support_violations,range_defect,kernel_bound";
pub const BESOV_CSV_HEADER: &str = "field,alpha_one_norm,besov_norm,ratio";

/// Largest `|Σψ_Q - 1|` accepted on the covered disc.
pub const PARTITION_TOLERANCE: f64 = 1e-10;

/// One audited property of a covering.
#[derive(Debug, Clone)]
pub struct Invariant {
    pub name: &'static str,
    pub measured: f64,
    pub expected: String,
    pub ok: bool,
}

/// Audit of one covering and its partition of unity.
#[derive(Debug, Clone, Serialize)]
pub struct CoveringReport {
    pub alpha: f64,
    pub xi_max: f64,
    pub patches: usize,
    pub uncovered: usize,
    pub max_overlap: usize,
    pub area_law: (f64, f64),
    pub max_eccentricity: f64,
    pub centers_inside: bool,
    pub partition_defect: f64,
    pub support_violations: usize,
    pub range_defect: f64,
    pub kernel_bound: f64,
}

impl CoveringReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.12e},{:.12e},{:.12e},{},{:.12e},{},{:.12e},{:.12e}",
            self.alpha,
            self.xi_max,
            self.patches,
            self.uncovered,
            self.max_overlap,
            self.area_law.0,
            self.area_law.1,
            self.max_eccentricity,
            self.centers_inside,
            self.partition_defect,
            self.support_violations,
            self.range_defect,
            self.kernel_bound
        )
    }

    /// Invariant name, measured quantity, expectation and outcome.
    pub fn invariants(&self) -> [Invariant; 7] {
        let inv = |name, measured, expected: String, ok| Invariant { name, measured, expected, ok };
        [
            inv(
                "coverage",
                self.uncovered as f64,
                "0 uncovered bins, centres inside".into(),
                self.uncovered == 0 && self.centers_inside,
            ),
            inv("overlap", self.max_overlap as f64, format!("<= {MAX_OVERLAP}"), self.max_overlap <= MAX_OVERLAP),
            inv(
                "area law",
                self.area_law.1,
                format!("ratios in [{}, {}]", AREA_LAW_BOUNDS.0, AREA_LAW_BOUNDS.1),
                self.area_law.0 >= AREA_LAW_BOUNDS.0 && self.area_law.1 <= AREA_LAW_BOUNDS.1,
            ),
            inv(
                "eccentricity",
                self.max_eccentricity,
                format!("<= {ECCENTRICITY_LIMIT}"),
                self.max_eccentricity <= ECCENTRICITY_LIMIT,
            ),
            inv(
                "window support",
                self.range_defect,
                format!("no violations, range defect <= {PARTITION_TOLERANCE:e}"),
                self.support_violations == 0 && self.range_defect <= PARTITION_TOLERANCE,
            ),
            inv(
                "partition of unity",
                self.partition_defect,
                format!("<= {PARTITION_TOLERANCE:e}"),
                self.partition_defect <= PARTITION_TOLERANCE,
            ),
            inv(
                "kernel bound",
                self.kernel_bound,
                format!("<= {KERNEL_BOUND_LIMIT}"),
                self.kernel_bound <= KERNEL_BOUND_LIMIT,
            ),
        ]
    }

    pub fn passes(&self) -> bool {
        self.invariants().iter().all(|i| i.ok)
    }
}

/// Builds and audits one covering per `α`. With `json_dir`, the partition
/// (patches, windows, audit) is written there as JSON.
pub fn audit_coverings(
    alphas: &[f64],
    xi_max: f64,
    grid: GridSpec,
    p: f64,
    json_dir: Option<&std::path::Path>,
) -> Result<Vec<CoveringReport>> {
    sweep(alphas, |&alpha| {
        let cov = build_alpha_covering(alpha, xi_max, grid)?;
        let audit = cov.audit();
        let bapu = build_bapu(&cov, p)?;
        if let Some(dir) = json_dir {
            let text = serde_json::to_string(&bapu_json(&bapu)).map_err(std::io::Error::other)?;
            std::fs::write(dir.join(format!("bapu_alpha{alpha}.json")), text)?;
        }
        Ok(CoveringReport {
            alpha,
            xi_max,
            patches: audit.patch_count,
            uncovered: audit.uncovered,
            max_overlap: audit.max_overlap,
            area_law: audit.area_law,
            max_eccentricity: audit.max_eccentricity,
            centers_inside: audit.centers_inside,
            partition_defect: bapu.partition_defect(),
            support_violations: bapu.support_violations(),
            range_defect: bapu.range_defect(),
            kernel_bound: bapu.kernel_bound,
        })
    })
}

pub fn audit_csv(reports: &[CoveringReport]) -> String {
    csv(AUDIT_CSV_HEADER, reports.iter().map(CoveringReport::csv_row))
}

pub fn run(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = &cfg.params;
    let alphas = list(&p.alpha, "alpha")?;
    let xi_max = need(&p.xi_max, "xi_max")?;
    let half_width = need(&p.half_width, "half_width")?;
    let grid = GridSpec::new(half_width, need(&p.grid_n, "grid_n")?)?;
    let lp = need(&p.p, "p")?;
    let q = need(&p.q, "q")?;
    let s = need(&p.s, "s")?;
    let bound = need(&p.bound, "bound")?;
    let band = need(&p.band, "band")?;
    rec.key_parameters(format!("alpha={} xi_max={xi_max} p={}", fmt_list(&alphas), format_real(lp)));

    let reports = rec.time("coverings", || audit_coverings(&alphas, xi_max, grid, lp, None))?;
    rec.write("covering_audit.csv", audit_csv(&reports))?;
    for r in &reports {
        for inv in r.invariants() {
            rec.check(
                &format!("alpha {}: {}", r.alpha, inv.name),
                "alpha-covering and partition-of-unity axioms",
                inv.measured,
                inv.expected,
                inv.ok,
            );
        }
    }

    // The random suite lives on a small grid that resolves its band.
    let suite_grid = GridSpec::new(half_width, (4 * band).next_power_of_two())?;
    let suite = Suite {
        grid: suite_grid,
        band,
        fields: need(&p.fields, "fields")?,
        seed: cfg.seed,
        xi_max: 2.0 * band as f64 * suite_grid.dxi(),
    };
    let dyadic = suite.bapu(1.0, lp)?;
    let spec = NormSpec::AlphaMod { s, alpha: 1.0, p: lp, q };
    let idx: Vec<usize> = (0..suite.fields).collect();
    let besov = rec.time("besov comparison", || {
        sweep(&idx, |&i| {
            let f = suite.field(i)?;
            Ok((alpha_mod_norm(&f, &spec, &dyadic)?, besov_norm(&f, s, lp, q)?))
        })
    })?;
    rec.write(
        "besov_comparison.csv",
        csv(
            BESOV_CSV_HEADER,
            besov.iter().enumerate().map(|(i, (a, b))| format!("{i},{a:.12e},{b:.12e},{:.12e}", a / b)),
        ),
    )?;
    let ratios: Vec<f64> = besov.iter().map(|(a, b)| a / b).collect();
    let reference = "at alpha = 1 the modulation norm coincides with the Besov norm up to fixed constants";
    rec.at_least("besov ratio lower", reference, ratios.iter().cloned().fold(f64::INFINITY, f64::min), 1.0 / bound);
    rec.at_most("besov ratio upper", reference, ratios.iter().cloned().fold(0.0, f64::max), bound);

    let (a1, a2) = (need(&p.alpha1, "alpha1")?, need(&p.alpha2, "alpha2")?);
    let pairs = rec.time("embedding", || suite.embedding_pairs(s, lp, a1.min(a2), a1.max(a2)))?;
    rec.write("embedding.csv", embedding_csv(&pairs))?;
    record_embedding(rec, &pairs, a1.min(a2), a1.max(a2), EMBEDDING_BOUND);
    Ok(())
}

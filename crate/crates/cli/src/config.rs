//! Experiment configuration: TOML file, command-line overrides and the
//! per-experiment defaults, with range validation.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{CliError, Result};
use crate::ext::{opt_real, parse_real};
use illposed_core::funcspace::c1_embedding_holds;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    NormScaling,
    LemfiEquivalence,
    Embedding,
    EulerGrowth,
    FlowJacobian,
    ShearGap,
    CoveringAudit,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        ExperimentId::ShearGap,
        ExperimentId::NormScaling,
        ExperimentId::LemfiEquivalence,
        ExperimentId::Embedding,
        ExperimentId::CoveringAudit,
        ExperimentId::EulerGrowth,
        ExperimentId::FlowJacobian,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::NormScaling => "norm-scaling",
            ExperimentId::LemfiEquivalence => "lemfi-equivalence",
            ExperimentId::Embedding => "embedding",
            ExperimentId::EulerGrowth => "euler-growth",
            ExperimentId::FlowJacobian => "flow-jacobian",
            ExperimentId::ShearGap => "shear-gap",
            ExperimentId::CoveringAudit => "covering-audit",
        }
    }

    /// Experiments whose norms are only meaningful when `M^{1+σ,α}_{p,q}`
    /// embeds in `C¹`.
    pub fn requires_c1_embedding(&self) -> bool {
        matches!(self, ExperimentId::LemfiEquivalence | ExperimentId::Embedding)
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ShearPreset {
    /// `f ≡ 0`, `g ≡ ε`.
    Constant,
    /// Smooth bump and its rescaling.
    Bump,
    Both,
}

fn one_or_many<'de, D, T>(d: D) -> std::result::Result<Option<Vec<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Shape<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(Some(match Shape::<T>::deserialize(d)? {
        Shape::One(v) => vec![v],
        Shape::Many(v) => v,
    }))
}

/// Parameter block. Every field is optional so that files and flags can be
/// layered over the experiment defaults; list-valued fields are sweeps.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Smoothness index of Besov and α-modulation norms.
    #[arg(long, value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_real")]
    pub s: Option<f64>,

    /// Hölder exponent(s) in (0, 1).
    #[arg(long, value_delimiter = ',', value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "one_or_many")]
    pub sigma: Option<Vec<f64>>,

    /// Initial distances of the shear data.
    #[arg(long, value_delimiter = ',', value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "one_or_many")]
    pub epsilon: Option<Vec<f64>>,

    /// Lebesgue exponent; `inf` allowed.
    #[arg(long, value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_real")]
    pub p: Option<f64>,

    /// Summation exponent; `inf` allowed.
    #[arg(long, value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_real")]
    pub q: Option<f64>,

    /// Integrability exponent(s) of `W^{1,r}`.
    #[arg(long, value_delimiter = ',', value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "one_or_many")]
    pub r: Option<Vec<f64>>,

    /// Exponent(s) `r` of the initial vorticity in the bound sweep.
    #[arg(long, value_delimiter = ',', value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "one_or_many")]
    pub omega_r: Option<Vec<f64>>,

    /// Covering exponent(s) α in (0, 1].
    #[arg(long, value_delimiter = ',', value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "one_or_many")]
    pub alpha: Option<Vec<f64>>,

    #[arg(long, value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_real")]
    pub alpha1: Option<f64>,

    #[arg(long, value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_real")]
    pub alpha2: Option<f64>,

    /// Concentration exponent: `λ = k^α̃`.
    #[arg(long, value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_real")]
    pub alpha_tilde: Option<f64>,

    /// Perturbation frequencies.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "one_or_many")]
    pub k: Option<Vec<u32>>,

    /// Largeness parameter(s) `M` of the initial vorticity.
    #[arg(long, value_delimiter = ',', value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "one_or_many")]
    pub m: Option<Vec<f64>>,

    /// Number(s) of additional scales of the initial vorticity.
    #[arg(long, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "one_or_many")]
    pub scales: Option<Vec<u32>>,

    /// Index of the coarsest vorticity scale.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_scale: Option<u32>,

    /// Half width `L` of the periodic box `[-L, L)²`; `pi` allowed.
    #[arg(long, value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_real")]
    pub half_width: Option<f64>,

    /// Grid points per axis.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,

    /// Time step of the solver or the particle integrator.
    #[arg(long, value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_real")]
    pub dt: Option<f64>,

    /// Final time.
    #[arg(long, value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_real")]
    pub t_end: Option<f64>,

    /// Time step of the particle integrator when it differs from `dt`.
    #[arg(long, value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_real")]
    pub flow_dt: Option<f64>,

    /// Final time of particle runs when it differs from `t_end`.
    #[arg(long, value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_real")]
    pub flow_t_end: Option<f64>,

    /// Outer radius of the frequency covering.
    #[arg(long, value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_real")]
    pub xi_max: Option<f64>,

    /// Size of the random field suite.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<usize>,

    /// Largest frequency index of the random fields.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band: Option<usize>,

    #[arg(long, value_enum)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<ShearPreset>,

    /// Relative tolerance of the main assertion.
    #[arg(long, value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_real")]
    pub tolerance: Option<f64>,

    /// Frozen constant of the asserted bound.
    #[arg(long, value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_real")]
    pub bound: Option<f64>,

    /// Required growth factor of `‖ω(t)‖_{W^{1,r}}`.
    #[arg(long, value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_real")]
    pub growth_factor: Option<f64>,

    /// Centre of the perturbation; chosen from the flow when absent.
    #[arg(long, value_delimiter = ',', value_parser = parse_real)]
    #[serde(default, skip_serializing_if = "Option::is_none", deserialize_with = "one_or_many")]
    pub x_star: Option<Vec<f64>>,
}

macro_rules! layer {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl Params {
    /// Fields of `over` that are set replace those of `self`.
    pub fn overlay(&mut self, over: &Params) {
        layer!(self, over; s, sigma, epsilon, p, q, r, omega_r, alpha, alpha1, alpha2, alpha_tilde, k, m,
            scales, start_scale, half_width, grid_n, dt, t_end, flow_dt, flow_t_end, xi_max, fields, band,
            preset, tolerance, bound, growth_factor, x_star);
    }

    /// Defaults chosen so that the whole suite runs in a few minutes.
    pub fn defaults(id: ExperimentId) -> Params {
        let pi = std::f64::consts::PI;
        let base = Params::default();
        match id {
            ExperimentId::ShearGap => Params {
                sigma: Some(vec![0.25, 0.5, 0.75]),
                epsilon: Some(vec![0.1, 0.01, 0.001]),
                t_end: Some(1.0),
                preset: Some(ShearPreset::Constant),
                tolerance: Some(1e-2),
                ..base
            },
            ExperimentId::NormScaling => Params {
                sigma: Some(vec![0.5]),
                p: Some(f64::INFINITY),
                r: Some(vec![4.0]),
                alpha_tilde: Some(0.5),
                k: Some(vec![32, 64, 128, 256]),
                half_width: Some(pi),
                grid_n: Some(1024),
                x_star: Some(vec![pi / 2.0, pi / 2.0]),
                tolerance: Some(0.1),
                m: Some(vec![2.0, 4.0, 8.0]),
                scales: Some(vec![2, 4, 8]),
                start_scale: Some(1),
                omega_r: Some(vec![2.25, 2.5, 3.0]),
                bound: Some(OMEGA0_BOUND),
                ..base
            },
            ExperimentId::LemfiEquivalence => Params {
                sigma: Some(vec![0.5]),
                p: Some(f64::INFINITY),
                q: Some(1.0),
                r: Some(vec![4.0]),
                alpha: Some(vec![0.5, 0.8, 1.0]),
                alpha_tilde: Some(0.5),
                k: Some(vec![32, 64, 128, 256]),
                half_width: Some(pi),
                grid_n: Some(1024),
                xi_max: Some(384.0),
                x_star: Some(vec![pi / 2.0, pi / 2.0]),
                m: Some(vec![2.0]),
                scales: Some(vec![1]),
                start_scale: Some(1),
                bound: Some(LEMFI_BOUND),
                ..base
            },
            ExperimentId::Embedding => Params {
                sigma: Some(vec![0.9]),
                p: Some(2.0),
                q: Some(1.0),
                alpha1: Some(0.4),
                alpha2: Some(0.8),
                half_width: Some(pi),
                grid_n: Some(128),
                xi_max: Some(48.0),
                band: Some(24),
                fields: Some(50),
                bound: Some(EMBEDDING_BOUND),
                ..base
            },
            ExperimentId::CoveringAudit => Params {
                alpha: Some(vec![0.3, 0.5, 0.8, 1.0]),
                p: Some(2.0),
                q: Some(1.0),
                s: Some(1.0),
                half_width: Some(pi),
                grid_n: Some(512),
                xi_max: Some(256.0),
                alpha1: Some(0.4),
                alpha2: Some(0.8),
                band: Some(24),
                fields: Some(50),
                bound: Some(BESOV_BOUND),
                ..base
            },
            ExperimentId::EulerGrowth => Params {
                sigma: Some(vec![0.5]),
                r: Some(vec![2.5]),
                alpha_tilde: Some(0.5),
                k: Some(vec![32]),
                m: Some(vec![2.0]),
                scales: Some(vec![1, 2, 4, 8]),
                start_scale: Some(1),
                half_width: Some(pi),
                grid_n: Some(512),
                dt: Some(0.4),
                t_end: Some(40.0),
                flow_dt: Some(0.1),
                flow_t_end: Some(20.0),
                growth_factor: Some(1.2),
                ..base
            },
            ExperimentId::FlowJacobian => Params {
                r: Some(vec![2.5]),
                m: Some(vec![2.0]),
                scales: Some(vec![2, 4, 8]),
                start_scale: Some(1),
                half_width: Some(pi),
                grid_n: Some(128),
                dt: Some(0.02),
                t_end: Some(2.0),
                flow_dt: Some(0.1),
                flow_t_end: Some(20.0),
                tolerance: Some(1e-6),
                ..base
            },
        }
    }
}

/// `‖ω₀‖_{W^{1,r}}·M²` over the default sweep stays below this.
pub const OMEGA0_BOUND: f64 = 12.0;
/// Interval `[1/C, C]` for the norm-equivalence ratio of the perturbation
/// velocity.
pub const LEMFI_BOUND: f64 = 2.0;
/// `‖f‖_{M^{s,α₂}} ≤ C ‖f‖_{M^{s,α₁}}` on the random suite.
pub const EMBEDDING_BOUND: f64 = 1.0;
/// Interval `[1/C*, C*]` for the α = 1 to Besov ratio.
pub const BESOV_BOUND: f64 = 2.0;

/// Memory budget when none is configured, in MiB.
pub const DEFAULT_MEMORY_MB: f64 = 4096.0;
/// Grid-sized complex arrays an experiment may hold at once.
pub const FIELD_COPIES: f64 = 48.0;

/// Top level of a configuration file.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub experiment: Option<ExperimentId>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub memory_budget_mb: Option<f64>,
    #[serde(default)]
    pub params: Params,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// A fully resolved configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub seed: u64,
    pub output: PathBuf,
    pub jobs: usize,
    pub memory_budget_mb: f64,
    pub params: Params,
}

/// Command-line values that sit above the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub memory_budget_mb: Option<f64>,
    pub params: Params,
}

pub const DEFAULT_OUTPUT: &str = "illposed-out";

impl ExperimentConfig {
    /// Defaults, then the file, then the overrides; validated.
    pub fn resolve(id: ExperimentId, file: Option<FileConfig>, over: Overrides) -> Result<Self> {
        let file = file.unwrap_or_default();
        if let Some(f) = file.experiment {
            if f != id {
                return Err(CliError::Config(format!("config file is for {f}, not {id}")));
            }
        }
        let mut params = Params::defaults(id);
        params.overlay(&file.params);
        params.overlay(&over.params);
        let cfg = Self {
            experiment: id,
            seed: over.seed.or(file.seed).unwrap_or(0),
            output: over.output.or(file.output).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT)),
            jobs: over.jobs.or(file.jobs).unwrap_or(1),
            memory_budget_mb: over.memory_budget_mb.or(file.memory_budget_mb).unwrap_or(DEFAULT_MEMORY_MB),
            params,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Resolution with defaults only.
    pub fn with_defaults(id: ExperimentId, output: impl Into<PathBuf>) -> Result<Self> {
        Self::resolve(id, None, Overrides { output: Some(output.into()), ..Default::default() })
    }

    pub fn dir(&self) -> PathBuf {
        self.output.join(self.experiment.as_str())
    }

    /// Bytes of the largest grid the experiment allocates.
    pub fn memory_estimate_mb(&self) -> f64 {
        let n = self.params.grid_n.unwrap_or(0) as f64;
        n * n * 16.0 * FIELD_COPIES / (1024.0 * 1024.0)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.jobs == 0 {
            return bad("jobs must be at least 1".into());
        }
        if !(self.memory_budget_mb > 0.0) {
            return bad("memory_budget_mb must be positive".into());
        }
        for &s in p.sigma.iter().flatten() {
            if !(s > 0.0 && s < 1.0) {
                return bad(format!("range 0 < sigma < 1 violated: sigma = {s}"));
            }
        }
        let alphas = p.alpha.iter().flatten().chain(p.alpha1.iter()).chain(p.alpha2.iter());
        for &a in alphas {
            if !(a > 0.0 && a <= 1.0) {
                return bad(format!("range 0 < alpha <= 1 violated: alpha = {a}"));
            }
        }
        if let Some(a) = p.alpha_tilde {
            if !(a > 0.0 && a <= 1.0) {
                return bad(format!("range 0 < alpha_tilde <= 1 violated: alpha_tilde = {a}"));
            }
        }
        if let Some(v) = p.p {
            if !(v >= 2.0) {
                return bad(format!("range 2 <= p <= inf violated: p = {v}"));
            }
        }
        if let Some(v) = p.q {
            if !(v >= 1.0) {
                return bad(format!("range 1 <= q <= inf violated: q = {v}"));
            }
        }
        for &r in p.r.iter().flatten().chain(p.omega_r.iter().flatten()) {
            if !(r > 2.0 && r.is_finite()) {
                return bad(format!("range 2 < r < inf violated: r = {r}"));
            }
        }
        for &e in p.epsilon.iter().flatten() {
            if !(e > 0.0 && e.is_finite()) {
                return bad(format!("epsilon must be positive, got {e}"));
            }
        }
        for &k in p.k.iter().flatten() {
            if k < 8 {
                return bad(format!("k must be at least 8, got {k}"));
            }
        }
        for &m in p.m.iter().flatten() {
            if !(m >= 2.0 && m.is_finite()) {
                return bad(format!("M must be at least 2, got {m}"));
            }
        }
        for &n in p.scales.iter().flatten() {
            if n == 0 {
                return bad("scales must be at least 1".into());
            }
        }
        if let Some(n) = p.grid_n {
            if n < 16 || !n.is_power_of_two() {
                return bad(format!("grid_n must be a power of two >= 16, got {n}"));
            }
        }
        for (name, v) in [
            ("half_width", p.half_width),
            ("dt", p.dt),
            ("t_end", p.t_end),
            ("flow_dt", p.flow_dt),
            ("flow_t_end", p.flow_t_end),
            ("xi_max", p.xi_max),
            ("tolerance", p.tolerance),
            ("bound", p.bound),
            ("growth_factor", p.growth_factor),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("{name} must be positive and finite, got {v}"));
                }
            }
        }
        if let Some(x) = &p.x_star {
            if x.len() != 2 {
                return bad(format!("x_star needs two coordinates, got {}", x.len()));
            }
        }
        if self.experiment.requires_c1_embedding() {
            let q = p.q.unwrap_or(1.0);
            let alphas: Vec<f64> = p.alpha.iter().flatten().chain(p.alpha1.iter()).chain(p.alpha2.iter()).copied().collect();
            for &sigma in p.sigma.iter().flatten() {
                for &alpha in &alphas {
                    if !c1_embedding_holds(sigma, alpha, q) {
                        return bad(format!(
                            "embedding predicate sigma > 2(1 - alpha)(1 - 1/q) violated: \
                             sigma = {sigma}, alpha = {alpha}, q = {q}"
                        ));
                    }
                }
            }
        }
        let need = self.memory_estimate_mb();
        if need > self.memory_budget_mb {
            return Err(CliError::Resource(format!(
                "grid of {} points per axis needs about {need:.0} MiB, budget is {} MiB",
                p.grid_n.unwrap_or(0),
                self.memory_budget_mb
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_and_flags_layer_over_defaults() {
        let file: FileConfig = toml::from_str(
            "experiment = \"shear-gap\"\nseed = 3\n[params]\nsigma = 0.5\nepsilon = [0.1, 0.2]\n",
        )
        .unwrap();
        let over = Overrides {
            params: Params { epsilon: Some(vec![0.01]), ..Default::default() },
            ..Default::default()
        };
        let cfg = ExperimentConfig::resolve(ExperimentId::ShearGap, Some(file), over).unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.params.sigma, Some(vec![0.5]));
        assert_eq!(cfg.params.epsilon, Some(vec![0.01]));
        assert_eq!(cfg.params.t_end, Some(1.0));
    }

    #[test]
    fn infinite_exponents_round_trip() {
        let file: FileConfig = toml::from_str("[params]\np = inf\nq = \"inf\"\n").unwrap();
        assert_eq!(file.params.p, Some(f64::INFINITY));
        assert_eq!(file.params.q, Some(f64::INFINITY));
        let json = serde_json::to_value(&file.params).unwrap();
        assert_eq!(json["p"], "inf");
    }

    #[test]
    fn ranges_are_enforced() {
        let over = |params: Params| Overrides { params, ..Default::default() };
        let err = ExperimentConfig::resolve(
            ExperimentId::ShearGap,
            None,
            over(Params { sigma: Some(vec![1.0]), ..Default::default() }),
        )
        .unwrap_err();
        assert!(err.to_string().contains("0 < sigma < 1"));
        let err = ExperimentConfig::resolve(
            ExperimentId::Embedding,
            None,
            over(Params { sigma: Some(vec![0.5]), q: Some(2.0), alpha1: Some(0.5), ..Default::default() }),
        )
        .unwrap_err();
        assert!(err.to_string().contains("embedding predicate"));
        let err = ExperimentConfig::resolve(
            ExperimentId::EulerGrowth,
            None,
            over(Params { grid_n: Some(16384), ..Default::default() }),
        )
        .unwrap_err();
        assert!(matches!(err, CliError::Resource(_)));
    }

    #[test]
    fn mismatched_file_is_rejected() {
        let file = FileConfig { experiment: Some(ExperimentId::Embedding), ..Default::default() };
        assert!(ExperimentConfig::resolve(ExperimentId::ShearGap, Some(file), Overrides::default()).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<FileConfig>("[params]\nsigmaa = 0.5\n").is_err());
    }
}

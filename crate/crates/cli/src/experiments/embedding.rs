use illposed_core::funcspace::{alpha_mod_norm, build_alpha_covering, build_bapu, Bapu, NormSpec};
use illposed_core::spectral::{random_band_limited, GridSpec};

use super::{csv, need, single, sweep};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::ext::format_real;
use crate::manifest::Recorder;

pub const EMBEDDING_CSV_HEADER: &str = "field,norm_alpha1,norm_alpha2,ratio";

/// Random suite and the two coverings it is measured with.
pub(crate) struct Suite {
    pub grid: GridSpec,
    pub band: usize,
    pub fields: usize,
    pub seed: u64,
    pub xi_max: f64,
}

impl Suite {
    pub fn bapu(&self, alpha: f64, p: f64) -> Result<Bapu> {
        Ok(build_bapu(&build_alpha_covering(alpha, self.xi_max, self.grid)?, p)?)
    }

    /// Field `i` of the suite; seeds are offsets of the configured seed.
    pub fn field(&self, i: usize) -> Result<illposed_core::spectral::Field2D> {
        Ok(random_band_limited(self.grid, self.band, self.seed.wrapping_add(i as u64))?)
    }

    /// `(‖f‖_{M^{s,α₁}_{p,1}}, ‖f‖_{M^{s,α₂}_{p,1}})` per field.
    pub fn embedding_pairs(&self, s: f64, p: f64, alpha1: f64, alpha2: f64) -> Result<Vec<(f64, f64)>> {
        let (b1, b2) = (self.bapu(alpha1, p)?, self.bapu(alpha2, p)?);
        let spec1 = NormSpec::AlphaMod { s, alpha: alpha1, p, q: 1.0 };
        let spec2 = NormSpec::AlphaMod { s, alpha: alpha2, p, q: 1.0 };
        let idx: Vec<usize> = (0..self.fields).collect();
        sweep(&idx, |&i| {
            let f = self.field(i)?;
            Ok((alpha_mod_norm(&f, &spec1, &b1)?, alpha_mod_norm(&f, &spec2, &b2)?))
        })
    }
}

pub(crate) fn suite(cfg: &ExperimentConfig) -> Result<Suite> {
    let p = &cfg.params;
    Ok(Suite {
        grid: GridSpec::new(need(&p.half_width, "half_width")?, need(&p.grid_n, "grid_n")?)?,
        band: need(&p.band, "band")?,
        fields: need(&p.fields, "fields")?,
        seed: cfg.seed,
        xi_max: need(&p.xi_max, "xi_max")?,
    })
}

pub(crate) fn embedding_csv(pairs: &[(f64, f64)]) -> String {
    csv(
        EMBEDDING_CSV_HEADER,
        pairs.iter().enumerate().map(|(i, (a, b))| format!("{i},{a:.12e},{b:.12e},{:.12e}", b / a)),
    )
}

pub(crate) fn record_embedding(rec: &mut Recorder, pairs: &[(f64, f64)], alpha1: f64, alpha2: f64, bound: f64) {
    let worst = pairs.iter().map(|(a, b)| b / a).fold(0.0, f64::max);
    rec.at_most(
        "embedding constant",
        &format!("M^(s,{alpha1})_(p,1) embeds in M^(s,{alpha2})_(p,1) with one constant over the random suite"),
        worst,
        bound,
    );
}

pub fn run(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = &cfg.params;
    let sigma = single(&p.sigma, "sigma")?;
    let lp = need(&p.p, "p")?;
    let q = need(&p.q, "q")?;
    let (a1, a2) = (need(&p.alpha1, "alpha1")?, need(&p.alpha2, "alpha2")?);
    let bound = need(&p.bound, "bound")?;
    let s = 1.0 + sigma;
    let suite = suite(cfg)?;
    rec.key_parameters(format!(
        "alpha1={a1} alpha2={a2} s={s} p={} q={} fields={}",
        format_real(lp),
        format_real(q),
        suite.fields
    ));
    let pairs = rec.time("norms", || suite.embedding_pairs(s, lp, a1.min(a2), a1.max(a2)))?;
    rec.write("embedding.csv", embedding_csv(&pairs))?;
    record_embedding(rec, &pairs, a1.min(a2), a1.max(a2), bound);
    Ok(())
}

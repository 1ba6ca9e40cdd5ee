use rayon::prelude::*;
use serde::Serialize;

use super::{Profile, ShearSpec};
use crate::error::{param, Result};

/// Values of `x₂ = c` at which witness pairs are placed.
pub const SWEEP_CONSTANTS: usize = 17;
/// Samples used for one-dimensional Hölder norms.
pub const NORM_SAMPLES: usize = 4001;
/// Grid sizes per axis for the nested gap refinement.
pub const GAP_LEVELS: [usize; 3] = [16, 32, 64];

pub const GAP_CSV_HEADER: &str = "sigma,epsilon,t,initial_distance,gap_lower_bound,residual";

/// `sup|d| + sup|d'| + sup_{x≠y} |d'(x) - d'(y)| / |x - y|^σ` for
/// `d = p - q` sampled on `interval`.
fn c1sigma_of<F, G>(value: F, deriv: G, sigma: f64, interval: (f64, f64)) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(param(format!("sigma must lie in (0, 1), got {sigma}")));
    }
    let (lo, hi) = interval;
    if !(hi > lo) {
        return Err(param("empty interval"));
    }
    let n = NORM_SAMPLES;
    let xs: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let v: Vec<f64> = xs.iter().map(|&x| value(x)).collect();
    let d: Vec<f64> = xs.iter().map(|&x| deriv(x)).collect();
    let sup = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let dsup = d.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let semi = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best: f64 = 0.0;
            for j in i + 1..n {
                let q = (d[i] - d[j]).abs();
                if q > 0.0 {
                    best = best.max(q / (xs[j] - xs[i]).powf(sigma));
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    Ok(sup + dsup + semi)
}

/// `‖p‖_{C^{1+σ}}` estimated on `interval`.
pub fn c1sigma_norm_1d(p: &Profile, sigma: f64, interval: (f64, f64)) -> Result<f64> {
    c1sigma_of(|x| p.value(x), |x| p.derivative(x), sigma, interval)
}

/// The Hölder quotient of `D(x) = h'(x₁ - t f(x₂)) - h'(x₁ - t g(x₂))` at the
/// pair `x = (t g(c), c)`, `y = (t f(c), c)`; `None` where `f(c) = g(c)`.
pub fn witness_quotient(spec: &ShearSpec, t: f64, c: f64) -> Option<f64> {
    let (fc, gc) = (spec.f.value(c), spec.g.value(c));
    if fc == gc {
        return None;
    }
    let d = |x: [f64; 2]| difference(spec, t, x);
    let x = [t * gc, c];
    let y = [t * fc, c];
    Some((d(x) - d(y)).abs() / (t * (gc - fc)).abs().powf(spec.sigma))
}

fn difference(spec: &ShearSpec, t: f64, x: [f64; 2]) -> f64 {
    let h = spec.h();
    h.derivative(x[0] - t * spec.f.value(x[1])) - h.derivative(x[0] - t * spec.g.value(x[1]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapLevel {
    pub n: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub sigma: f64,
    pub t: f64,
    /// `‖f - g‖_{C^{1+σ}}`.
    pub initial_distance: f64,
    /// Largest sampled Hölder quotient of `D` on the finest level.
    pub gap_lower_bound: f64,
    /// Relative change of the gap between the two finest levels.
    pub tol_disc: f64,
    pub witness_min: f64,
    pub witness_max: f64,
    pub witness_count: usize,
    pub levels: Vec<GapLevel>,
    /// Half widths of the sampled window in `x₁` and `x₂`.
    pub window: [f64; 2],
}

impl GapReport {
    /// Whether the gap meets `2·(1 - tol)` (with `tol` at least the measured
    /// discretisation defect).
    pub fn meets(&self, tol: f64) -> bool {
        self.gap_lower_bound >= 2.0 * (1.0 - tol.max(self.tol_disc))
    }

    pub fn csv_row(&self, epsilon: f64, residual: f64) -> String {
        format!(
            "{},{},{},{:.12e},{:.12e},{:.12e}",
            self.sigma, epsilon, self.t, self.initial_distance, self.gap_lower_bound, residual
        )
    }
}

fn pair_sup(points: &[[f64; 2]], values: &[f64], sigma: f64) -> f64 {
    (0..points.len())
        .into_par_iter()
        .map(|i| {
            let (p, v) = (points[i], values[i]);
            let mut best: f64 = 0.0;
            for j in i + 1..points.len() {
                let dv = (v - values[j]).abs();
                if dv > 0.0 {
                    let r2 = (p[0] - points[j][0]).powi(2) + (p[1] - points[j][1]).powi(2);
                    if r2 > 0.0 {
                        best = best.max(dv / r2.powf(0.5 * sigma));
                    }
                }
            }
            best
        })
        .reduce(|| 0.0, f64::max)
}

/// Initial distance of the two shear data and a lower bound for the
/// `C^σ` seminorm of `∂₁(u₃ - v₃)` at time `t`.
///
/// The seminorm is maximised over all pairs of a tensor grid on the window
/// `[-max(b, t a), max(b, t a)] × [-max(b, 1), max(b, 1)]` together with the
/// witness pairs at `SWEEP_CONSTANTS` values of `c` in `[-1, 1]`. Grids are
/// nested, so the bound cannot decrease under refinement.
pub fn solution_gap(spec: &ShearSpec, t: f64) -> Result<GapReport> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(param(format!("t must lie in (0, 1], got {t}")));
    }
    let w1 = spec.b().max(t * spec.a());
    let w2 = spec.b().max(1.0);
    let interval = (-w2, w2);
    let initial_distance = c1sigma_of(
        |x| spec.f.value(x) - spec.g.value(x),
        |x| spec.f.derivative(x) - spec.g.derivative(x),
        spec.sigma,
        interval,
    )?;
    if initial_distance == 0.0 {
        return Err(param("f and g coincide; the gap is undefined"));
    }
    let cs: Vec<f64> = (0..SWEEP_CONSTANTS)
        .map(|i| -1.0 + 2.0 * i as f64 / (SWEEP_CONSTANTS - 1) as f64)
        .collect();
    let mut witness = Vec::new();
    let mut quotients = Vec::new();
    for &c in &cs {
        if let Some(q) = witness_quotient(spec, t, c) {
            witness.push([t * spec.g.value(c), c]);
            witness.push([t * spec.f.value(c), c]);
            quotients.push(q);
        }
    }
    if quotients.is_empty() {
        return Err(param("f and g agree at every sweep constant"));
    }
    let mut levels = Vec::new();
    for &n in &GAP_LEVELS {
        let mut pts = witness.clone();
        for i in 0..=n {
            let x1 = -w1 + 2.0 * w1 * i as f64 / n as f64;
            for j in 0..=n {
                pts.push([x1, -w2 + 2.0 * w2 * j as f64 / n as f64]);
            }
        }
        let vals: Vec<f64> = pts.iter().map(|&x| difference(spec, t, x)).collect();
        levels.push(GapLevel {
            n,
            gap: pair_sup(&pts, &vals, spec.sigma),
        });
    }
    let fine = levels[levels.len() - 1].gap;
    let coarse = levels[levels.len() - 2].gap;
    Ok(GapReport {
        sigma: spec.sigma,
        t,
        initial_distance,
        gap_lower_bound: fine,
        tol_disc: ((fine - coarse) / fine).max(0.0),
        witness_min: quotients.iter().cloned().fold(f64::INFINITY, f64::min),
        witness_max: quotients.iter().cloned().fold(0.0, f64::max),
        witness_count: quotients.len(),
        levels,
        window: [w1, w2],
    })
}

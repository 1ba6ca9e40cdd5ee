use illposed_core::shear3d::{solution_gap, verify_euler, witness_quotient, ShearSpec, GAP_CSV_HEADER, SWEEP_CONSTANTS};

use super::{csv, fmt_list, list, need, sweep};
use crate::config::{ExperimentConfig, ShearPreset};
use crate::error::Result;
use crate::manifest::Recorder;

const RESIDUAL_TIMES: [f64; 4] = [0.0, 0.25, 0.5, 1.0];
const RESIDUAL_BOUND: f64 = 1e-10;
const WITNESS_TOLERANCE: f64 = 1e-12;
const DISTANCE_TOLERANCE: f64 = 1e-9;

struct Point {
    eps: f64,
    distance: f64,
    gap: f64,
    tol_disc: f64,
    witness_err: f64,
    residual: f64,
    row: String,
}

pub fn run(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = &cfg.params;
    let sigmas = list(&p.sigma, "sigma")?;
    let eps = list(&p.epsilon, "epsilon")?;
    let t = need(&p.t_end, "t_end")?;
    let tol = need(&p.tolerance, "tolerance")?;
    let presets: Vec<ShearPreset> = match need(&p.preset, "preset")? {
        ShearPreset::Both => vec![ShearPreset::Constant, ShearPreset::Bump],
        one => vec![one],
    };
    rec.key_parameters(format!("sigma={} eps={} t={t}", fmt_list(&sigmas), fmt_list(&eps)));
    let points: Vec<(f64, f64)> = sigmas.iter().flat_map(|&s| eps.iter().map(move |&e| (s, e))).collect();

    let mut all = Vec::new();
    for preset in presets {
        let name = match preset {
            ShearPreset::Bump => "bump",
            _ => "constant",
        };
        let res = rec.time(name, || {
            sweep(&points, |&(sigma, eps)| {
                let spec = match preset {
                    ShearPreset::Bump => ShearSpec::bump_pair(sigma, eps)?,
                    _ => ShearSpec::constant_pair(sigma, eps)?,
                };
                let gap = solution_gap(&spec, t)?;
                let mut witness_err: f64 = 0.0;
                for i in 0..SWEEP_CONSTANTS {
                    let c = -1.0 + 2.0 * i as f64 / (SWEEP_CONSTANTS - 1) as f64;
                    if let Some(q) = witness_quotient(&spec, t, c) {
                        witness_err = witness_err.max((q - 2.0).abs() / 2.0);
                    }
                }
                let mut residual: f64 = 0.0;
                for &tr in RESIDUAL_TIMES.iter().chain([t].iter()) {
                    for sol in [spec.solution_u(), spec.solution_v()] {
                        let r = verify_euler(&sol, tr)?;
                        residual = residual.max(r.momentum).max(r.divergence);
                    }
                }
                Ok(Point {
                    eps,
                    distance: gap.initial_distance,
                    gap: gap.gap_lower_bound,
                    tol_disc: gap.tol_disc,
                    witness_err,
                    residual,
                    row: gap.csv_row(eps, residual),
                })
            })
        })?;
        rec.write(&format!("shear_gap_{name}.csv"), csv(GAP_CSV_HEADER, res.iter().map(|r| r.row.clone())))?;
        all.push((name, res));
    }

    for (name, res) in &all {
        let dist_err = res.iter().map(|r| (r.distance - r.eps).abs() / r.eps).fold(0.0, f64::max);
        rec.at_most(
            &format!("{name}: initial distance equals epsilon"),
            "the C^{1+sigma} distance of the data is epsilon (relative error)",
            dist_err,
            DISTANCE_TOLERANCE,
        );
        let worst = res.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
        rec.at_least(
            &format!("{name}: solution gap"),
            "the C^sigma seminorm of the solution difference stays at least 2 for every epsilon",
            worst,
            2.0 * (1.0 - tol),
        );
        let disc = res.iter().map(|r| r.tol_disc).fold(0.0, f64::max);
        rec.at_most(
            &format!("{name}: grid convergence defect"),
            "the gap bound is converged under grid refinement",
            disc,
            tol,
        );
        let w = res.iter().map(|r| r.witness_err).fold(0.0, f64::max);
        rec.at_most(
            &format!("{name}: witness quotient"),
            "the Holder quotient at the witness pairs equals 2 (relative error)",
            w,
            WITNESS_TOLERANCE,
        );
        let resid = res.iter().map(|r| r.residual).fold(0.0, f64::max);
        rec.at_most(
            &format!("{name}: Euler residual"),
            "both shear flows solve the Euler equations exactly",
            resid,
            RESIDUAL_BOUND,
        );
    }
    Ok(())
}

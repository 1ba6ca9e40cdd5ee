use illposed_core::euler2d::{diagnostics_csv, solve, DiagnosticSpec, SolverConfig};
use illposed_core::initdata::{perturbed_vorticity, Omega0Params, PerturbParams};
use illposed_core::lagrangian::{advect, max_jacobian, standard_seeds, AdvectConfig, ExactVortexSampler};
use illposed_core::spectral::GridSpec;

use super::flow_jacobian::{record_trend, trend_csv, jacobian_trend, SEED_EXTENT};
use super::{fmt_list, list, need, single};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::manifest::Recorder;

/// Relative energy and enstrophy drift accepted over the run.
pub const DRIFT_BOUND: f64 = 1e-6;

pub fn run(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = &cfg.params;
    let m = single(&p.m, "m")?;
    let start = need(&p.start_scale, "start_scale")?;
    let scales = list(&p.scales, "scales")?;
    let r = single(&p.r, "r")?;
    let sigma = single(&p.sigma, "sigma")?;
    let at = need(&p.alpha_tilde, "alpha_tilde")?;
    let k = single(&p.k, "k")?;
    let grid = GridSpec::new(need(&p.half_width, "half_width")?, need(&p.grid_n, "grid_n")?)?;
    let solver = SolverConfig { dt: need(&p.dt, "dt")?, t_end: need(&p.t_end, "t_end")?, dealias: true, cadence: 10 };
    let flow_dt = need(&p.flow_dt, "flow_dt")?;
    let flow_t = need(&p.flow_t_end, "flow_t_end")?;
    let factor = need(&p.growth_factor, "growth_factor")?;
    rec.key_parameters(format!(
        "M={m} scales={} r={r} k={k} N={} T={}",
        fmt_list(&scales),
        grid.n(),
        solver.t_end
    ));

    // The Euler run uses the first (coarsest) entry of the scale list.
    let base = Omega0Params::new(m, start, scales[0], r)?;
    let x_star = match &p.x_star {
        Some(x) => [x[0], x[1]],
        None => rec.time("perturbation centre", || -> Result<[f64; 2]> {
            // β vanishes for centres on the axes, so only off-axis labels are
            // candidates.
            let sampler = ExactVortexSampler::omega0(&base, (0.0, flow_t))?;
            let seeds: Vec<[f64; 2]> =
                standard_seeds(SEED_EXTENT).into_iter().filter(|x| x[0] > 0.0 && x[1] > 0.0).collect();
            let cadence = (flow_t / flow_dt).round() as usize;
            let flow = advect(&sampler, &seeds, &AdvectConfig { dt: flow_dt, t_end: flow_t, cadence })?;
            Ok(seeds[max_jacobian(&flow)?.seed])
        })?,
    };
    rec.check(
        "perturbation centre",
        "perturbation placed at the off-axis label of largest flow Jacobian",
        x_star[0],
        format!("x* = ({:.6}, {:.6})", x_star[0], x_star[1]),
        true,
    );
    let pert = PerturbParams::paper_regime(k, at, r, x_star, sigma)?;
    let omega = perturbed_vorticity(k, &base, Some(&pert), grid)?;
    let diag = DiagnosticSpec { r, refined_sup: false, check_symmetry: true, keep_states: true };
    let traj = rec.time("euler", || solve(&omega, &solver, &diag))?;
    rec.write("diagnostics.csv", diagnostics_csv(traj.rows()))?;
    for path in traj.write_snapshots(rec.dir(), &[0.0, solver.t_end], 1e-9)? {
        rec.produced(&path);
    }
    let (w0, w1) = (traj.first().omega_w1r, traj.last().omega_w1r);
    rec.at_least(
        "vorticity W^{1,r} growth",
        "the W^{1,r} norm of the perturbed vorticity grows by the configured factor",
        w1 / w0,
        factor,
    );
    let (de, dz) = traj.conservation_drift();
    rec.at_most("energy drift", "the solver conserves energy", de, DRIFT_BOUND);
    rec.at_most("enstrophy drift", "the solver conserves enstrophy", dz, DRIFT_BOUND);

    let trend = rec.time("jacobian trend", || jacobian_trend(m, start, &scales, r, flow_dt, flow_t))?;
    rec.write("jacobian_trend.csv", trend_csv(&scales, &trend))?;
    record_trend(rec, &trend);
    Ok(())
}

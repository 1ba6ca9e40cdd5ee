use illposed_core::euler2d::{solve, DiagnosticSpec, SolverConfig};
use illposed_core::initdata::Omega0Params;
use illposed_core::lagrangian::{
    advect, flow_csv, flow_distance, max_jacobian, standard_seeds, volume_defect, AdvectConfig, ExactVortexSampler,
    FnSampler, JacobianMax, Point, Sample, SnapshotSampler,
};
use illposed_core::spectral::{Field2D, GridSpec};
use illposed_core::stats::loglog_slope;

use super::{csv, fmt_list, list, need, single, sweep};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::manifest::Recorder;

/// Half width of the seed box around the vortex cluster.
pub const SEED_EXTENT: f64 = 0.5;
pub const TREND_CSV_HEADER: &str = "scales,max_jacobian,seed_x1,seed_x2,time,volume_defect";

const ORDER_STEPS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];
const ORDER_REFERENCE_STEP: f64 = 1e-4;
const ORDER_TOLERANCE: f64 = 0.3;
const HYPERBOLIC_TOLERANCE: f64 = 0.01;
const GRONWALL_DELTAS: [f64; 3] = [0.02, 0.01, 0.005];
/// Largest relative change of the fitted constant when the perturbation is
/// halved.
const GRONWALL_STABILITY: f64 = 0.05;
const PROBES: [Point; 3] = [[0.3, 0.7], [1.1, -0.4], [-2.0, 0.5]];

/// Seeds on the axes and at the origin, where the odd-odd flow is
/// hyperbolic.
pub fn hyperbolic_seeds() -> Vec<Point> {
    standard_seeds(SEED_EXTENT).into_iter().filter(|x| x[0] == 0.0 || x[1] == 0.0).collect()
}

/// Largest flow Jacobian entry and volume defect for each number of scales.
pub fn jacobian_trend(
    m: f64,
    start: u32,
    scales: &[u32],
    r: f64,
    dt: f64,
    t_end: f64,
) -> Result<Vec<(JacobianMax, f64)>> {
    let seeds = hyperbolic_seeds();
    let cadence = ((t_end / dt).round() as usize / 20).max(1);
    sweep(scales, |&n| {
        let sampler = ExactVortexSampler::omega0(&Omega0Params::new(m, start, n, r)?, (0.0, t_end))?;
        let flow = advect(&sampler, &seeds, &AdvectConfig { dt, t_end, cadence })?;
        Ok((max_jacobian(&flow)?, volume_defect(&flow)))
    })
}

pub fn trend_csv(scales: &[u32], trend: &[(JacobianMax, f64)]) -> String {
    csv(
        TREND_CSV_HEADER,
        scales.iter().zip(trend).map(|(n, (j, v))| {
            format!("{n},{:.12e},{},{},{},{v:.12e}", j.value, j.point[0], j.point[1], j.time)
        }),
    )
}

pub fn record_trend(rec: &mut Recorder, trend: &[(JacobianMax, f64)]) {
    let values: Vec<f64> = trend.iter().map(|(j, _)| j.value).collect();
    let increments = values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    rec.check(
        "jacobian growth in scales",
        "the largest flow Jacobian grows with the number of vortex scales",
        increments,
        "> 0 between consecutive scale counts",
        increments > 0.0,
    );
}

/// Cellular flow `ψ = (1 + sin(t)/2) sin x₁ sin x₂`, `u = (-∂₂ψ, ∂₁ψ)`.
fn cellular(t: f64, x: Point) -> Sample {
    let a = 1.0 + 0.5 * t.sin();
    let (s1, c1, s2, c2) = (x[0].sin(), x[0].cos(), x[1].sin(), x[1].cos());
    ([-a * s1 * c2, a * c1 * s2], [[-a * c1 * c2, a * s1 * s2], [-a * s1 * s2, a * c1 * c2]])
}

/// Divergence-free perturbation from `ψ = sin 2x₁ sin x₂ / 2`, scaled by `d`.
fn perturbed(d: f64) -> impl Fn(f64, Point) -> Sample + Sync {
    move |t, x| {
        let (u, du) = cellular(t, x);
        let (s1, c1, s2, c2) = ((2.0 * x[0]).sin(), (2.0 * x[0]).cos(), x[1].sin(), x[1].cos());
        (
            [u[0] - 0.5 * d * s1 * c2, u[1] + d * c1 * s2],
            [
                [du[0][0] - d * c1 * c2, du[0][1] + 0.5 * d * s1 * s2],
                [du[1][0] - 2.0 * d * s1 * s2, du[1][1] + d * c1 * c2],
            ],
        )
    }
}

pub fn run(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = &cfg.params;
    let m = single(&p.m, "m")?;
    let start = need(&p.start_scale, "start_scale")?;
    let scales = list(&p.scales, "scales")?;
    let r = single(&p.r, "r")?;
    let flow_dt = need(&p.flow_dt, "flow_dt")?;
    let flow_t = need(&p.flow_t_end, "flow_t_end")?;
    let tol = need(&p.tolerance, "tolerance")?;
    rec.key_parameters(format!("M={m} scales={} r={r} T={flow_t}", fmt_list(&scales)));

    // Hyperbolic stagnation flow u = (-x₁, x₂).
    let hyper = FnSampler::new((0.0, 1.0), |_, x: Point| ([-x[0], x[1]], [[-1.0, 0.0], [0.0, 1.0]]));
    let flow = rec.time("hyperbolic", || advect(&hyper, &PROBES, &AdvectConfig { dt: 0.01, t_end: 1.0, cadence: 10 }))?;
    let mut herr: f64 = 0.0;
    for st in &flow.states {
        let exact = [(-st.t).exp(), st.t.exp()];
        for j in &st.jacobians {
            herr = herr.max(((j[0][0] - exact[0]) / exact[0]).abs()).max(((j[1][1] - exact[1]) / exact[1]).abs());
            herr = herr.max(j[0][1].abs()).max(j[1][0].abs());
        }
    }
    rec.write("hyperbolic_flow.csv", flow_csv(&flow))?;
    rec.at_most(
        "hyperbolic jacobian",
        "the stagnation-point flow has Jacobian diag(exp(-t), exp(t)) (relative error)",
        herr,
        HYPERBOLIC_TOLERANCE,
    );

    // Time-step convergence against a fine reference.
    let cell = FnSampler::new((0.0, 2.0), cellular);
    let steps = |dt: f64| ((2.0 / dt).round() as usize).max(1);
    let (errors, slope) = rec.time("order", || -> Result<(Vec<f64>, f64)> {
        let reference = advect(
            &cell,
            &PROBES,
            &AdvectConfig { dt: ORDER_REFERENCE_STEP, t_end: 2.0, cadence: steps(ORDER_REFERENCE_STEP) },
        )?;
        let errors = sweep(&ORDER_STEPS, |&dt| {
            let f = advect(&cell, &PROBES, &AdvectConfig { dt, t_end: 2.0, cadence: steps(dt) })?;
            Ok(flow_distance(&f, &reference)?)
        })?;
        let slope = loglog_slope(&ORDER_STEPS, &errors);
        Ok((errors, slope))
    })?;
    rec.write(
        "rk4_order.csv",
        csv("dt,error", ORDER_STEPS.iter().zip(&errors).map(|(dt, e)| format!("{dt},{e:.12e}"))),
    )?;
    rec.near("rk4 order", "the flow integrator converges at fourth order", slope, 4.0, ORDER_TOLERANCE);

    // Flow distance against the size of a velocity perturbation.
    let constants = rec.time("gronwall", || {
        sweep(&GRONWALL_DELTAS, |&d| {
            let cfg = AdvectConfig { dt: 0.01, t_end: 2.0, cadence: 10 };
            let a = advect(&cell, &PROBES, &cfg)?;
            let b = advect(&FnSampler::new((0.0, 2.0), perturbed(d)), &PROBES, &cfg)?;
            Ok(flow_distance(&a, &b)? / d)
        })
    })?;
    rec.write(
        "gronwall.csv",
        csv("delta,distance_over_delta", GRONWALL_DELTAS.iter().zip(&constants).map(|(d, c)| format!("{d},{c:.12e}"))),
    )?;
    let spread = constants.windows(2).map(|w| (w[1] / w[0] - 1.0).abs()).fold(0.0, f64::max);
    rec.at_most(
        "gronwall constant stability",
        "flow distance is bounded by a fixed multiple of the velocity perturbation",
        spread,
        GRONWALL_STABILITY,
    );

    let trend = rec.time("jacobian trend", || jacobian_trend(m, start, &scales, r, flow_dt, flow_t))?;
    rec.write("jacobian_trend.csv", trend_csv(&scales, &trend))?;
    record_trend(rec, &trend);
    let vol = trend.iter().map(|(_, v)| *v).fold(0.0, f64::max);
    rec.at_most("volume preservation (vortex flow)", "det of the flow Jacobian equals 1", vol, tol);

    // Volume preservation along a flow interpolated from solver snapshots.
    let grid = GridSpec::new(need(&p.half_width, "half_width")?, need(&p.grid_n, "grid_n")?)?;
    let solver = SolverConfig { dt: need(&p.dt, "dt")?, t_end: need(&p.t_end, "t_end")?, dealias: true, cadence: 5 };
    let snap_vol = rec.time("snapshot flow", || -> Result<f64> {
        let w = Field2D::from_fn(grid, |x, y| x.sin() * y.sin() + 0.5 * (2.0 * x).sin() * y.sin());
        let traj = solve(&w, &solver, &DiagnosticSpec::default())?;
        let sampler = SnapshotSampler::from_states(traj.states())?;
        let dt = solver.dt * solver.cadence as f64 / 2.0;
        let cadence = ((solver.t_end / dt).round() as usize / 10).max(1);
        let flow = advect(&sampler, &standard_seeds(2.0), &AdvectConfig { dt, t_end: solver.t_end, cadence })?;
        Ok(volume_defect(&flow))
    })?;
    rec.at_most("volume preservation (solver flow)", "det of the flow Jacobian equals 1", snap_vol, tol);
    Ok(())
}

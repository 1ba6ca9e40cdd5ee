use illposed_core::funcspace::{lp_norm, w1r_norm};
use illposed_core::initdata::{beta_perturbation, omega0_w1r_norm, Omega0Params, PerturbParams};
use illposed_core::spectral::{frac_laplacian, inv_laplacian, spectral_derivative, Axis, GridSpec};
use illposed_core::stats::loglog_slope;

use super::{csv, fmt_list, list, need, single, sweep};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::manifest::Recorder;

pub const SCALING_CSV_HEADER: &str = "k,lambda,beta_w1r,frac_grad_sup,grad_sup";
pub const OMEGA0_CSV_HEADER: &str = "m,scales,r,w1r,w1r_times_m2";

/// Exponents predicted for the three estimates, in order.
pub fn predicted_slopes(sigma: f64, alpha_tilde: f64, r: f64, p: f64) -> [f64; 3] {
    let gain = 2.0 * alpha_tilde * (1.0 / r - 1.0 / p);
    [0.0, -1.0 + sigma + gain, -1.0 + gain]
}

struct Row {
    k: u32,
    lambda: f64,
    values: [f64; 3],
}

pub fn run(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = &cfg.params;
    let sigma = single(&p.sigma, "sigma")?;
    let r = single(&p.r, "r")?;
    let lp = need(&p.p, "p")?;
    let at = need(&p.alpha_tilde, "alpha_tilde")?;
    let ks = list(&p.k, "k")?;
    let grid = GridSpec::new(need(&p.half_width, "half_width")?, need(&p.grid_n, "grid_n")?)?;
    let xs = need(&p.x_star, "x_star")?;
    let x_star = [xs[0], xs[1]];
    let tol = need(&p.tolerance, "tolerance")?;
    rec.key_parameters(format!("alpha_tilde={at} r={r} p={} sigma={sigma} k={}", crate::ext::format_real(lp), fmt_list(&ks)));

    let rows = rec.time("perturbation", || {
        sweep(&ks, |&k| {
            let pp = PerturbParams::paper_regime(k, at, r, x_star, sigma)?;
            let beta = beta_perturbation(&pp, grid)?;
            let stream = inv_laplacian(&beta)?;
            let (mut frac, mut grad): (f64, f64) = (0.0, 0.0);
            for axis in [Axis::X1, Axis::X2] {
                let d = spectral_derivative(&stream, axis);
                grad = grad.max(lp_norm(&d, lp)?);
                frac = frac.max(lp_norm(&frac_laplacian(&d, 1.0 + sigma)?, lp)?);
            }
            Ok(Row { k, lambda: pp.lambda, values: [w1r_norm(&beta, r)?, frac, grad] })
        })
    })?;
    rec.write(
        "norm_scaling.csv",
        csv(
            SCALING_CSV_HEADER,
            rows.iter().map(|w| {
                format!("{},{:.12e},{:.12e},{:.12e},{:.12e}", w.k, w.lambda, w.values[0], w.values[1], w.values[2])
            }),
        ),
    )?;
    let kf: Vec<f64> = rows.iter().map(|w| w.k as f64).collect();
    let predicted = predicted_slopes(sigma, at, r, lp);
    let names = [
        ("slope of perturbation W^{1,r} norm", "the perturbation stays bounded in W^{1,r}"),
        (
            "slope of fractional velocity gradient",
            "sup norm of |D|^{1+sigma} d_j inverse-Laplacian beta decays like k^{-1+sigma+2 alpha_tilde(1/r-1/p)}",
        ),
        (
            "slope of velocity",
            "sup norm of d_j inverse-Laplacian beta decays like k^{-1+2 alpha_tilde(1/r-1/p)}",
        ),
    ];
    for (i, (name, reference)) in names.iter().enumerate() {
        let v: Vec<f64> = rows.iter().map(|w| w.values[i]).collect();
        rec.near(name, reference, loglog_slope(&kf, &v), predicted[i], tol);
    }

    let ms = list(&p.m, "m")?;
    let scales = list(&p.scales, "scales")?;
    let rs = list(&p.omega_r, "omega_r")?;
    let start = need(&p.start_scale, "start_scale")?;
    let bound = need(&p.bound, "bound")?;
    let mut combos = Vec::new();
    for &m in &ms {
        for &n in &scales {
            for &r0 in &rs {
                combos.push((m, n, r0));
            }
        }
    }
    let norms = rec.time("initial vorticity", || {
        sweep(&combos, |&(m, n, r0)| Ok(omega0_w1r_norm(&Omega0Params::new(m, start, n, r0)?)?))
    })?;
    rec.write(
        "omega0_bound.csv",
        csv(
            OMEGA0_CSV_HEADER,
            combos.iter().zip(&norms).map(|(&(m, n, r0), &w)| format!("{m},{n},{r0},{w:.12e},{:.12e}", w * m * m)),
        ),
    )?;
    let worst = combos.iter().zip(&norms).map(|(&(m, _, _), &w)| w * m * m).fold(0.0, f64::max);
    rec.at_most(
        "initial vorticity bound",
        "M^2 times the W^{1,r} norm of the initial vorticity is bounded by one constant",
        worst,
        bound,
    );
    Ok(())
}

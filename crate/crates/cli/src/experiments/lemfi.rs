use illposed_core::funcspace::{alpha_mod_norm, build_alpha_covering, build_bapu, lp_norm, w1r_norm, NormSpec};
use illposed_core::initdata::{beta_perturbation, omega0, perturbed_vorticity, Omega0Params, PerturbParams};
use illposed_core::spectral::{biot_savart, frac_laplacian, GridSpec};

use super::{csv, fmt_list, list, need, single, sweep};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::ext::format_real;
use crate::manifest::Recorder;

pub const LEMFI_CSV_HEADER: &str = "alpha,k,modulation_norm,lp_form,ratio";
pub const PERTURBED_CSV_HEADER: &str = "k,omega_w1r,beta_w1r";

/// `‖ω₀ + β_n‖_{W^{1,r}}` stays below this over the default sweep.
pub const PERTURBED_BOUND: f64 = 8.0;

pub fn run(cfg: &ExperimentConfig, rec: &mut Recorder) -> Result<()> {
    let p = &cfg.params;
    let sigma = single(&p.sigma, "sigma")?;
    let r = single(&p.r, "r")?;
    let lp = need(&p.p, "p")?;
    let q = need(&p.q, "q")?;
    let at = need(&p.alpha_tilde, "alpha_tilde")?;
    let alphas = list(&p.alpha, "alpha")?;
    let ks = list(&p.k, "k")?;
    let grid = GridSpec::new(need(&p.half_width, "half_width")?, need(&p.grid_n, "grid_n")?)?;
    let xi_max = need(&p.xi_max, "xi_max")?;
    let xs = need(&p.x_star, "x_star")?;
    let x_star = [xs[0], xs[1]];
    let bound = need(&p.bound, "bound")?;
    let s = 1.0 + sigma;
    rec.key_parameters(format!(
        "s={s} p={} q={} alpha={} k={}",
        format_real(lp),
        format_real(q),
        fmt_list(&alphas),
        fmt_list(&ks)
    ));

    let velocities = rec.time("perturbation", || {
        sweep(&ks, |&k| {
            let pp = PerturbParams::paper_regime(k, at, r, x_star, sigma)?;
            let beta = beta_perturbation(&pp, grid)?;
            let u = biot_savart(&beta)?;
            let mut form = 0.0;
            for c in [&u.u1, &u.u2] {
                form += lp_norm(c, lp)? + lp_norm(&frac_laplacian(c, s)?, lp)?;
            }
            Ok((u, form, w1r_norm(&beta, r)?))
        })
    })?;

    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    let mut decay_ok = true;
    let exponent = -1.0 + sigma + 2.0 * at * (1.0 / r - 1.0 / lp);
    for &alpha in &alphas {
        let cov = rec.time("covering", || build_alpha_covering(alpha, xi_max, grid))?;
        let bapu = rec.time("covering", || build_bapu(&cov, lp))?;
        let spec = NormSpec::AlphaMod { s, alpha, p: lp, q };
        let norms = rec.time("modulation norm", || {
            sweep(&velocities, |(u, _, _)| Ok(alpha_mod_norm(&u.u1, &spec, &bapu)? + alpha_mod_norm(&u.u2, &spec, &bapu)?))
        })?;
        for ((&k, &m), (_, form, _)) in ks.iter().zip(&norms).zip(&velocities) {
            rows.push(format!("{alpha},{k},{m:.12e},{form:.12e},{:.12e}", m / form));
            ratios.push(m / form);
        }
        if exponent < 0.0 {
            decay_ok &= norms.windows(2).all(|w| w[1] < w[0]);
        }
    }
    rec.write("lemfi_equivalence.csv", csv(LEMFI_CSV_HEADER, rows))?;
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    let reference = "the modulation norm of the perturbation velocity is equivalent to L^p plus fractional-Laplacian L^p";
    rec.at_least("equivalence ratio lower", reference, lo, 1.0 / bound);
    rec.at_most("equivalence ratio upper", reference, hi, bound);
    if exponent < 0.0 {
        rec.check(
            "perturbation velocity decay",
            "the modulation norm of the perturbation velocity decreases strictly in n",
            exponent,
            "strictly decreasing",
            decay_ok,
        );
    }

    let base = Omega0Params::new(single(&p.m, "m")?, need(&p.start_scale, "start_scale")?, single(&p.scales, "scales")?, r)?;
    let w0 = omega0(&base, grid)?;
    let base_norm = w1r_norm(&w0, r)?;
    let perturbed = rec.time("perturbed vorticity", || {
        sweep(&ks, |&k| {
            let pp = PerturbParams::paper_regime(k, at, r, x_star, sigma)?;
            Ok(w1r_norm(&perturbed_vorticity(k, &base, Some(&pp), grid)?, r)?)
        })
    })?;
    rec.write(
        "perturbed_w1r.csv",
        csv(
            PERTURBED_CSV_HEADER,
            ks.iter().zip(&perturbed).zip(&velocities).map(|((k, w), (_, _, b))| format!("{k},{w:.12e},{b:.12e}")),
        ),
    )?;
    let worst = perturbed.iter().cloned().fold(base_norm, f64::max);
    rec.at_most(
        "perturbed vorticity bound",
        "the W^{1,r} norm of the perturbed vorticity is bounded uniformly in n",
        worst,
        PERTURBED_BOUND,
    );
    Ok(())
}

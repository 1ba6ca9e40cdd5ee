use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{param, Result};
use crate::spectral::{spectral_derivative, Axis, Field2D};

pub(crate) fn check_exponent(name: &str, p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(param(format!("{name} must lie in [1, inf], got {p}")));
    }
    Ok(())
}

/// `(Σ |v|^p · cell)^{1/p}`, or the maximum for `p = ∞`.
///
/// Samples are divided by their maximum first so that the result is exactly
/// homogeneous and does not overflow for large `p`.
pub(crate) fn lp_of_abs(abs: &[f64], p: f64, cell: f64) -> f64 {
    let m = abs.iter().fold(0.0_f64, |a, &v| a.max(v));
    if m == 0.0 || p.is_infinite() {
        return m;
    }
    let inv = 1.0 / m;
    let s: f64 = if p == 2.0 {
        abs.iter().map(|&v| (v * inv) * (v * inv)).sum()
    } else {
        abs.iter().map(|&v| (v * inv).powf(p)).sum()
    };
    m * (s * cell).powf(1.0 / p)
}

/// `(Σ t^q)^{1/q}` over non-negative terms, `max` for `q = ∞`.
pub(crate) fn lq_sum(terms: &[f64], q: f64) -> f64 {
    lp_of_abs(terms, q, 1.0)
}

/// Discrete Lebesgue norm with grid weights `h²`.
pub fn lp_norm(f: &Field2D, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    let abs: Vec<f64> = f.physical().iter().map(|v| v.abs()).collect();
    Ok(lp_of_abs(&abs, p, f.grid().cell_area()))
}

/// `‖f‖_r + ‖∂₁f‖_r + ‖∂₂f‖_r` with spectral derivatives.
pub fn w1r_norm(f: &Field2D, r: f64) -> Result<f64> {
    if r.is_nan() || r <= 1.0 {
        return Err(param(format!("r must exceed 1, got {r}")));
    }
    let d1 = spectral_derivative(f, Axis::X1);
    let d2 = spectral_derivative(f, Axis::X2);
    Ok(lp_norm(f, r)? + lp_norm(&d1, r)? + lp_norm(&d2, r)?)
}

/// Pair-search settings for [`holder_norm_with`].
#[derive(Debug, Clone, Copy)]
pub struct HolderOptions {
    /// All pairs closer than this many cells are examined.
    pub window: usize,
    /// Number of additional random pairs drawn over the whole torus.
    pub global_pairs: usize,
    pub seed: u64,
}

impl Default for HolderOptions {
    fn default() -> Self {
        Self {
            window: 64,
            global_pairs: 65_536,
            seed: 0x5EED_401D,
        }
    }
}

/// Lower estimate of a Hölder norm, with the data needed to judge it.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HolderEstimate {
    pub sup: f64,
    /// `sup |∇f|`, zero for order 0.
    pub gradient_sup: f64,
    /// Seminorm on the full grid.
    pub seminorm: f64,
    /// Seminorm on the grid subsampled by two.
    pub coarse_seminorm: f64,
    /// `seminorm / coarse_seminorm`; tends to 1 for resolved fields.
    pub refinement_ratio: f64,
    pub value: f64,
}

/// `C^σ` (order 0) or `C^{1+σ}` (order 1) norm with default search settings.
pub fn holder_norm(f: &Field2D, sigma: f64, order: u8) -> Result<HolderEstimate> {
    holder_norm_with(f, sigma, order, HolderOptions::default())
}

pub fn holder_norm_with(
    f: &Field2D,
    sigma: f64,
    order: u8,
    opts: HolderOptions,
) -> Result<HolderEstimate> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(param(format!("sigma must lie in (0, 1), got {sigma}")));
    }
    let n = f.grid().n();
    let h = f.grid().spacing();
    let sup = f.max_abs();
    let (comps, gradient_sup) = match order {
        0 => (vec![f.physical().to_vec()], 0.0),
        1 => {
            let d1 = spectral_derivative(f, Axis::X1).physical().to_vec();
            let d2 = spectral_derivative(f, Axis::X2).physical().to_vec();
            let g = d1
                .iter()
                .zip(&d2)
                .fold(0.0_f64, |m, (a, b)| m.max(a.hypot(*b)));
            (vec![d1, d2], g)
        }
        _ => return Err(param(format!("order must be 0 or 1, got {order}"))),
    };
    let seminorm = pair_seminorm(&comps, n, h, sigma, opts);
    let coarse: Vec<Vec<f64>> = comps
        .iter()
        .map(|c| {
            let m = n / 2;
            let mut out = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..m {
                    out[i * m + j] = c[2 * i * n + 2 * j];
                }
            }
            out
        })
        .collect();
    let coarse_seminorm = pair_seminorm(&coarse, n / 2, 2.0 * h, sigma, opts);
    let refinement_ratio = if coarse_seminorm > 0.0 {
        seminorm / coarse_seminorm
    } else {
        1.0
    };
    Ok(HolderEstimate {
        sup,
        gradient_sup,
        seminorm,
        coarse_seminorm,
        refinement_ratio,
        value: sup + gradient_sup + seminorm,
    })
}

fn pair_seminorm(comps: &[Vec<f64>], n: usize, h: f64, sigma: f64, opts: HolderOptions) -> f64 {
    let w = opts.window.min(n / 2 - 1) as i64;
    let mut offsets = Vec::new();
    for di in 0..=w {
        for dj in -w..=w {
            if (di == 0 && dj <= 0) || di * di + dj * dj > w * w {
                continue;
            }
            offsets.push((di, dj));
        }
    }
    let diff = |a: usize, b: usize| -> f64 {
        let s: f64 = comps.iter().map(|c| (c[a] - c[b]) * (c[a] - c[b])).sum();
        s.sqrt()
    };
    let local = offsets
        .par_iter()
        .map(|&(di, dj)| {
            let weight = (h * ((di * di + dj * dj) as f64).sqrt()).powf(-sigma);
            let ni = n as i64;
            let mut best = 0.0_f64;
            for i in 0..n {
                let ii = ((i as i64 + di).rem_euclid(ni)) as usize;
                for j in 0..n {
                    let jj = ((j as i64 + dj).rem_euclid(ni)) as usize;
                    best = best.max(diff(i * n + j, ii * n + jj));
                }
            }
            best * weight
        })
        .reduce(|| 0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut global = 0.0_f64;
    for _ in 0..opts.global_pairs {
        let (i1, j1, i2, j2) = (
            rng.gen_range(0..n),
            rng.gen_range(0..n),
            rng.gen_range(0..n),
            rng.gen_range(0..n),
        );
        let a = i1.abs_diff(i2);
        let b = j1.abs_diff(j2);
        let (a, b) = (a.min(n - a), b.min(n - b));
        if a == 0 && b == 0 {
            continue;
        }
        let d = h * ((a * a + b * b) as f64).sqrt();
        global = global.max(diff(i1 * n + j1, i2 * n + j2) * d.powf(-sigma));
    }
    local.max(global)
}

/// Smooth radial profile: 1 on `|ξ| ≤ 1`, 0 on `|ξ| ≥ 2`.
pub fn lp_profile(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        smooth_step(2.0 - r)
    }
}

/// `C^∞` step from 0 at `t ≤ 0` to 1 at `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    fn e(t: f64) -> f64 {
        if t > 0.0 {
            (-1.0 / t).exp()
        } else {
            0.0
        }
    }
    let a = e(t);
    let b = e(1.0 - t);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Littlewood–Paley block `j` at radius `r`.
pub fn lp_window(j: u32, r: f64) -> f64 {
    let s = (j as f64).exp2();
    if j == 0 {
        lp_profile(r)
    } else {
        lp_profile(r / s) - lp_profile(2.0 * r / s)
    }
}

/// `‖f‖₂ · [lo, hi]` bounds the `B^0_{2,2}` norm; the blocks sum to one and
/// at most two overlap.
pub const BESOV_L2_EQUIVALENCE: (f64, f64) = (FRAC_1_SQRT_2, 1.0);

/// Number of blocks needed to reach the corner of the lattice.
pub(crate) fn block_count(f: &Field2D) -> u32 {
    let top = f.grid().nyquist() * std::f64::consts::SQRT_2;
    let mut j = 0;
    while ((j as f64) - 1.0).exp2() < top {
        j += 1;
    }
    j
}

pub fn dyadic_block(f: &Field2D, j: u32) -> Field2D {
    f.map_spectral(|x1, x2, _, _, c| c * lp_window(j, x1.hypot(x2)))
}

pub fn besov_norm(f: &Field2D, s: f64, p: f64, q: f64) -> Result<f64> {
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    if !s.is_finite() {
        return Err(param(format!("smoothness must be finite, got {s}")));
    }
    let terms: Vec<f64> = (0..block_count(f))
        .map(|j| Ok((j as f64 * s).exp2() * lp_norm(&dyadic_block(f, j), p)?))
        .collect::<Result<_>>()?;
    Ok(lq_sum(&terms, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;
    use std::f64::consts::PI;

    fn g(n: usize) -> GridSpec {
        GridSpec::new(PI, n).unwrap()
    }

    #[test]
    fn constant_l2() {
        let f = Field2D::from_fn(g(32), |_, _| 1.0);
        assert!((lp_norm(&f, 2.0).unwrap() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn sine_sup() {
        let f = Field2D::from_fn(g(32), |x, _| x.sin());
        assert!((lp_norm(&f, f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);
        assert!(lp_norm(&f, 0.5).is_err());
    }

    #[test]
    fn w1r_of_sine() {
        let f = Field2D::from_fn(g(32), |x, _| x.sin());
        let v = w1r_norm(&f, 2.0).unwrap();
        assert!((v - 2.0 * PI * 2f64.sqrt()).abs() < 1e-10);
        assert_eq!(w1r_norm(&Field2D::zeros(g(16)), 2.5).unwrap(), 0.0);
    }

    #[test]
    fn holder_of_constant() {
        let f = Field2D::from_fn(g(32), |_, _| -2.5);
        let e = holder_norm(&f, 0.5, 0).unwrap();
        assert_eq!(e.seminorm, 0.0);
        assert!((e.value - 2.5).abs() < 1e-14);
        assert!(holder_norm(&f, 1.0, 0).is_err());
    }

    #[test]
    fn windows_partition_unity() {
        for k in 0..2000 {
            let r = k as f64 * 0.37;
            let s: f64 = (0..16).map(|j| lp_window(j, r)).sum();
            assert!((s - 1.0).abs() < 1e-14, "r = {r}");
        }
    }

    #[test]
    fn single_shell_scaling() {
        // cos(4 x₁) sits where block 2 equals one.
        let f = Field2D::from_fn(g(64), |x, _| (4.0 * x).cos());
        let b = besov_norm(&f, 1.5, 2.0, 2.0).unwrap();
        let expect = 2f64.powf(3.0) * lp_norm(&f, 2.0).unwrap();
        assert!((b / expect - 1.0).abs() < 1e-12);
    }
}

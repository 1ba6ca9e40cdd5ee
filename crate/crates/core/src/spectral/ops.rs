use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::field::{Field2D, Velocity2D};
use crate::error::{param, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

/// `∂_axis f` by multiplication with `iξ_axis`. The Nyquist mode of the
/// differentiated axis is dropped so real fields stay real.
pub fn spectral_derivative(f: &Field2D, axis: Axis) -> Field2D {
    let grid = *f.grid();
    f.map_spectral(move |xi1, xi2, m1, m2, c| {
        let (xi, m) = match axis {
            Axis::X1 => (xi1, m1),
            Axis::X2 => (xi2, m2),
        };
        if grid.is_nyquist(m) {
            Complex64::new(0.0, 0.0)
        } else {
            c * Complex64::new(0.0, xi)
        }
    })
}

/// Spectral Laplacian, multiplication by `-|ξ|²`.
pub fn laplacian(f: &Field2D) -> Field2D {
    f.map_spectral(|xi1, xi2, _, _, c| c * -(xi1 * xi1 + xi2 * xi2))
}

/// Largest admissible `|mean| / ‖f‖₂` for inverting the Laplacian.
pub const MEAN_TOLERANCE: f64 = 1e-8;

fn check_mean_zero(f: &Field2D) -> Result<()> {
    let mean = f.mean();
    let norm = f.spectral_l2_norm();
    if mean.abs() > MEAN_TOLERANCE * norm {
        return Err(Error::Precondition(format!(
            "field mean {mean:e} is not negligible against its L2 norm {norm:e}"
        )));
    }
    Ok(())
}

/// `Δ⁻¹ f` on mean-zero fields; the zero mode of the result is zero.
pub fn inv_laplacian(f: &Field2D) -> Result<Field2D> {
    check_mean_zero(f)?;
    Ok(f.map_spectral(|xi1, xi2, _, _, c| {
        let k2 = xi1 * xi1 + xi2 * xi2;
        if k2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            c / -k2
        }
    }))
}

/// `(-Δ)^{s/2} f`, multiplication by `|ξ|^s`. For `s > 0` the zero mode is
/// removed; `s = 0` is the identity.
pub fn frac_laplacian(f: &Field2D, s: f64) -> Result<Field2D> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(param(format!("fractional order must be >= 0, got {s}")));
    }
    if s == 0.0 {
        return Ok(f.clone());
    }
    Ok(f.map_spectral(move |xi1, xi2, _, _, c| {
        let k = xi1.hypot(xi2);
        if k == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            c * k.powf(s)
        }
    }))
}

/// Velocity `u = ∇⊥Δ⁻¹ω = (-∂₂ψ, ∂₁ψ)` with `ψ = Δ⁻¹ω`.
pub fn biot_savart(omega: &Field2D) -> Result<Velocity2D> {
    let psi = inv_laplacian(omega)?;
    let u1 = -&spectral_derivative(&psi, Axis::X2);
    let u2 = spectral_derivative(&psi, Axis::X1);
    Velocity2D::new(u1, u2)
}

pub fn divergence(u: &Velocity2D) -> Field2D {
    let a = spectral_derivative(&u.u1, Axis::X1);
    let b = spectral_derivative(&u.u2, Axis::X2);
    sum_spectral(&a, &b, 1.0)
}

/// `∂₁u₂ - ∂₂u₁`.
pub fn curl(u: &Velocity2D) -> Field2D {
    let a = spectral_derivative(&u.u2, Axis::X1);
    let b = spectral_derivative(&u.u1, Axis::X2);
    sum_spectral(&a, &b, -1.0)
}

fn sum_spectral(a: &Field2D, b: &Field2D, sign: f64) -> Field2D {
    let bc = b.spectral();
    let n = a.grid().n();
    a.map_spectral(|_, _, m1, m2, c| c + bc[m1 * n + m2] * sign)
}

/// `‖f‖_∞` of the trigonometric interpolant.
///
/// Starts from the largest grid samples and polishes each candidate with a
/// damped Newton iteration on the gradient. Never smaller than the grid
/// maximum.
pub fn sup_norm_refined(f: &Field2D) -> f64 {
    let grid = *f.grid();
    let n = grid.n();
    let h = grid.spacing();
    let v = f.physical();
    let grid_max = f.max_abs();
    if grid_max == 0.0 {
        return 0.0;
    }
    // Local extrema of |f| among the nodes, largest first.
    let mut cand: Vec<(f64, usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..n).filter_map(move |j| {
                let a = v[i * n + j].abs();
                if a < 0.5 * grid_max {
                    return None;
                }
                for di in [n - 1, 0, 1] {
                    for dj in [n - 1, 0, 1] {
                        if v[((i + di) % n) * n + (j + dj) % n].abs() > a {
                            return None;
                        }
                    }
                }
                Some((a, i, j))
            })
        })
        .collect();
    cand.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut best = grid_max;
    for &(_, i, j) in cand.iter().take(4) {
        let (x0, y0) = (grid.x(i), grid.x(j));
        let (mut x, mut y) = (x0, y0);
        for _ in 0..8 {
            let d = f.eval_with_derivatives(x, y);
            let det = d[3] * d[5] - d[4] * d[4];
            if det.abs() < 1e-300 {
                break;
            }
            let mut dx = -(d[5] * d[1] - d[4] * d[2]) / det;
            let mut dy = -(-d[4] * d[1] + d[3] * d[2]) / det;
            let len = dx.hypot(dy);
            if len > 0.5 * h {
                dx *= 0.5 * h / len;
                dy *= 0.5 * h / len;
            }
            x += dx;
            y += dy;
            if (x - x0).abs() > 2.0 * h || (y - y0).abs() > 2.0 * h {
                break;
            }
            if len < 1e-13 * h {
                break;
            }
        }
        if (x - x0).abs() <= 2.0 * h && (y - y0).abs() <= 2.0 * h {
            best = best.max(f.eval(x, y).abs());
        }
    }
    best
}

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::Serialize;

use super::covering::{AlphaCovering, Patch};
use super::norms::{check_exponent, lp_of_abs, lq_sum, smooth_step};
use super::NormSpec;
use crate::error::{param, Error, Result};
use crate::spectral::{ifft2, Field2D, GridSpec};

/// Spectral energy fraction (in L² norm) allowed outside the covered lattice.
/// Pieces whose coefficient mass is below this fraction of the largest
/// piece's are treated as zero.
pub const NEGLIGIBLE_PIECE: f64 = 1e-13;
pub const TAIL_TOLERANCE: f64 = 1e-8;

/// Regression bound on `sup_Q |Q|^{1/p-1} ‖F⁻¹ψ_Q‖_p`, measured on the
/// built-in coverings for `p ∈ {1, 2, ∞}` (largest seen: 4.8 at `p = 1`).
pub const KERNEL_BOUND_LIMIT: f64 = 8.0;

/// Window `ψ_Q` sampled on the lattice points of its footprint.
#[derive(Debug, Clone)]
struct Window {
    index: Vec<(i64, i64)>,
    slots: Vec<u32>,
    values: Vec<f64>,
}

/// Bounded admissible partition of unity subordinate to an α-covering.
#[derive(Debug, Clone)]
pub struct Bapu {
    pub covering: AlphaCovering,
    pub p: f64,
    windows: Vec<Window>,
    /// `Σ_Q ψ_Q` per lattice point: one on the covered disc, tapering to zero
    /// beyond it.
    coverage: Vec<f64>,
    /// `|Q|^{1/p-1} ‖F⁻¹ψ_Q‖_p` per patch.
    pub kernel_bounds: Vec<f64>,
    pub kernel_bound: f64,
}

/// Per-patch summary for export.
#[derive(Debug, Clone, Serialize)]
pub struct WindowSummary {
    pub patch: usize,
    pub points: usize,
    pub mass: f64,
    pub kernel_bound: f64,
}

/// Lᵖ norm of `Σ a_k exp(i ξ_k·x)` for a patch-local set of frequencies.
///
/// The frequencies are shifted to baseband so the modulus can be sampled on
/// a grid of about four times the patch width instead of the full lattice.
fn local_lp(grid: &GridSpec, patch: &Patch, terms: &[((i64, i64), Complex64)], p: f64) -> f64 {
    let [[a0, a1], [b0, b1]] = patch.index_box;
    let span = ((a1 - a0 + 1).max(b1 - b0 + 1)).max(1) as usize;
    let m = (4 * span).next_power_of_two().clamp(16, grid.n());
    let (c1, c2) = ((a0 + a1).div_euclid(2), (b0 + b1).div_euclid(2));
    let mi = m as i64;
    let mut buf = vec![Complex64::new(0.0, 0.0); m * m];
    for &((k1, k2), a) in terms {
        let (s1, s2) = (k1 - c1, k2 - c2);
        let sign = if (s1 + s2).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        buf[(s1.rem_euclid(mi) * mi + s2.rem_euclid(mi)) as usize] += a * sign;
    }
    ifft2(&mut buf, m);
    let abs: Vec<f64> = buf.iter().map(|z| z.norm()).collect();
    let cell = (2.0 * grid.half_width() / m as f64).powi(2);
    lp_of_abs(&abs, p, cell)
}

pub fn build_bapu(cov: &AlphaCovering, p: f64) -> Result<Bapu> {
    check_exponent("p", p)?;
    let grid = cov.grid;
    let n = grid.n();
    let inc = cov.incidences();
    let mut sum = vec![0.0; grid.len()];
    for &(s, _, v) in &inc {
        sum[s as usize] += v;
    }
    for s in cov.disc_slots() {
        if sum[s] <= 0.0 {
            return Err(Error::Construction(format!(
                "lattice frequency ({}, {}) lies in no patch",
                grid.freq_index(s / n),
                grid.freq_index(s % n)
            )));
        }
    }
    // Beyond ξ_max a smooth exterior weight joins the denominator, so the
    // windows fade out instead of jumping to zero at the outer edge.
    let edge = cov
        .patches
        .iter()
        .map(|p| p.shape.max_radius())
        .fold(0.0, f64::max);
    let ramp = edge - cov.xi_max;
    for (s, v) in sum.iter_mut().enumerate() {
        let r = grid.xi(s / n).hypot(grid.xi(s % n));
        if r > cov.xi_max && *v > 0.0 {
            *v += smooth_step((r - cov.xi_max) / ramp);
        }
    }
    let mut windows: Vec<Window> = cov
        .patches
        .iter()
        .map(|_| Window {
            index: Vec::new(),
            slots: Vec::new(),
            values: Vec::new(),
        })
        .collect();
    for &(s, q, v) in &inc {
        let w = &mut windows[q as usize];
        let s = s as usize;
        w.index
            .push((grid.freq_index(s / n), grid.freq_index(s % n)));
        w.slots.push(s as u32);
        w.values.push(v / sum[s]);
    }
    let area = grid.area();
    let kernel_bounds: Vec<f64> = cov
        .patches
        .par_iter()
        .zip(windows.par_iter())
        .map(|(patch, w)| {
            let terms: Vec<_> = w
                .index
                .iter()
                .zip(&w.values)
                .map(|(&k, &v)| (k, Complex64::new(v / area, 0.0)))
                .collect();
            let exponent = if p.is_infinite() { -1.0 } else { 1.0 / p - 1.0 };
            patch.area.powf(exponent) * local_lp(&grid, patch, &terms, p)
        })
        .collect();
    let kernel_bound = kernel_bounds.iter().copied().fold(0.0, f64::max);
    let mut coverage = vec![0.0; grid.len()];
    for w in &windows {
        for (&s, &v) in w.slots.iter().zip(&w.values) {
            coverage[s as usize] += v;
        }
    }
    Ok(Bapu {
        covering: cov.clone(),
        p,
        windows,
        coverage,
        kernel_bounds,
        kernel_bound,
    })
}

impl Bapu {
    pub fn grid(&self) -> &GridSpec {
        &self.covering.grid
    }

    /// `Σ_Q ψ_Q` on the full lattice.
    pub fn window_sum(&self) -> &[f64] {
        &self.coverage
    }

    /// Largest `|Σ_Q ψ_Q - 1|` over the covered disc.
    pub fn partition_defect(&self) -> f64 {
        let sum = self.window_sum();
        self.covering
            .disc_slots()
            .into_iter()
            .map(|s| (sum[s] - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Number of stored window samples lying outside their patch.
    pub fn support_violations(&self) -> usize {
        let dxi = self.grid().dxi();
        self.covering
            .patches
            .iter()
            .zip(&self.windows)
            .map(|(p, w)| {
                w.index
                    .iter()
                    .filter(|&&(k1, k2)| {
                        p.shape.raw_bump([k1 as f64 * dxi, k2 as f64 * dxi]) <= 0.0
                    })
                    .count()
            })
            .sum()
    }

    /// Largest window value outside `[0, 1]`, by how much.
    pub fn range_defect(&self) -> f64 {
        self.windows
            .iter()
            .flat_map(|w| w.values.iter())
            .map(|&v| (-v).max(v - 1.0).max(0.0))
            .fold(0.0, f64::max)
    }

    pub fn summaries(&self) -> Vec<WindowSummary> {
        self.windows
            .iter()
            .zip(&self.kernel_bounds)
            .enumerate()
            .map(|(patch, (w, &kernel_bound))| WindowSummary {
                patch,
                points: w.values.len(),
                mass: w.values.iter().sum(),
                kernel_bound,
            })
            .collect()
    }

    /// `(1 + |ξ_Q|²)^{s/2} ‖F⁻¹ψ_Q F f‖_p` for every patch, in patch order.
    pub fn weighted_pieces(&self, f: &Field2D, s: f64, p: f64) -> Result<Vec<f64>> {
        check_exponent("p", p)?;
        if f.grid() != self.grid() {
            return Err(param("field and partition live on different grids"));
        }
        let c = f.spectral();
        let total: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            return Ok(vec![0.0; self.windows.len()]);
        }
        // Energy not captured by the windows.
        let tail: f64 = c
            .iter()
            .zip(&self.coverage)
            .map(|(z, &w)| z.norm_sqr() * (1.0 - w) * (1.0 - w))
            .sum();
        if tail.sqrt() > TAIL_TOLERANCE * total.sqrt() {
            return Err(Error::Coverage(format!(
                "relative spectral tail {:.3e} outside |xi| <= {}",
                (tail / total).sqrt(),
                self.covering.xi_max
            )));
        }
        let grid = *self.grid();
        let pieces: Vec<Vec<((i64, i64), Complex64)>> = self
            .windows
            .par_iter()
            .map(|w| {
                w.index
                    .iter()
                    .zip(&w.slots)
                    .zip(&w.values)
                    .map(|((&k, &slot), &v)| (k, c[slot as usize] * v))
                    .collect()
            })
            .collect();
        // Σ|coefficients| bounds the sup of a piece; pieces far below the
        // largest one carry only rounding noise and are not transformed.
        let mass: Vec<f64> = pieces
            .iter()
            .map(|t| t.iter().map(|(_, a)| a.norm()).sum())
            .collect();
        let floor = NEGLIGIBLE_PIECE * mass.iter().cloned().fold(0.0, f64::max);
        Ok(self
            .covering
            .patches
            .par_iter()
            .zip(pieces.par_iter())
            .zip(mass.par_iter())
            .map(|((patch, terms), &m)| {
                if m <= floor {
                    return 0.0;
                }
                let xi2 = patch.center[0].powi(2) + patch.center[1].powi(2);
                (1.0 + xi2).powf(0.5 * s) * local_lp(&grid, patch, terms, p)
            })
            .collect())
    }
}

/// `(Σ_Q (1+|ξ_Q|²)^{qs/2} ‖F⁻¹ψ_Q F f‖_p^q)^{1/q}`.
pub fn alpha_mod_norm(f: &Field2D, spec: &NormSpec, bapu: &Bapu) -> Result<f64> {
    let NormSpec::AlphaMod { s, alpha, p, q } = *spec else {
        return Err(param(format!(
            "alpha_mod_norm needs an AlphaMod spec, got {}",
            spec.tag()
        )));
    };
    spec.validate()?;
    if (alpha - bapu.covering.alpha).abs() > 1e-12 {
        return Err(param(format!(
            "spec alpha {alpha} does not match covering alpha {}",
            bapu.covering.alpha
        )));
    }
    let terms = bapu.weighted_pieces(f, s, p)?;
    Ok(lq_sum(&terms, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::build_alpha_covering;
    use std::f64::consts::PI;

    #[test]
    fn partition_and_support() {
        let g = GridSpec::new(PI, 128).unwrap();
        let cov = build_alpha_covering(0.5, 60.0, g).unwrap();
        let b = build_bapu(&cov, 2.0).unwrap();
        assert!(b.partition_defect() < 1e-12);
        assert_eq!(b.support_violations(), 0);
        assert!(b.range_defect() < 1e-15);
        assert!(b.kernel_bound.is_finite() && b.kernel_bound <= KERNEL_BOUND_LIMIT);
    }

    #[test]
    fn l2_kernel_matches_parseval() {
        // ‖F⁻¹ψ‖₂ = ‖ψ‖₂ / (2π) in the continuum; on the torus the lattice
        // sum replaces the integral.
        let g = GridSpec::new(PI, 64).unwrap();
        let cov = build_alpha_covering(1.0, 32.0, g).unwrap();
        let b = build_bapu(&cov, 2.0).unwrap();
        for (q, w) in b.windows.iter().enumerate() {
            let l2: f64 = w.values.iter().map(|v| v * v).sum::<f64>().sqrt() * g.dxi() / (2.0 * PI);
            let expect = cov.patches[q].area.powf(-0.5) * l2;
            assert!((b.kernel_bounds[q] / expect - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn single_patch_piece() {
        let g = GridSpec::new(PI, 64).unwrap();
        let cov = build_alpha_covering(1.0, 32.0, g).unwrap();
        let b = build_bapu(&cov, 2.0).unwrap();
        // cos(8 x₁) sits where shell 3 equals one and every other window vanishes.
        let f = Field2D::from_fn(g, |x, _| (8.0 * x).cos());
        let pieces = b.weighted_pieces(&f, 0.0, 2.0).unwrap();
        let l2 = f.l2_norm();
        for (q, v) in pieces.iter().enumerate() {
            if q == 3 {
                assert!((v / l2 - 1.0).abs() < 1e-12);
            } else {
                assert!(*v < 1e-12 * l2);
            }
        }
    }

    #[test]
    fn uncovered_spectrum_is_rejected() {
        let g = GridSpec::new(PI, 64).unwrap();
        let cov = build_alpha_covering(1.0, 8.0, g).unwrap();
        let b = build_bapu(&cov, 2.0).unwrap();
        let f = Field2D::from_fn(g, |x, _| (30.0 * x).sin());
        let spec = NormSpec::AlphaMod {
            s: 0.0,
            alpha: 1.0,
            p: 2.0,
            q: 2.0,
        };
        assert!(matches!(
            alpha_mod_norm(&f, &spec, &b),
            Err(Error::Coverage(_))
        ));
    }
}

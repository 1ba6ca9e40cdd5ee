use std::f64::consts::TAU;

use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{param, Result};
use crate::funcspace::smooth_step;
use crate::spectral::{Field2D, GridSpec};

/// Frequency-side profile `ρ̂ = χ̂(· - ξ₀) + χ̂(· + ξ₀)`.
///
/// `χ̂` is radial, equal to a constant on `|ξ| ≤ plateau` and decaying
/// smoothly to zero at `|ξ| = 1`, scaled to unit integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoSpec {
    pub plateau: f64,
    pub shift: [f64; 2],
    #[serde(skip)]
    norm: f64,
}

impl Default for RhoSpec {
    fn default() -> Self {
        Self::new(0.25, [2.0, 0.0]).expect("default profile is valid")
    }
}

impl RhoSpec {
    pub fn new(plateau: f64, shift: [f64; 2]) -> Result<Self> {
        if !(plateau > 0.0 && plateau < 1.0) {
            return Err(param(format!(
                "plateau radius must lie in (0, 1), got {plateau}"
            )));
        }
        let norm = 1.0 / (TAU * radial_moment(plateau));
        Ok(Self {
            plateau,
            shift,
            norm,
        })
    }

    fn profile(&self, r: f64) -> f64 {
        if r <= self.plateau {
            1.0
        } else if r >= 1.0 {
            0.0
        } else {
            smooth_step((1.0 - r) / (1.0 - self.plateau))
        }
    }

    /// `χ̂(ξ)`.
    pub fn chi_hat(&self, xi: [f64; 2]) -> f64 {
        self.norm * self.profile(xi[0].hypot(xi[1]))
    }

    /// `ρ̂(ξ)`.
    pub fn rho_hat(&self, xi: [f64; 2]) -> f64 {
        let [a, b] = self.shift;
        self.chi_hat([xi[0] - a, xi[1] - b]) + self.chi_hat([xi[0] + a, xi[1] + b])
    }

    /// Largest `|ξ|` in the support of `ρ̂`.
    pub fn reach(&self) -> f64 {
        self.shift[0].hypot(self.shift[1]) + 1.0
    }
}

/// `∫₀¹ S(r) r dr` by composite Simpson on the transition band.
fn radial_moment(plateau: f64) -> f64 {
    let n = 20_000;
    let h = (1.0 - plateau) / n as f64;
    let f = |r: f64| smooth_step((1.0 - r) / (1.0 - plateau)) * r;
    let mut s = f(plateau) + f(1.0);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(plateau + i as f64 * h);
    }
    0.5 * plateau * plateau + s * h / 3.0
}

/// `ρ(x) = ∫ ρ̂(ξ) e^{iξ·x} dξ` on the torus, from lattice samples of `ρ̂`.
pub fn rho_field(spec: &RhoSpec, grid: GridSpec) -> Result<Field2D> {
    if grid.nyquist() < spec.reach() {
        return Err(param(format!(
            "grid Nyquist {} is below the spectral reach {}",
            grid.nyquist(),
            spec.reach()
        )));
    }
    let n = grid.n();
    let w = grid.dxi() * grid.dxi();
    let mut c = vec![Complex64::new(0.0, 0.0); grid.len()];
    for m1 in 0..n {
        for m2 in 0..n {
            c[m1 * n + m2] = Complex64::new(w * spec.rho_hat([grid.xi(m1), grid.xi(m2)]), 0.0);
        }
    }
    Field2D::from_spectral(grid, c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_has_unit_mass() {
        let s = RhoSpec::default();
        // Brute-force Riemann sum on a fine square lattice.
        let h = 1.0 / 800.0;
        let mut m = 0.0;
        for i in -800..=800 {
            for j in -800..=800 {
                m += s.chi_hat([i as f64 * h, j as f64 * h]);
            }
        }
        assert!((m * h * h - 1.0).abs() < 1e-6);
    }

    #[test]
    fn support_is_two_unit_balls() {
        let s = RhoSpec::default();
        assert!(s.rho_hat([2.0, 0.0]) > 0.0);
        assert!(s.rho_hat([-2.5, 0.5]) > 0.0);
        assert_eq!(s.rho_hat([0.0, 0.0]), 0.0);
        assert_eq!(s.rho_hat([3.0, 0.0]), 0.0);
        assert_eq!(s.rho_hat([2.0, 1.0]), 0.0);
    }

    #[test]
    fn rejects_coarse_grid() {
        let g = GridSpec::new(16.0, 16).unwrap();
        assert!(rho_field(&RhoSpec::default(), g).is_err());
    }
}

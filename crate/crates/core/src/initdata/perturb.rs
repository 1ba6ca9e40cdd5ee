use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bump::{omega0, Omega0Params};
use super::rho::RhoSpec;
use crate::error::{param, Error, Result};
use crate::spectral::{Field2D, GridSpec};

/// Minimum cells across the concentration length `1/λ`.
pub const CELLS_PER_SCALE: f64 = 8.0;
/// Reflections of `x*` must stay this many concentration lengths inside the
/// domain.
pub const MARGIN_SCALES: f64 = 2.0;
/// Default large-gradient point when no flow measurement is supplied.
pub const DEFAULT_X_STAR: [f64; 2] = [0.05, 0.05];

/// Frequency, concentration and placement of a high-frequency perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbParams {
    pub k: u32,
    pub lambda: f64,
    pub alpha_tilde: f64,
    pub r: f64,
    pub x_star: [f64; 2],
    pub sigma: f64,
}

impl PerturbParams {
    /// `λ = k^{α̃}`.
    pub fn paper_regime(
        k: u32,
        alpha_tilde: f64,
        r: f64,
        x_star: [f64; 2],
        sigma: f64,
    ) -> Result<Self> {
        let p = Self {
            k,
            lambda: (k as f64).powf(alpha_tilde),
            alpha_tilde,
            r,
            x_star,
            sigma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 8 {
            return Err(param(format!("k must be at least 8, got {}", self.k)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(param(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if !(self.alpha_tilde > 0.0 && self.alpha_tilde <= 1.0) {
            return Err(param(format!(
                "alpha_tilde must lie in (0, 1], got {}",
                self.alpha_tilde
            )));
        }
        if !(self.r > 2.0 && self.r.is_finite()) {
            return Err(param(format!("r must lie in (2, inf), got {}", self.r)));
        }
        if !(self.sigma > 0.0 && self.sigma < 1.0) {
            return Err(param(format!(
                "sigma must lie in (0, 1), got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    pub fn in_paper_regime(&self) -> bool {
        let expect = (self.k as f64).powf(self.alpha_tilde);
        (self.lambda - expect).abs() <= 1e-12 * expect
    }

    /// `λ^{-1+2/r} / k^{1-α̃}`.
    pub fn amplitude(&self) -> f64 {
        self.lambda.powf(-1.0 + 2.0 / self.r) / (self.k as f64).powf(1.0 - self.alpha_tilde)
    }

    /// Largest `|ξ₁|` carrying spectral mass: `k + 3λ`.
    pub fn spectral_reach(&self, rho: &RhoSpec) -> f64 {
        self.k as f64 + self.lambda * rho.reach()
    }
}

fn check_grid(p: &PerturbParams, rho: &RhoSpec, grid: &GridSpec) -> Result<()> {
    p.validate()?;
    let h = grid.spacing();
    let reach = p.spectral_reach(rho);
    if reach >= grid.nyquist() {
        return Err(Error::Resolution(format!(
            "spectrum reaches {reach}, grid Nyquist is {}",
            grid.nyquist()
        )));
    }
    if 1.0 / p.lambda < CELLS_PER_SCALE * h {
        return Err(Error::Resolution(format!(
            "1/lambda = {:.4} spans fewer than {CELLS_PER_SCALE} cells of {h:.4}",
            1.0 / p.lambda
        )));
    }
    let periods = p.k as f64 / grid.dxi();
    if (periods - periods.round()).abs() > 1e-9 {
        return Err(Error::Precondition(format!(
            "sin({} x1) is not periodic on [-{L}, {L})",
            p.k,
            L = grid.half_width()
        )));
    }
    let margin = MARGIN_SCALES / p.lambda;
    let lim = grid.half_width() - margin;
    if p.x_star[0].abs() > lim || p.x_star[1].abs() > lim {
        return Err(Error::Precondition(format!(
            "x* = {:?} leaves less than {margin:.3} to the boundary",
            p.x_star
        )));
    }
    Ok(())
}

/// `Σ_ε ε₁ε₂ ρ(λ(x - x*_ε))` as lattice coefficients.
///
/// Summing the four shifted copies of `λ⁻²ρ̂(ξ/λ)e^{-iξ·x*_ε}` gives
/// `-4 λ⁻² ρ̂(ξ/λ) sin(ξ₁x₁*) sin(ξ₂x₂*)`, which is real.
fn quadrupole_envelope(p: &PerturbParams, rho: &RhoSpec, grid: &GridSpec) -> Result<Field2D> {
    let n = grid.n();
    let w = grid.dxi() * grid.dxi() / (p.lambda * p.lambda);
    let [a, b] = p.x_star;
    let mut c = vec![Complex64::new(0.0, 0.0); grid.len()];
    for m1 in 0..n {
        let x1 = grid.xi(m1);
        for m2 in 0..n {
            let x2 = grid.xi(m2);
            let v = rho.rho_hat([x1 / p.lambda, x2 / p.lambda]);
            if v != 0.0 {
                c[m1 * n + m2] =
                    Complex64::new(-4.0 * w * v * (x1 * a).sin() * (x2 * b).sin(), 0.0);
            }
        }
    }
    Field2D::from_spectral(*grid, c)
}

/// The perturbation `β_{k,λ}` on `grid`.
pub fn beta_perturbation(p: &PerturbParams, grid: GridSpec) -> Result<Field2D> {
    beta_perturbation_with(p, &RhoSpec::default(), grid)
}

pub fn beta_perturbation_with(p: &PerturbParams, rho: &RhoSpec, grid: GridSpec) -> Result<Field2D> {
    check_grid(p, rho, &grid)?;
    let env = quadrupole_envelope(p, rho, &grid)?;
    let amp = p.amplitude();
    let k = p.k as f64;
    let n = grid.n();
    let coords = grid.coords();
    let samples: Vec<f64> = env
        .physical()
        .iter()
        .enumerate()
        .map(|(idx, &v)| amp * v * (k * coords[idx / n]).sin())
        .collect();
    Field2D::from_physical(grid, samples)
}

/// Closed-form Fourier transform of `β` in the convention
/// `β(x) = ∫ β̂(ξ) e^{iξ·x} dξ`.
pub fn beta_hat(p: &PerturbParams, rho: &RhoSpec, xi: [f64; 2]) -> Complex64 {
    let lam = p.lambda;
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, sign) in [(1, 1.0), (2, -1.0)] {
        // ξ + (-1)^j (k, 0)
        let shifted = [
            xi[0] + if j == 1 { -(p.k as f64) } else { p.k as f64 },
            xi[1],
        ];
        let v = rho.rho_hat([shifted[0] / lam, shifted[1] / lam]);
        if v == 0.0 {
            continue;
        }
        for e1 in [1.0, -1.0] {
            for e2 in [1.0, -1.0] {
                let phase = -(e1 * p.x_star[0] * shifted[0] + e2 * p.x_star[1] * shifted[1]);
                acc += e1 * e2 * sign * v * Complex64::from_polar(1.0, phase);
            }
        }
    }
    acc * p.amplitude() / Complex64::new(0.0, 2.0 * lam * lam)
}

/// `ω_{0,n} = ω₀ + β_n`, or `ω₀` itself when no perturbation is given.
pub fn perturbed_vorticity(
    n: u32,
    base: &Omega0Params,
    pert: Option<&PerturbParams>,
    grid: GridSpec,
) -> Result<Field2D> {
    let w0 = omega0(base, grid)?;
    let Some(p) = pert else {
        return Ok(w0);
    };
    if p.k != n || !p.in_paper_regime() {
        return Err(Error::Precondition(format!(
            "perturbation must have k = n = {n} and lambda = n^alpha_tilde"
        )));
    }
    let beta = beta_perturbation(p, grid)?;
    Ok(&w0 + &beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(k: u32) -> PerturbParams {
        PerturbParams::paper_regime(k, 0.5, 4.0, [PI / 2.0, PI / 2.0], 0.5).unwrap()
    }

    #[test]
    fn regime_and_amplitude() {
        let p = params(64);
        assert_eq!(p.lambda, 8.0);
        assert!(p.in_paper_regime());
        // λ^{-1/2} k^{-1/2} = 1 / (√8 · 8)
        assert!((p.amplitude() - 1.0 / (8.0 * 8f64.sqrt())).abs() < 1e-15);
        assert!(PerturbParams::paper_regime(4, 0.5, 4.0, [0.0; 2], 0.5).is_err());
    }

    #[test]
    fn grid_preconditions() {
        let p = params(64);
        let coarse = GridSpec::new(PI, 128).unwrap();
        assert!(matches!(
            beta_perturbation(&p, coarse),
            Err(Error::Resolution(_))
        ));
        let wide = GridSpec::new(1.7, 512).unwrap();
        assert!(beta_perturbation(&p, wide).is_err());
    }

    #[test]
    fn zero_perturbation_returns_base() {
        let g = GridSpec::new(2.0, 256).unwrap();
        let base = Omega0Params::new(4.0, 1, 1, 2.5).unwrap();
        let a = perturbed_vorticity(32, &base, None, g).unwrap();
        let b = omega0(&base, g).unwrap();
        assert_eq!(a.physical(), b.physical());
    }
}

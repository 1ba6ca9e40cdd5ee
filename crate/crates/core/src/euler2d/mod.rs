//! Pseudo-spectral solver for `ω_t + u·∇ω = 0`, `u = ∇⊥Δ⁻¹ω`, on the torus.
//!
//! Time stepping is classical RK4 on the Fourier coefficients. With the
//! two-thirds rule on, modes with `3|m| ≥ N` in either direction are removed
//! from the state and from every nonlinear product, so the scheme is an exact
//! Galerkin truncation: energy and enstrophy are conserved up to the RK4
//! error.

mod diag;

pub use diag::{
    diagnostics_csv, histogram_distance, value_histogram, DiagnosticRow, DiagnosticSpec,
    Trajectory, DIAGNOSTIC_CSV_HEADER, SYMMETRY_TOLERANCE,
};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{biot_savart, Field2D, GridSpec, Velocity2D};
use crate::spectral::{physical_to_spectral, spectral_to_complex};

/// Largest admissible Courant number `dt·‖u‖_∞ / h`.
pub const CFL: f64 = 0.5;
/// Tolerated `|mean ω| / ‖ω‖₂` for a state.
pub const MEAN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Two-thirds rule on the state and the nonlinear term.
    pub dealias: bool,
    /// Steps between diagnostic rows.
    pub cadence: usize,
}

impl SolverConfig {
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Parameter(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Parameter(format!(
                "T must be non-negative, got {}",
                self.t_end
            )));
        }
        if self.cadence == 0 {
            return Err(Error::Parameter(
                "diagnostic cadence must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Vorticity at time `t` with its velocity.
#[derive(Debug, Clone)]
pub struct EulerState {
    t: f64,
    omega: Field2D,
    u: Velocity2D,
}

impl EulerState {
    pub fn new(omega: Field2D) -> Result<Self> {
        Self::at_time(0.0, omega)
    }

    pub fn at_time(t: f64, omega: Field2D) -> Result<Self> {
        let l2 = omega.spectral_l2_norm();
        let mean = omega.mean() * omega.grid().area().sqrt();
        if mean.abs() > MEAN_TOLERANCE * l2.max(f64::MIN_POSITIVE) {
            return Err(Error::Precondition(format!(
                "vorticity mean {:.3e} is not negligible against its L2 norm {l2:.3e}",
                omega.mean()
            )));
        }
        let u = biot_savart(&omega)?;
        Ok(Self { t, omega, u })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn omega(&self) -> &Field2D {
        &self.omega
    }

    pub fn velocity(&self) -> &Velocity2D {
        &self.u
    }

    pub fn grid(&self) -> &GridSpec {
        self.omega.grid()
    }

    /// `½‖u‖₂²`, from the coefficients.
    pub fn energy(&self) -> f64 {
        let g = *self.grid();
        let n = g.n();
        let c = self.omega.spectral();
        let mut s = 0.0;
        for m1 in 0..n {
            for m2 in 0..n {
                let k2 = g.xi(m1).powi(2) + g.xi(m2).powi(2);
                if k2 > 0.0 {
                    s += c[m1 * n + m2].norm_sqr() / k2;
                }
            }
        }
        0.5 * g.area() * s
    }

    /// `½‖ω‖₂²`.
    pub fn enstrophy(&self) -> f64 {
        0.5 * self.omega.spectral_l2_norm().powi(2)
    }

    /// Time step allowed by the CFL condition.
    pub fn dt_limit(&self) -> f64 {
        let v = self.u.max_speed();
        if v == 0.0 {
            f64::INFINITY
        } else {
            CFL * self.grid().spacing() / v
        }
    }
}

/// Wavenumbers with the Nyquist entry zeroed, and the dealiasing mask.
struct Operators {
    xi: Vec<f64>,
    keep: Vec<bool>,
}

impl Operators {
    fn new(grid: &GridSpec, dealias: bool) -> Self {
        let n = grid.n();
        let xi = (0..n)
            .map(|m| if grid.is_nyquist(m) { 0.0 } else { grid.xi(m) })
            .collect();
        let keep = (0..n)
            .map(|m| !dealias || 3 * grid.freq_index(m).unsigned_abs() as usize <= n - 1)
            .collect();
        Self { xi, keep }
    }

    fn project(&self, c: &mut [Complex64]) {
        let n = self.xi.len();
        for m1 in 0..n {
            for m2 in 0..n {
                if !(self.keep[m1] && self.keep[m2]) {
                    c[m1 * n + m2] = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// `-P(u·∇ω)` for coefficients `w`.
    fn rhs(&self, grid: &GridSpec, w: &[Complex64]) -> Vec<Complex64> {
        let n = grid.n();
        let i = Complex64::new(0.0, 1.0);
        // Pack (u₁, u₂) and (∂₁ω, ∂₂ω) as real and imaginary parts.
        let mut vel = vec![Complex64::new(0.0, 0.0); n * n];
        let mut grad = vec![Complex64::new(0.0, 0.0); n * n];
        for m1 in 0..n {
            let k1 = self.xi[m1];
            let g1 = grid.xi(m1);
            for m2 in 0..n {
                let k2 = self.xi[m2];
                let g2 = grid.xi(m2);
                let c = w[m1 * n + m2];
                let kk = g1 * g1 + g2 * g2;
                let psi = if kk > 0.0 {
                    -c / kk
                } else {
                    Complex64::new(0.0, 0.0)
                };
                let u1 = -i * k2 * psi;
                let u2 = i * k1 * psi;
                vel[m1 * n + m2] = u1 + i * u2;
                grad[m1 * n + m2] = i * k1 * c + i * (i * k2 * c);
            }
        }
        let vel = spectral_to_complex(grid, &vel);
        let grad = spectral_to_complex(grid, &grad);
        let prod: Vec<f64> = vel
            .iter()
            .zip(&grad)
            .map(|(v, g)| v.re * g.re + v.im * g.im)
            .collect();
        let mut out = physical_to_spectral(grid, &prod);
        for c in out.iter_mut() {
            *c = -*c;
        }
        self.project(&mut out);
        out
    }
}

fn axpy(y: &[Complex64], a: f64, x: &[Complex64]) -> Vec<Complex64> {
    y.iter().zip(x).map(|(y, x)| y + a * x).collect()
}

/// One RK4 step. With dealiasing on, the incoming state is first projected
/// onto the retained modes.
pub fn step(state: &EulerState, cfg: &SolverConfig) -> Result<EulerState> {
    step_by(state, cfg.dt, cfg.dealias)
}

fn step_by(state: &EulerState, dt: f64, dealias: bool) -> Result<EulerState> {
    let limit = state.dt_limit();
    if dt > limit {
        return Err(Error::StepSize { dt, limit });
    }
    let grid = *state.grid();
    let ops = Operators::new(&grid, dealias);
    let mut w = state.omega.spectral().to_vec();
    ops.project(&mut w);
    let k1 = ops.rhs(&grid, &w);
    let k2 = ops.rhs(&grid, &axpy(&w, 0.5 * dt, &k1));
    let k3 = ops.rhs(&grid, &axpy(&w, 0.5 * dt, &k2));
    let k4 = ops.rhs(&grid, &axpy(&w, dt, &k3));
    let next: Vec<Complex64> = (0..w.len())
        .map(|j| w[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]))
        .collect();
    let t = state.t + dt;
    if next.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::Divergence { t });
    }
    let omega = Field2D::from_spectral(grid, next)?;
    EulerState::at_time(t, omega)
}

/// Integrates to `cfg.t_end`, recording diagnostics and keeping states every
/// `cfg.cadence` steps (plus the initial and final states).
pub fn solve(omega0: &Field2D, cfg: &SolverConfig, diag: &DiagnosticSpec) -> Result<Trajectory> {
    cfg.validate()?;
    let mut state = EulerState::new(omega0.clone())?;
    if cfg.dealias {
        let ops = Operators::new(omega0.grid(), true);
        let mut w = omega0.spectral().to_vec();
        ops.project(&mut w);
        state = EulerState::new(Field2D::from_spectral(*omega0.grid(), w)?)?;
    }
    let odd_odd =
        diag.check_symmetry && state.omega.odd_odd_defect() <= 1e-14 * state.omega.max_abs();
    let mut traj = Trajectory::new(*diag, odd_odd);
    traj.record(&state)?;
    let steps = cfg.steps();
    for s in 1..=steps {
        let dt = if s == steps {
            cfg.t_end - state.t
        } else {
            cfg.dt
        };
        state = step_by(&state, dt.min(cfg.dt), cfg.dealias)?;
        if s % cfg.cadence == 0 || s == steps {
            traj.record(&state)?;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg(dt: f64, t_end: f64) -> SolverConfig {
        SolverConfig {
            dt,
            t_end,
            dealias: true,
            cadence: 1,
        }
    }

    #[test]
    fn zero_stays_zero() {
        let g = GridSpec::new(PI, 32).unwrap();
        let s = EulerState::new(Field2D::zeros(g)).unwrap();
        let next = step(&s, &cfg(0.1, 0.1)).unwrap();
        assert_eq!(next.omega().max_abs(), 0.0);
        assert!((next.time() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn shear_is_steady() {
        let g = GridSpec::new(PI, 32).unwrap();
        let w = Field2D::from_fn(g, |x, _| x.sin());
        let mut s = EulerState::new(w.clone()).unwrap();
        for _ in 0..10 {
            s = step(&s, &cfg(0.05, 1.0)).unwrap();
        }
        let err = s
            .omega()
            .physical()
            .iter()
            .zip(w.physical())
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-13);
    }

    #[test]
    fn cfl_is_enforced() {
        let g = GridSpec::new(PI, 32).unwrap();
        let s = EulerState::new(Field2D::from_fn(g, |x, y| 10.0 * x.sin() * y.sin())).unwrap();
        assert!(matches!(
            step(&s, &cfg(1.0, 1.0)),
            Err(Error::StepSize { .. })
        ));
    }

    #[test]
    fn nonzero_mean_is_rejected() {
        let g = GridSpec::new(PI, 16).unwrap();
        assert!(EulerState::new(Field2D::from_fn(g, |x, _| 1.0 + x.sin())).is_err());
    }

    #[test]
    fn step_count_covers_horizon() {
        assert_eq!(cfg(0.1, 1.0).steps(), 10);
        assert_eq!(cfg(0.3, 1.0).steps(), 4);
        assert_eq!(cfg(0.3, 0.0).steps(), 0);
    }
}

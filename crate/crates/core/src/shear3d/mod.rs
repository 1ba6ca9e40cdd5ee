//! Exact 3D shear flows `u(t, x) = (f(x₂), 0, h(x₁ - t f(x₂)))` and the
//! resulting discontinuity of the data-to-solution map in `C^{1+σ}`.
//!
//! Two shear flows built from profiles `f` and `g` that are `ε`-close in
//! `C^{1+σ}` stay a distance of at least 2 apart at any positive time,
//! because `h'(x₁) = |x₁|^σ` turns the shift `t(f - g)` into a fixed Hölder
//! quotient.

mod gap;
mod profile;

pub use gap::{
    c1sigma_norm_1d, solution_gap, witness_quotient, GapLevel, GapReport, GAP_CSV_HEADER,
    SWEEP_CONSTANTS,
};
pub use profile::{build_h, HProfile, Profile, TabulatedProfile};

use serde::Serialize;

use crate::error::{param, Result};

/// The pair of profiles `(f, g)` with the exponent `σ`; `h` is built from
/// `a = max(sup|f|, sup|g|)`.
#[derive(Debug, Clone)]
pub struct ShearSpec {
    pub f: Profile,
    pub g: Profile,
    pub sigma: f64,
    h: HProfile,
    a: f64,
    b: f64,
}

/// Half width used to locate `sup|f|` of profiles without compact support
/// information.
const PROFILE_EXTENT: f64 = 4.0;

impl ShearSpec {
    pub fn new(f: Profile, g: Profile, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(param(format!("sigma must lie in (0, 1), got {sigma}")));
        }
        let (sf, sg) = (f.sup_abs(PROFILE_EXTENT), g.sup_abs(PROFILE_EXTENT));
        let a = sf.max(sg);
        let b = sf.min(sg);
        // h needs a positive cap point even when both profiles vanish.
        let h = build_h(sigma, a.max(f64::MIN_POSITIVE))?;
        Ok(Self {
            f,
            g,
            sigma,
            h,
            a,
            b,
        })
    }

    /// `f ≡ 0`, `g ≡ ε`.
    pub fn constant_pair(sigma: f64, eps: f64) -> Result<Self> {
        Self::new(Profile::Constant(0.0), Profile::Constant(eps), sigma)
    }

    /// `f = φ`, `g = (1 + δ)φ` with `φ` the unit smooth bump on `(-1, 1)` and
    /// `δ` chosen so that `‖f - g‖_{C^{1+σ}} = ε`.
    pub fn bump_pair(sigma: f64, eps: f64) -> Result<Self> {
        let unit = Profile::Bump {
            amplitude: 1.0,
            center: 0.0,
            width: 1.0,
        };
        let norm = c1sigma_norm_1d(&unit, sigma, (-1.0, 1.0))?;
        let delta = eps / norm;
        Self::new(
            unit,
            Profile::Bump {
                amplitude: 1.0 + delta,
                center: 0.0,
                width: 1.0,
            },
            sigma,
        )
    }

    pub fn h(&self) -> &HProfile {
        &self.h
    }

    /// `max(sup|f|, sup|g|)`.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// `min(sup|f|, sup|g|)`.
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn solution_u(&self) -> ShearSolution<'_> {
        ShearSolution {
            profile: &self.f,
            h: &self.h,
        }
    }

    pub fn solution_v(&self) -> ShearSolution<'_> {
        ShearSolution {
            profile: &self.g,
            h: &self.h,
        }
    }
}

/// `x ↦ (p(x₂), 0, h(x₁ - t p(x₂)))`.
#[derive(Debug, Clone, Copy)]
pub struct ShearSolution<'a> {
    profile: &'a Profile,
    h: &'a HProfile,
}

impl ShearSolution<'_> {
    pub fn velocity(&self, t: f64, x: [f64; 3]) -> [f64; 3] {
        let p = self.profile.value(x[1]);
        [p, 0.0, self.h.value(x[0] - t * p)]
    }

    /// `∂_j u_i`.
    pub fn gradient(&self, t: f64, x: [f64; 3]) -> [[f64; 3]; 3] {
        let p = self.profile.value(x[1]);
        let dp = self.profile.derivative(x[1]);
        let hp = self.h.derivative(x[0] - t * p);
        [[0.0, dp, 0.0], [0.0, 0.0, 0.0], [hp, -t * dp * hp, 0.0]]
    }

    pub fn divergence(&self, t: f64, x: [f64; 3]) -> f64 {
        let g = self.gradient(t, x);
        g[0][0] + g[1][1] + g[2][2]
    }

    /// `∂_t u + u·∇u` evaluated term by term.
    pub fn euler_residual(&self, t: f64, x: [f64; 3]) -> [f64; 3] {
        let u = self.velocity(t, x);
        let grad = self.gradient(t, x);
        let hp = self.h.derivative(x[0] - t * u[0]);
        let dt = [0.0, 0.0, -u[0] * hp];
        let mut r = [0.0; 3];
        for i in 0..3 {
            r[i] = dt[i] + (0..3).map(|j| u[j] * grad[i][j]).sum::<f64>();
        }
        r
    }
}

/// Sample points used by [`verify_euler`] per axis.
pub const RESIDUAL_SAMPLES: usize = 41;

/// Residual summary for one solution and time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub t: f64,
    pub momentum: f64,
    pub divergence: f64,
}

/// Largest `|∂_t u + u·∇u|` and `|∇·u|` over a grid on `[-2a, 2a]²`
/// (the fields do not depend on `x₃`).
pub fn verify_euler(sol: &ShearSolution<'_>, t: f64) -> Result<Residual> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(param(format!("t must be non-negative, got {t}")));
    }
    let half = 2.0 * sol.h.a() + 1.0;
    let n = RESIDUAL_SAMPLES;
    let mut momentum: f64 = 0.0;
    let mut divergence: f64 = 0.0;
    for i in 0..n {
        let x1 = -half + 2.0 * half * i as f64 / (n - 1) as f64;
        for j in 0..n {
            let x2 = -half + 2.0 * half * j as f64 / (n - 1) as f64;
            let r = sol.euler_residual(t, [x1, x2, 0.0]);
            momentum = momentum.max(r.iter().fold(0.0, |m, v| m.max(v.abs())));
            divergence = divergence.max(sol.divergence(t, [x1, x2, 0.0]).abs());
        }
    }
    Ok(Residual {
        t,
        momentum,
        divergence,
    })
}

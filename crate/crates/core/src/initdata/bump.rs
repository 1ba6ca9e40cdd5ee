use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::funcspace::lp_norm;
use crate::spectral::{spectral_derivative, Axis, Field2D, GridSpec};

/// Largest admissible support radius of the radial bump.
pub const MAX_BUMP_RADIUS: f64 = 0.25;
/// Minimum number of grid cells across one bump.
pub const CELLS_PER_BUMP: f64 = 8.0;

/// `exp(1 - 1/(1 - |x/s|²))` on `|x| < s`, zero outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    radius: f64,
}

pub fn base_bump(radius_scale: f64) -> Result<Bump> {
    if !(radius_scale > 0.0) {
        return Err(param(format!(
            "bump radius must be positive, got {radius_scale}"
        )));
    }
    if radius_scale > MAX_BUMP_RADIUS {
        return Err(param(format!(
            "bump radius {radius_scale} exceeds the support bound {MAX_BUMP_RADIUS}"
        )));
    }
    Ok(Bump {
        radius: radius_scale,
    })
}

impl Bump {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Value at squared distance `d2` from the centre.
    #[inline]
    pub fn at_sq(&self, d2: f64) -> f64 {
        let t = d2 / (self.radius * self.radius);
        if t >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - t)).exp()
        }
    }

    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        self.at_sq(x1 * x1 + x2 * x2)
    }

    /// Radial profile `r ↦ φ(r)`.
    pub fn profile(&self, r: f64) -> f64 {
        self.at_sq(r * r)
    }
}

/// `Σ ε₁ε₂ φ(x₁ - ε₁, x₂ - ε₂)`: four bumps at `(±1, ±1)` with alternating
/// signs. Evaluated through the sign of each coordinate, so it is exactly odd
/// in each variable.
pub fn quadrupole_value(bump: &Bump, x1: f64, x2: f64) -> f64 {
    let s = x1.signum() * x2.signum();
    if x1 == 0.0 || x2 == 0.0 {
        return 0.0;
    }
    let (a, b) = (x1.abs() - 1.0, x2.abs() - 1.0);
    s * bump.at_sq(a * a + b * b)
}

/// `2^{(-1+2/r)k} φ₀(2^k x)`.
pub fn scaled_quadrupole_value(bump: &Bump, k: u32, r: f64, x1: f64, x2: f64) -> f64 {
    let s = (k as f64).exp2();
    ((-1.0 + 2.0 / r) * k as f64).exp2() * quadrupole_value(bump, s * x1, s * x2)
}

fn check_resolved(grid: &GridSpec, k: u32) -> Result<()> {
    let diameter = 2.0 * MAX_BUMP_RADIUS * (-(k as f64)).exp2();
    if diameter < CELLS_PER_BUMP * grid.spacing() {
        return Err(Error::Resolution(format!(
            "scale 2^-{k} needs spacing <= {:.3e}, grid has {:.3e}",
            diameter / CELLS_PER_BUMP,
            grid.spacing()
        )));
    }
    let reach = (-(k as f64)).exp2() * (1.0 + MAX_BUMP_RADIUS);
    if reach >= grid.half_width() {
        return Err(Error::Resolution(format!(
            "scale 2^-{k} reaches {reach}, outside the domain half width {}",
            grid.half_width()
        )));
    }
    Ok(())
}

/// The rescaled quadrupole `φ_k` sampled on `grid`.
pub fn quadrupole(k: u32, r: f64, grid: GridSpec) -> Result<Field2D> {
    check_exponent_r(r)?;
    check_resolved(&grid, k)?;
    let bump = base_bump(MAX_BUMP_RADIUS)?;
    Ok(Field2D::from_fn(grid, move |x1, x2| {
        scaled_quadrupole_value(&bump, k, r, x1, x2)
    }))
}

fn check_exponent_r(r: f64) -> Result<()> {
    if !(r > 2.0 && r.is_finite()) {
        return Err(param(format!("r must lie in (2, inf), got {r}")));
    }
    Ok(())
}

/// Parameters of the initial vorticity `ω₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Omega0Params {
    /// Largeness parameter; the amplitude is `M⁻²`.
    pub m: f64,
    /// Index of the coarsest scale.
    pub start: u32,
    /// Number of scales after the first; `N + 1` terms are summed.
    pub terms: u32,
    pub r: f64,
}

impl Omega0Params {
    pub fn new(m: f64, start: u32, terms: u32, r: f64) -> Result<Self> {
        let p = Self { m, start, terms, r };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m >= 2.0 && self.m.is_finite()) {
            return Err(param(format!("M must be at least 2, got {}", self.m)));
        }
        if self.start < 1 {
            return Err(param("the first scale index must be at least 1"));
        }
        if self.terms < 1 {
            return Err(param("at least one additional scale is required"));
        }
        check_exponent_r(self.r)?;
        if 1.25 * (-(self.start as f64)).exp2() > 2.0 {
            return Err(param("supports do not fit in B(0, 2)"));
        }
        Ok(())
    }

    /// `M⁻² N^{-1/r}`.
    pub fn amplitude(&self) -> f64 {
        self.m.powi(-2) * (self.terms as f64).powf(-1.0 / self.r)
    }

    pub fn scales(&self) -> std::ops::RangeInclusive<u32> {
        self.start..=self.start + self.terms
    }

    pub fn finest(&self) -> u32 {
        self.start + self.terms
    }
}

/// Pointwise value of `ω₀`. At most one scale is non-zero at any point.
pub fn omega0_value(params: &Omega0Params, x1: f64, x2: f64) -> f64 {
    let bump = Bump {
        radius: MAX_BUMP_RADIUS,
    };
    let mut v = 0.0;
    for k in params.scales() {
        v += scaled_quadrupole_value(&bump, k, params.r, x1, x2);
    }
    params.amplitude() * v
}

pub fn omega0(params: &Omega0Params, grid: GridSpec) -> Result<Field2D> {
    params.validate()?;
    check_resolved(&grid, params.finest())?;
    let p = *params;
    Ok(Field2D::from_fn(grid, move |x1, x2| {
        omega0_value(&p, x1, x2)
    }))
}

/// Cells per axis of the local grid used for one scale by
/// [`omega0_w1r_norm`].
pub const LOCAL_CELLS: usize = 256;

/// `‖ω₀‖_{W^{1,r}}` computed scale by scale.
///
/// The terms have disjoint supports, so `‖ω₀‖_r^r = Σ_k ‖c φ_k‖_r^r` and the
/// same holds for each derivative. Each `φ_k` is sampled on its own grid of
/// half width `2^{1-k}`, which keeps the cost independent of how many scales
/// are active.
pub fn omega0_w1r_norm(params: &Omega0Params) -> Result<f64> {
    params.validate()?;
    let r = params.r;
    let c = params.amplitude();
    let mut sums = [0.0; 3];
    for k in params.scales() {
        let grid = GridSpec::new(2.0 * (-(k as f64)).exp2(), LOCAL_CELLS)?;
        let phi = quadrupole(k, r, grid)?;
        let d1 = spectral_derivative(&phi, Axis::X1);
        let d2 = spectral_derivative(&phi, Axis::X2);
        for (s, f) in sums.iter_mut().zip([&phi, &d1, &d2]) {
            *s += (c * lp_norm(f, r)?).powf(r);
        }
    }
    Ok(sums.iter().map(|s| s.powf(1.0 / r)).sum())
}

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::fft::{fft2, ifft2};
use super::grid::GridSpec;
use crate::error::{Error, Result};

/// A real scalar field on a periodic grid.
///
/// Either representation may be the one supplied at construction; the other
/// is computed on first access and cached. The cache is a `OnceLock`, so a
/// field can be shared between threads and is never mutated after it is
/// observed.
#[derive(Debug, Clone)]
pub struct Field2D {
    grid: GridSpec,
    physical: OnceLock<Vec<f64>>,
    spectral: OnceLock<Vec<Complex64>>,
}

/// `(-1)^(m1 + m2)`, the phase that moves the FFT origin to `x = -L`.
#[inline]
fn parity(m1: usize, m2: usize) -> f64 {
    if (m1 + m2) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn physical_to_spectral(grid: &GridSpec, samples: &[f64]) -> Vec<Complex64> {
    let n = grid.n();
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&mut buf, n);
    let norm = 1.0 / grid.len() as f64;
    buf.par_chunks_mut(n).enumerate().for_each(|(m1, row)| {
        for (m2, c) in row.iter_mut().enumerate() {
            *c *= norm * parity(m1, m2);
        }
    });
    buf
}

/// Inverse of [`physical_to_spectral`] for arbitrary (complex) coefficients.
pub(crate) fn spectral_to_complex(grid: &GridSpec, coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = grid.n();
    let mut buf = coeffs.to_vec();
    buf.par_chunks_mut(n).enumerate().for_each(|(m1, row)| {
        for (m2, c) in row.iter_mut().enumerate() {
            *c *= parity(m1, m2);
        }
    });
    ifft2(&mut buf, n);
    buf
}

impl Field2D {
    pub fn zeros(grid: GridSpec) -> Self {
        Self::from_physical_unchecked(grid, vec![0.0; grid.len()])
    }

    /// Field from physical samples in row-major order (`x₁` index major).
    pub fn from_physical(grid: GridSpec, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::Parameter(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("non-finite sample".into()));
        }
        Ok(Self::from_physical_unchecked(grid, samples))
    }

    pub(crate) fn from_physical_unchecked(grid: GridSpec, samples: Vec<f64>) -> Self {
        let physical = OnceLock::new();
        let _ = physical.set(samples);
        Self {
            grid,
            physical,
            spectral: OnceLock::new(),
        }
    }

    /// Samples `f(x₁, x₂)` at the grid nodes.
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        let n = grid.n();
        let coords = grid.coords();
        let mut samples = vec![0.0; grid.len()];
        samples.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            let x1 = coords[i];
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(x1, coords[j]);
            }
        });
        Self::from_physical_unchecked(grid, samples)
    }

    /// Field from Fourier coefficients in FFT order.
    ///
    /// The coefficients are projected onto the Hermitian subspace, so the
    /// result is the real part of the supplied trigonometric polynomial.
    pub fn from_spectral(grid: GridSpec, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Parameter(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        let n = grid.n();
        let orig = coeffs.clone();
        for m1 in 0..n {
            let p1 = (n - m1) % n;
            for m2 in 0..n {
                let p2 = (n - m2) % n;
                coeffs[m1 * n + m2] = 0.5 * (orig[m1 * n + m2] + orig[p1 * n + p2].conj());
            }
        }
        Ok(Self::from_spectral_unchecked(grid, coeffs))
    }

    /// Coefficients already known to be Hermitian.
    pub(crate) fn from_spectral_unchecked(grid: GridSpec, coeffs: Vec<Complex64>) -> Self {
        let spectral = OnceLock::new();
        let _ = spectral.set(coeffs);
        Self {
            grid,
            physical: OnceLock::new(),
            spectral,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn physical(&self) -> &[f64] {
        self.physical.get_or_init(|| {
            let coeffs = self.spectral.get().expect("field has no representation");
            spectral_to_complex(&self.grid, coeffs)
                .into_iter()
                .map(|c| c.re)
                .collect()
        })
    }

    pub fn spectral(&self) -> &[Complex64] {
        self.spectral.get_or_init(|| {
            let samples = self.physical.get().expect("field has no representation");
            physical_to_spectral(&self.grid, samples)
        })
    }

    /// Sample at node `(i, j)`, i.e. at `(x_i, x_j)`.
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.physical()[i * self.grid.n() + j]
    }

    /// Applies `f(ξ₁, ξ₂, m1, m2, c)` to every coefficient. The map must
    /// preserve Hermitian symmetry.
    pub(crate) fn map_spectral<F>(&self, f: F) -> Self
    where
        F: Fn(f64, f64, usize, usize, Complex64) -> Complex64 + Sync,
    {
        let grid = self.grid;
        let n = grid.n();
        let src = self.spectral();
        let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
        out.par_chunks_mut(n).enumerate().for_each(|(m1, row)| {
            let xi1 = grid.xi(m1);
            for (m2, c) in row.iter_mut().enumerate() {
                *c = f(xi1, grid.xi(m2), m1, m2, src[m1 * n + m2]);
            }
        });
        Self::from_spectral_unchecked(grid, out)
    }

    pub fn map_physical<F>(&self, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let samples = self.physical().par_iter().map(|&v| f(v)).collect();
        Self::from_physical_unchecked(self.grid, samples)
    }

    fn zip_physical<F>(&self, other: &Field2D, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Sync,
    {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let samples = self
            .physical()
            .par_iter()
            .zip(other.physical().par_iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_physical_unchecked(self.grid, samples)
    }

    pub fn scale(&self, c: f64) -> Self {
        if let Some(coeffs) = self.spectral.get() {
            if self.physical.get().is_none() {
                return Self::from_spectral_unchecked(
                    self.grid,
                    coeffs.iter().map(|z| z * c).collect(),
                );
            }
        }
        self.map_physical(|v| c * v)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Field2D) -> Self {
        self.zip_physical(other, |a, b| a * b)
    }

    /// Torus average, read from the zero mode.
    pub fn mean(&self) -> f64 {
        self.spectral()[0].re
    }

    pub fn max_abs(&self) -> f64 {
        self.physical().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(Σ |f_j|² h²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.physical().iter().map(|v| v * v).sum();
        (s * self.grid.cell_area()).sqrt()
    }

    /// L² norm from the coefficients, `(area · Σ |c_m|²)^{1/2}`.
    pub fn spectral_l2_norm(&self) -> f64 {
        let s: f64 = self.spectral().iter().map(|c| c.norm_sqr()).sum();
        (s * self.grid.area()).sqrt()
    }

    /// Largest deviation from the reflection symmetry
    /// `f(s₁ x₁, s₂ x₂) = parity · f(x)`, with reflections applied where
    /// `flip_x1` / `flip_x2` is set.
    pub fn symmetry_defect(&self, flip_x1: bool, flip_x2: bool, parity: f64) -> f64 {
        let n = self.grid.n();
        let v = self.physical();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let ri = if flip_x1 { (n - i) % n } else { i };
            for j in 0..n {
                let rj = if flip_x2 { (n - j) % n } else { j };
                worst = worst.max((v[ri * n + rj] - parity * v[i * n + j]).abs());
            }
        }
        worst
    }

    /// Odd in `x₁` and odd in `x₂` separately.
    pub fn odd_odd_defect(&self) -> f64 {
        self.symmetry_defect(true, false, -1.0)
            .max(self.symmetry_defect(false, true, -1.0))
    }

    /// Evaluates the trigonometric interpolant at an arbitrary point.
    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        self.eval_with_derivatives(x1, x2)[0]
    }

    /// Value, gradient and Hessian `[f, f₁, f₂, f₁₁, f₁₂, f₂₂]` of the
    /// trigonometric interpolant. Nyquist modes contribute their cosine part.
    pub fn eval_with_derivatives(&self, x1: f64, x2: f64) -> [f64; 6] {
        let grid = &self.grid;
        let n = grid.n();
        let c = self.spectral();
        let e2: Vec<(Complex64, f64)> = (0..n)
            .map(|m| {
                let xi = grid.xi(m);
                (Complex64::from_polar(1.0, xi * x2), xi)
            })
            .collect();
        let mut out = [0.0; 6];
        for m1 in 0..n {
            let xi1 = grid.xi(m1);
            let e1 = Complex64::from_polar(1.0, xi1 * x1);
            // Σ_m2 c e^{iξ2 x2}, ξ2 c e^{..}, ξ2² c e^{..}
            let mut s0 = Complex64::new(0.0, 0.0);
            let mut s1 = Complex64::new(0.0, 0.0);
            let mut s2 = Complex64::new(0.0, 0.0);
            let row = &c[m1 * n..(m1 + 1) * n];
            for (cm, (e, xi2)) in row.iter().zip(&e2) {
                let t = cm * e;
                s0 += t;
                s1 += t * xi2;
                s2 += t * (xi2 * xi2);
            }
            let i = Complex64::new(0.0, 1.0);
            out[0] += (e1 * s0).re;
            out[1] += (e1 * s0 * i * xi1).re;
            out[2] += (e1 * s1 * i).re;
            out[3] += (e1 * s0 * (-xi1 * xi1)).re;
            out[4] += (e1 * s1 * (-xi1)).re;
            out[5] += (e1 * s2 * -1.0).re;
        }
        out
    }
}

impl Add for &Field2D {
    type Output = Field2D;

    fn add(self, rhs: &Field2D) -> Field2D {
        self.zip_physical(rhs, |a, b| a + b)
    }
}

impl Sub for &Field2D {
    type Output = Field2D;

    fn sub(self, rhs: &Field2D) -> Field2D {
        self.zip_physical(rhs, |a, b| a - b)
    }
}

impl Neg for &Field2D {
    type Output = Field2D;

    fn neg(self) -> Field2D {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Field2D {
    type Output = Field2D;

    fn mul(self, rhs: f64) -> Field2D {
        self.scale(rhs)
    }
}

/// A planar vector field `(u₁, u₂)` on a shared grid.
#[derive(Debug, Clone)]
pub struct Velocity2D {
    pub u1: Field2D,
    pub u2: Field2D,
}

impl Velocity2D {
    pub fn new(u1: Field2D, u2: Field2D) -> Result<Self> {
        if u1.grid() != u2.grid() {
            return Err(Error::Parameter(
                "velocity components on different grids".into(),
            ));
        }
        Ok(Self { u1, u2 })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            u1: Field2D::zeros(grid),
            u2: Field2D::zeros(grid),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.u1.grid()
    }

    /// `max |u|` over the nodes (Euclidean length).
    pub fn max_speed(&self) -> f64 {
        self.u1
            .physical()
            .iter()
            .zip(self.u2.physical())
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    /// `(‖u₁‖₂² + ‖u₂‖₂²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.u1.l2_norm().hypot(self.u2.l2_norm())
    }
}

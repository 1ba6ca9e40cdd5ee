use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use super::field::Field2D;
use super::grid::GridSpec;
use crate::error::{param, Result};

/// A real mean-zero trigonometric polynomial with frequency indices
/// `1 ≤ max(|k₁|, |k₂|) ≤ max_index` and coefficients drawn uniformly from
/// the unit square, damped by `1/(1 + |k|)`. The same seed gives the same
/// field.
pub fn random_band_limited(grid: GridSpec, max_index: usize, seed: u64) -> Result<Field2D> {
    let n = grid.n();
    if max_index == 0 || max_index >= n / 2 {
        return Err(param(format!(
            "max_index must lie in 1..{}, got {max_index}",
            n / 2
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    let k = max_index as i64;
    for k1 in -k..=k {
        for k2 in -k..=k {
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            if k1 == 0 && k2 == 0 {
                continue;
            }
            let damp = 1.0 + ((k1 * k1 + k2 * k2) as f64).sqrt();
            let (s1, s2) = (grid.slot(k1).unwrap(), grid.slot(k2).unwrap());
            coeffs[s1 * n + s2] = Complex64::new(re, im) / damp;
        }
    }
    Field2D::from_spectral(grid, coeffs)
}

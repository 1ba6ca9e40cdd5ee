use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Square periodic grid on `[-L, L)²` with `N` nodes per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    half_width: f64,
    n: usize,
}

impl GridSpec {
    pub fn new(half_width: f64, n: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(param(format!(
                "half width must be positive, got {half_width}"
            )));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(param(format!(
                "resolution must be a power of two >= 16, got {n}"
            )));
        }
        Ok(Self { half_width, n })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Lattice frequency step `π / L`.
    pub fn dxi(&self) -> f64 {
        PI / self.half_width
    }

    /// Largest representable frequency magnitude along an axis.
    pub fn nyquist(&self) -> f64 {
        (self.n / 2) as f64 * self.dxi()
    }

    /// Physical coordinate of node `j`. Nodes are exactly antisymmetric:
    /// `x(N - j) == -x(j)` bit for bit.
    pub fn x(&self, j: usize) -> f64 {
        if j > self.n / 2 && j < self.n {
            -(-self.half_width + (self.n - j) as f64 * self.spacing())
        } else {
            -self.half_width + j as f64 * self.spacing()
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Signed frequency index of FFT slot `m`, in `-N/2 .. N/2`.
    pub fn freq_index(&self, m: usize) -> i64 {
        let n = self.n as i64;
        let m = m as i64;
        if m < n / 2 {
            m
        } else {
            m - n
        }
    }

    /// FFT slot of signed frequency index `k`, if representable.
    pub fn slot(&self, k: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if k < -half || k >= half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.n as i64) as usize)
        }
    }

    /// Angular frequency of FFT slot `m`.
    pub fn xi(&self, m: usize) -> f64 {
        self.freq_index(m) as f64 * self.dxi()
    }

    pub fn is_nyquist(&self, m: usize) -> bool {
        m == self.n / 2
    }

    /// Area of one grid cell.
    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    /// Area of the torus `(2L)²`.
    pub fn area(&self) -> f64 {
        4.0 * self.half_width * self.half_width
    }

    /// Same domain, twice the resolution.
    pub fn refined(&self) -> Self {
        Self {
            half_width: self.half_width,
            n: 2 * self.n,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_frequency_step_on_two_pi_box() {
        let g = GridSpec::new(PI, 16).unwrap();
        assert!((g.spacing() - 2.0 * PI / 16.0).abs() < 1e-15);
        assert!((g.dxi() - 1.0).abs() < 1e-15);
        assert_eq!(g.freq_index(15), -1);
        assert_eq!(g.freq_index(8), -8);
    }

    #[test]
    fn spacing_sixteenth() {
        let g = GridSpec::new(8.0, 256).unwrap();
        assert_eq!(g.spacing(), 1.0 / 16.0);
        assert_eq!(g.spacing() * 256.0, 16.0);
        assert_eq!(g.x(0), -8.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(GridSpec::new(8.0, 100).is_err());
        assert!(GridSpec::new(8.0, 8).is_err());
        assert!(GridSpec::new(0.0, 64).is_err());
        assert!(GridSpec::new(f64::NAN, 64).is_err());
    }

    #[test]
    fn slots_round_trip() {
        let g = GridSpec::new(1.0, 32).unwrap();
        for m in 0..32 {
            assert_eq!(g.slot(g.freq_index(m)), Some(m));
        }
        assert_eq!(g.slot(16), None);
    }
}

use serde::Serialize;

use crate::error::{param, Result};

/// A bounded profile of one variable with its derivative.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Constant(f64),
    /// `amplitude · exp(1 - 1/(1 - ((x - center)/width)²))` inside the
    /// support, zero outside.
    Bump {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    Tabulated(TabulatedProfile),
}

impl Profile {
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Bump {
                amplitude,
                center,
                width,
            } => {
                let t = (x - center) / width;
                if t.abs() >= 1.0 {
                    0.0
                } else {
                    amplitude * (1.0 - 1.0 / (1.0 - t * t)).exp()
                }
            }
            Profile::Tabulated(s) => s.value(x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Profile::Constant(_) => 0.0,
            Profile::Bump {
                amplitude,
                center,
                width,
            } => {
                let t = (x - center) / width;
                if t.abs() >= 1.0 {
                    0.0
                } else {
                    let q = 1.0 - t * t;
                    amplitude * (1.0 - 1.0 / q).exp() * (-2.0 * t / (q * q)) / width
                }
            }
            Profile::Tabulated(s) => s.derivative(x),
        }
    }

    /// `sup |p|` over `[-extent, extent]` (exact for the closed forms).
    pub fn sup_abs(&self, extent: f64) -> f64 {
        match self {
            Profile::Constant(c) => c.abs(),
            Profile::Bump { amplitude, .. } => amplitude.abs(),
            Profile::Tabulated(s) => {
                let n = 20_000;
                (0..=n)
                    .map(|i| s.value(-extent + 2.0 * extent * i as f64 / n as f64).abs())
                    .fold(0.0, f64::max)
            }
        }
    }
}

/// Natural cubic spline through uniformly spaced samples, constant outside
/// the sample range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TabulatedProfile {
    lo: f64,
    step: f64,
    values: Vec<f64>,
    /// Second derivatives at the knots.
    moments: Vec<f64>,
}

impl TabulatedProfile {
    pub fn new(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 3 || !(hi > lo) {
            return Err(param(
                "a tabulated profile needs at least 3 samples on a non-empty interval",
            ));
        }
        let step = (hi - lo) / (n - 1) as f64;
        // Tridiagonal solve for the interior moments (Thomas algorithm).
        let mut moments = vec![0.0; n];
        let m = n - 2;
        let mut c = vec![0.0; m];
        let mut d = vec![0.0; m];
        for i in 0..m {
            let rhs = 6.0 * (values[i] - 2.0 * values[i + 1] + values[i + 2]) / (step * step);
            let (lower, upper) = (
                if i > 0 { 1.0 } else { 0.0 },
                if i + 1 < m { 1.0 } else { 0.0 },
            );
            let denom = 4.0 - lower * if i > 0 { c[i - 1] } else { 0.0 };
            c[i] = upper / denom;
            d[i] = (rhs - lower * if i > 0 { d[i - 1] } else { 0.0 }) / denom;
        }
        for i in (0..m).rev() {
            moments[i + 1] = d[i]
                - if i + 1 < m {
                    c[i] * moments[i + 2]
                } else {
                    0.0
                };
        }
        Ok(Self {
            lo,
            step,
            values,
            moments,
        })
    }

    fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let n = self.values.len();
        let s = (x - self.lo) / self.step;
        if s < 0.0 || s > (n - 1) as f64 {
            return None;
        }
        let i = (s.floor() as usize).min(n - 2);
        Some((i, s - i as f64))
    }

    pub fn value(&self, x: f64) -> f64 {
        let Some((i, u)) = self.locate(x) else {
            return if x < self.lo {
                self.values[0]
            } else {
                *self.values.last().unwrap()
            };
        };
        let h2 = self.step * self.step;
        let (m0, m1) = (self.moments[i], self.moments[i + 1]);
        let v = 1.0 - u;
        v * self.values[i]
            + u * self.values[i + 1]
            + h2 / 6.0 * ((v * v * v - v) * m0 + (u * u * u - u) * m1)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let Some((i, u)) = self.locate(x) else {
            return 0.0;
        };
        let h = self.step;
        let (m0, m1) = (self.moments[i], self.moments[i + 1]);
        let v = 1.0 - u;
        (self.values[i + 1] - self.values[i]) / h
            + h / 6.0 * (-(3.0 * v * v - 1.0) * m0 + (3.0 * u * u - 1.0) * m1)
    }
}

/// `h` with `h'(x) = |x|^σ` on `[-2a, 2a]`. On `[2a, 2a + 1]` the derivative
/// falls linearly to zero, and `h` is constant beyond; `h` is odd.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HProfile {
    sigma: f64,
    a: f64,
}

pub fn build_h(sigma: f64, a: f64) -> Result<HProfile> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(param(format!("sigma must lie in (0, 1), got {sigma}")));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(param(format!("a must be positive, got {a}")));
    }
    Ok(HProfile { sigma, a })
}

impl HProfile {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    fn edge(&self) -> f64 {
        2.0 * self.a
    }

    pub fn value(&self, x: f64) -> f64 {
        let y = x.abs();
        let e = self.edge();
        let inner = |y: f64| y.powf(1.0 + self.sigma) / (1.0 + self.sigma);
        let v = if y <= e {
            inner(y)
        } else {
            let s = (y - e).min(1.0);
            inner(e) + e.powf(self.sigma) * (s - 0.5 * s * s)
        };
        v.copysign(x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let y = x.abs();
        let e = self.edge();
        if y <= e {
            y.powf(self.sigma)
        } else {
            e.powf(self.sigma) * (1.0 - (y - e).min(1.0))
        }
    }

    /// `sup |h|`.
    pub fn sup_abs(&self) -> f64 {
        self.value(self.edge() + 1.0)
    }
}

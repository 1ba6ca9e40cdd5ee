use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{param, Result};
use crate::initdata::{Bump, Omega0Params, MAX_BUMP_RADIUS};
use crate::spectral::{fft2, ifft2, spectral_derivative, Axis, Field2D, GridSpec, Velocity2D};

/// Velocity `u` and its gradient `Du[i][j] = ∂_j u_i` at a point.
pub type Sample = ([f64; 2], [[f64; 2]; 2]);

/// A time-dependent planar velocity field that can be queried along
/// trajectories.
pub trait VelocitySampler: Sync {
    /// Closed interval of admissible query times.
    fn time_span(&self) -> (f64, f64);

    fn sample(&self, t: f64, x: [f64; 2]) -> Sample;

    /// Trajectories must satisfy `max(|x₁|, |x₂|) ≤` this bound.
    fn safe_half_width(&self) -> f64 {
        f64::INFINITY
    }

    /// Largest admissible integration step.
    fn max_step(&self) -> f64 {
        f64::INFINITY
    }
}

/// Velocity given in closed form together with its gradient.
pub struct FnSampler<F> {
    f: F,
    span: (f64, f64),
}

impl<F> FnSampler<F>
where
    F: Fn(f64, [f64; 2]) -> Sample + Sync,
{
    pub fn new(span: (f64, f64), f: F) -> Self {
        Self { f, span }
    }
}

impl<F> VelocitySampler for FnSampler<F>
where
    F: Fn(f64, [f64; 2]) -> Sample + Sync,
{
    fn time_span(&self) -> (f64, f64) {
        self.span
    }

    fn sample(&self, t: f64, x: [f64; 2]) -> Sample {
        (self.f)(t, x)
    }
}

/// Periodic cubic B-spline interpolant of one grid field.
#[derive(Debug, Clone)]
struct Spline {
    n: usize,
    lo: f64,
    inv_h: f64,
    coef: Vec<f64>,
}

/// B-spline weights and first-derivative weights for nodes `i-1..=i+2`.
#[inline]
fn weights(f: f64, inv_h: f64) -> ([f64; 4], [f64; 4]) {
    let g = 1.0 - f;
    let w = [
        g * g * g / 6.0,
        (3.0 * f * f * f - 6.0 * f * f + 4.0) / 6.0,
        (-3.0 * f * f * f + 3.0 * f * f + 3.0 * f + 1.0) / 6.0,
        f * f * f / 6.0,
    ];
    let d = [
        -0.5 * g * g * inv_h,
        (1.5 * f * f - 2.0 * f) * inv_h,
        (-1.5 * f * f + f + 0.5) * inv_h,
        0.5 * f * f * inv_h,
    ];
    (w, d)
}

impl Spline {
    fn new(f: &Field2D) -> Self {
        let grid = *f.grid();
        let n = grid.n();
        let mut buf: Vec<Complex64> = f
            .physical()
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        fft2(&mut buf, n);
        let sym: Vec<f64> = (0..n)
            .map(|m| (4.0 + 2.0 * (2.0 * PI * m as f64 / n as f64).cos()) / 6.0)
            .collect();
        let scale = 1.0 / (n * n) as f64;
        for m1 in 0..n {
            for m2 in 0..n {
                buf[m1 * n + m2] *= scale / (sym[m1] * sym[m2]);
            }
        }
        ifft2(&mut buf, n);
        Self {
            n,
            lo: -grid.half_width(),
            inv_h: 1.0 / grid.spacing(),
            coef: buf.iter().map(|c| c.re).collect(),
        }
    }

    /// Value and gradient.
    fn eval(&self, x: [f64; 2]) -> [f64; 3] {
        let n = self.n as i64;
        let s1 = (x[0] - self.lo) * self.inv_h;
        let s2 = (x[1] - self.lo) * self.inv_h;
        let (i1, i2) = (s1.floor(), s2.floor());
        let (w1, d1) = weights(s1 - i1, self.inv_h);
        let (w2, d2) = weights(s2 - i2, self.inv_h);
        let (i1, i2) = (i1 as i64, i2 as i64);
        let mut out = [0.0; 3];
        for a in 0..4 {
            let row = (i1 + a as i64 - 1).rem_euclid(n) as usize * self.n;
            let mut v = 0.0;
            let mut dv = 0.0;
            for b in 0..4 {
                let c = self.coef[row + (i2 + b as i64 - 1).rem_euclid(n) as usize];
                v += w2[b] * c;
                dv += d2[b] * c;
            }
            out[0] += w1[a] * v;
            out[1] += d1[a] * v;
            out[2] += w1[a] * dv;
        }
        out
    }
}

/// One velocity snapshot: splines of `u₁, u₂, ∂₁u₁, ∂₂u₁, ∂₁u₂`.
/// `∂₂u₂` is taken as `-∂₁u₁`, so the interpolated gradient is trace-free.
#[derive(Debug, Clone)]
struct Frame {
    splines: [Spline; 5],
}

impl Frame {
    fn new(u: &Velocity2D) -> Self {
        let d11 = spectral_derivative(&u.u1, Axis::X1);
        let d12 = spectral_derivative(&u.u1, Axis::X2);
        let d21 = spectral_derivative(&u.u2, Axis::X1);
        Self {
            splines: [
                Spline::new(&u.u1),
                Spline::new(&u.u2),
                Spline::new(&d11),
                Spline::new(&d12),
                Spline::new(&d21),
            ],
        }
    }

    fn sample(&self, x: [f64; 2]) -> [f64; 5] {
        let mut out = [0.0; 5];
        for (o, s) in out.iter_mut().zip(&self.splines) {
            *o = s.eval(x)[0];
        }
        out
    }
}

/// Velocity snapshots, bicubic in space and linear in time. Gradients come
/// from spectral differentiation of each snapshot.
#[derive(Debug, Clone)]
pub struct SnapshotSampler {
    grid: GridSpec,
    times: Vec<f64>,
    frames: Vec<Frame>,
    margin_cells: f64,
}

/// Trajectories must stay this many cells away from the periodic seam.
pub const SEAM_MARGIN_CELLS: f64 = 4.0;

impl SnapshotSampler {
    /// `times` must be strictly increasing and match `velocities`.
    pub fn new(times: Vec<f64>, velocities: &[Velocity2D]) -> Result<Self> {
        if times.is_empty() || times.len() != velocities.len() {
            return Err(param(
                "need one velocity snapshot per time, and at least one",
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(param("snapshot times must be strictly increasing"));
        }
        let grid = *velocities[0].grid();
        if velocities.iter().any(|v| *v.grid() != grid) {
            return Err(param("snapshots live on different grids"));
        }
        let frames = velocities.iter().map(Frame::new).collect();
        Ok(Self {
            grid,
            times,
            frames,
            margin_cells: SEAM_MARGIN_CELLS,
        })
    }

    /// Snapshots of a stored Euler trajectory.
    pub fn from_states(states: &[crate::euler2d::EulerState]) -> Result<Self> {
        let times = states.iter().map(|s| s.time()).collect();
        let vel: Vec<Velocity2D> = states.iter().map(|s| s.velocity().clone()).collect();
        Self::new(times, &vel)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
}

impl VelocitySampler for SnapshotSampler {
    fn time_span(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }

    fn sample(&self, t: f64, x: [f64; 2]) -> Sample {
        let k = self
            .times
            .partition_point(|&s| s <= t)
            .clamp(1, self.times.len())
            - 1;
        let v = if k + 1 < self.times.len() {
            let th = ((t - self.times[k]) / (self.times[k + 1] - self.times[k])).clamp(0.0, 1.0);
            let (a, b) = (self.frames[k].sample(x), self.frames[k + 1].sample(x));
            let mut v = [0.0; 5];
            for i in 0..5 {
                v[i] = (1.0 - th) * a[i] + th * b[i];
            }
            v
        } else {
            self.frames[k].sample(x)
        };
        ([v[0], v[1]], [[v[2], v[3]], [v[4], -v[2]]])
    }

    fn safe_half_width(&self) -> f64 {
        self.grid.half_width() - self.margin_cells * self.grid.spacing()
    }

    fn max_step(&self) -> f64 {
        self.times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

/// A radially symmetric vortex: vorticity `amplitude·φ(|x - center|)` with
/// `φ` the standard bump of the given radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexBlob {
    pub center: [f64; 2],
    pub radius: f64,
    pub amplitude: f64,
}

const TABLE_LEN: usize = 4096;

/// Exact planar velocity of a sum of radial vortex blobs, frozen in time.
///
/// A radial vorticity `w(ρ)` induces `u = G(ρ)/ρ² · (-z₂, z₁)` with
/// `G(ρ) = ∫₀^ρ w(s) s ds`; `G` of the unit bump is tabulated once and
/// interpolated with cubic Hermite polynomials.
#[derive(Debug, Clone)]
pub struct ExactVortexSampler {
    blobs: Vec<VortexBlob>,
    span: (f64, f64),
    unit: Bump,
    table: Vec<f64>,
}

impl ExactVortexSampler {
    pub fn new(blobs: Vec<VortexBlob>, span: (f64, f64)) -> Result<Self> {
        if blobs.iter().any(|b| !(b.radius > 0.0)) {
            return Err(param("vortex radii must be positive"));
        }
        let unit = crate::initdata::base_bump(MAX_BUMP_RADIUS)?;
        // Integrate on the radius-1/4 profile and rescale to radius 1.
        let h = 1.0 / (TABLE_LEN - 1) as f64;
        let integrand = |t: f64| unit.profile(t * MAX_BUMP_RADIUS) * t;
        let mut table = vec![0.0; TABLE_LEN];
        for i in 1..TABLE_LEN {
            let (a, b) = ((i - 1) as f64 * h, i as f64 * h);
            let m = 0.5 * (a + b);
            table[i] = table[i - 1] + h / 6.0 * (integrand(a) + 4.0 * integrand(m) + integrand(b));
        }
        Ok(Self {
            blobs,
            span,
            unit,
            table,
        })
    }

    /// The blobs making up `ω₀`: four signed bumps per scale at `2^{-k}(±1, ±1)`.
    pub fn omega0(params: &Omega0Params, span: (f64, f64)) -> Result<Self> {
        params.validate()?;
        let mut blobs = Vec::new();
        for k in params.scales() {
            let s = (-(k as f64)).exp2();
            let amp = params.amplitude() * ((-1.0 + 2.0 / params.r) * k as f64).exp2();
            for (e1, e2) in [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)] {
                blobs.push(VortexBlob {
                    center: [e1 * s, e2 * s],
                    radius: MAX_BUMP_RADIUS * s,
                    amplitude: e1 * e2 * amp,
                });
            }
        }
        Self::new(blobs, span)
    }

    pub fn blobs(&self) -> &[VortexBlob] {
        &self.blobs
    }

    /// `∫₀^t φ(s) s ds` for the unit-radius bump, `t ≥ 0`.
    fn unit_moment(&self, t: f64) -> f64 {
        let last = TABLE_LEN - 1;
        if t >= 1.0 {
            return self.table[last];
        }
        let h = 1.0 / last as f64;
        let pos = t / h;
        let i = (pos.floor() as usize).min(last - 1);
        let u = pos - i as f64;
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        let da = self.unit.profile(a * MAX_BUMP_RADIUS) * a * h;
        let db = self.unit.profile(b * MAX_BUMP_RADIUS) * b * h;
        let (y0, y1) = (self.table[i], self.table[i + 1]);
        let u2 = u * u;
        let u3 = u2 * u;
        (2.0 * u3 - 3.0 * u2 + 1.0) * y0
            + (u3 - 2.0 * u2 + u) * da
            + (-2.0 * u3 + 3.0 * u2) * y1
            + (u3 - u2) * db
    }

    fn blob_sample(&self, b: &VortexBlob, x: [f64; 2], acc: &mut Sample) {
        let z = [x[0] - b.center[0], x[1] - b.center[1]];
        let rho2 = z[0] * z[0] + z[1] * z[1];
        let s2 = b.radius * b.radius;
        let rho = rho2.sqrt();
        let t = rho / b.radius;
        // F = G/ρ² and F'/ρ, where G(ρ) = A s² g(ρ/s).
        let (f, fp_over_rho) = if t < 1e-4 {
            // g(t) = t²/2 + O(t⁴) since φ(0) = 1, φ'(0) = 0.
            (0.5 * b.amplitude, 0.0)
        } else {
            let g = b.amplitude * s2 * self.unit_moment(t);
            let w = if t < 1.0 {
                b.amplitude * self.unit.profile(t * MAX_BUMP_RADIUS)
            } else {
                0.0
            };
            let f = g / rho2;
            (f, (w / rho - 2.0 * g / (rho2 * rho)) / rho)
        };
        let jz = [-z[1], z[0]];
        acc.0[0] += f * jz[0];
        acc.0[1] += f * jz[1];
        // Du = F·J + (Jz) ⊗ ∇F, J = [[0,-1],[1,0]], ∇F = (F'/ρ) z.
        acc.1[0][0] += jz[0] * fp_over_rho * z[0];
        acc.1[0][1] += -f + jz[0] * fp_over_rho * z[1];
        acc.1[1][0] += f + jz[1] * fp_over_rho * z[0];
        acc.1[1][1] += jz[1] * fp_over_rho * z[1];
    }
}

impl VelocitySampler for ExactVortexSampler {
    fn time_span(&self) -> (f64, f64) {
        self.span
    }

    fn sample(&self, _t: f64, x: [f64; 2]) -> Sample {
        let mut acc = ([0.0; 2], [[0.0; 2]; 2]);
        for b in &self.blobs {
            self.blob_sample(b, x, &mut acc);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::biot_savart;

    #[test]
    fn spline_reproduces_nodes_and_smooth_fields() {
        let g = GridSpec::new(PI, 64).unwrap();
        let f = Field2D::from_fn(g, |x, y| (x).sin() * (2.0 * y).cos());
        let s = Spline::new(&f);
        let x = g.coords();
        assert!((s.eval([x[5], x[9]])[0] - f.at(5, 9)).abs() < 1e-12);
        let p = [0.3137, -1.234];
        let v = s.eval(p);
        assert!((v[0] - p[0].sin() * (2.0 * p[1]).cos()).abs() < 1e-5);
        assert!((v[1] - p[0].cos() * (2.0 * p[1]).cos()).abs() < 1e-3);
        assert!((v[2] + 2.0 * p[0].sin() * (2.0 * p[1]).sin()).abs() < 1e-3);
    }

    #[test]
    fn snapshot_gradient_is_trace_free() {
        let g = GridSpec::new(PI, 32).unwrap();
        let w = Field2D::from_fn(g, |x, y| x.sin() * y.sin() + (2.0 * x).cos() * y.sin());
        let u = biot_savart(&w).unwrap();
        let s = SnapshotSampler::new(vec![0.0, 1.0], &[u.clone(), u]).unwrap();
        let (_, du) = s.sample(0.5, [0.1, 0.7]);
        assert_eq!(du[0][0] + du[1][1], 0.0);
        assert!(s.safe_half_width() < PI);
    }

    #[test]
    fn exact_vortex_matches_circulation() {
        let blob = VortexBlob {
            center: [0.0, 0.0],
            radius: 0.5,
            amplitude: 2.0,
        };
        let s = ExactVortexSampler::new(vec![blob], (0.0, 1.0)).unwrap();
        // Outside the core, u_θ = Γ / (2πρ) with Γ the total circulation.
        let gamma = 2.0 * PI * 2.0 * 0.25 * s.table[TABLE_LEN - 1];
        let (u, du) = s.sample(0.0, [1.0, 0.0]);
        assert!(u[0].abs() < 1e-15);
        assert!((u[1] - gamma / (2.0 * PI)).abs() < 1e-12);
        assert!((du[0][0] + du[1][1]).abs() < 1e-14);
        // Solid-body rotation at the centre.
        let (_, du0) = s.sample(0.0, [0.0, 0.0]);
        assert!((du0[1][0] - 1.0).abs() < 1e-12 && (du0[0][1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_vortex_gradient_matches_differences() {
        let params = Omega0Params::new(2.0, 1, 2, 2.5).unwrap();
        let s = ExactVortexSampler::omega0(&params, (0.0, 1.0)).unwrap();
        let x = [0.41, 0.37];
        let h = 1e-6;
        let (_, du) = s.sample(0.0, x);
        for j in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let (up, _) = s.sample(0.0, xp);
            let (um, _) = s.sample(0.0, xm);
            for i in 0..2 {
                let fd = (up[i] - um[i]) / (2.0 * h);
                assert!(
                    (fd - du[i][j]).abs() < 1e-6 * (1.0 + du[i][j].abs()),
                    "{i}{j}: {fd} vs {}",
                    du[i][j]
                );
            }
        }
    }
}

//! Particle trajectories `dη/dt = u(t, η)` with their Jacobians `Dη`.
//!
//! Positions and Jacobians are integrated together with RK4; the Jacobian
//! follows the variational equation `d(Dη)/dt = Du(t, η)·Dη`. Seeds are
//! independent and are advanced in parallel.

mod sampler;

pub use sampler::{
    ExactVortexSampler, FnSampler, Sample, SnapshotSampler, VelocitySampler, VortexBlob,
    SEAM_MARGIN_CELLS,
};

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

pub type Point = [f64; 2];
pub type Matrix = [[f64; 2]; 2];

pub const IDENTITY: Matrix = [[1.0, 0.0], [0.0, 1.0]];

pub const FLOW_CSV_HEADER: &str = "t,seed,eta1,eta2,j11,j12,j21,j22";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvectConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Steps between stored states.
    pub cadence: usize,
}

/// Positions and Jacobians of all seeds at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub positions: Vec<Point>,
    pub jacobians: Vec<Matrix>,
}

/// Seeds with their states at the stored times (the first at the start time).
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory {
    pub seeds: Vec<Point>,
    pub states: Vec<FlowState>,
}

pub fn det(m: &Matrix) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

type Phase = [f64; 6];

fn pack(x: Point, m: &Matrix) -> Phase {
    [x[0], x[1], m[0][0], m[0][1], m[1][0], m[1][1]]
}

fn unpack(y: &Phase) -> (Point, Matrix) {
    ([y[0], y[1]], [[y[2], y[3]], [y[4], y[5]]])
}

fn rate<S: VelocitySampler + ?Sized>(s: &S, t: f64, y: &Phase) -> Phase {
    let (x, m) = unpack(y);
    let (u, du) = s.sample(t, x);
    pack(u, &matmul(&du, &m))
}

fn rk4<S: VelocitySampler + ?Sized>(s: &S, t: f64, dt: f64, y: &Phase) -> Phase {
    let add = |a: &Phase, c: f64, b: &Phase| {
        let mut r = *a;
        for i in 0..6 {
            r[i] += c * b[i];
        }
        r
    };
    let k1 = rate(s, t, y);
    let k2 = rate(s, t + 0.5 * dt, &add(y, 0.5 * dt, &k1));
    let k3 = rate(s, t + 0.5 * dt, &add(y, 0.5 * dt, &k2));
    let k4 = rate(s, t + dt, &add(y, dt, &k3));
    let mut r = *y;
    for i in 0..6 {
        r[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    r
}

/// Integrates every seed from the start of the sampler's time span to
/// `cfg.t_end`, storing states every `cfg.cadence` steps and at the end.
pub fn advect<S: VelocitySampler + ?Sized>(
    sampler: &S,
    seeds: &[Point],
    cfg: &AdvectConfig,
) -> Result<FlowTrajectory> {
    let (t0, t1) = sampler.time_span();
    if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
        return Err(param(format!("dt must be positive, got {}", cfg.dt)));
    }
    if cfg.cadence == 0 {
        return Err(param("output cadence must be at least 1"));
    }
    if cfg.t_end < t0 || cfg.t_end > t1 + 1e-12 {
        return Err(param(format!(
            "end time {} outside the velocity span [{t0}, {t1}]",
            cfg.t_end
        )));
    }
    if cfg.dt > sampler.max_step() * (1.0 + 1e-12) {
        return Err(param(format!(
            "dt = {} exceeds the snapshot spacing {}",
            cfg.dt,
            sampler.max_step()
        )));
    }
    let bound = sampler.safe_half_width();
    let inside = |x: &Point| x[0].abs() <= bound && x[1].abs() <= bound;
    if let Some(i) = seeds.iter().position(|x| !inside(x)) {
        return Err(Error::DomainExit { seed: i, t: t0 });
    }
    let steps = ((cfg.t_end - t0) / cfg.dt - 1e-9).ceil().max(0.0) as usize;
    let stored: Vec<usize> = (0..=steps)
        .filter(|&s| s % cfg.cadence == 0 || s == steps)
        .collect();

    let paths: Vec<Vec<(f64, Phase)>> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut y = pack(x, &IDENTITY);
            let mut t = t0;
            let mut out = vec![(t, y)];
            for s in 1..=steps {
                let h = if s == steps { cfg.t_end - t } else { cfg.dt };
                y = rk4(sampler, t, h, &y);
                t = if s == steps {
                    cfg.t_end
                } else {
                    t0 + s as f64 * cfg.dt
                };
                if y.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Divergence { t });
                }
                if !inside(&[y[0], y[1]]) {
                    return Err(Error::DomainExit { seed: i, t });
                }
                if s % cfg.cadence == 0 || s == steps {
                    out.push((t, y));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let states = (0..stored.len())
        .map(|k| {
            let t = paths
                .first()
                .map_or(t0 + stored[k] as f64 * cfg.dt, |p| p[k].0);
            let (positions, jacobians) = paths.iter().map(|p| unpack(&p[k].1)).unzip();
            FlowState {
                t,
                positions,
                jacobians,
            }
        })
        .collect();
    Ok(FlowTrajectory {
        seeds: seeds.to_vec(),
        states,
    })
}

/// Largest Jacobian entry along a flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobianMax {
    pub value: f64,
    pub seed: usize,
    /// Lagrangian label of the maximiser.
    pub point: Point,
    pub time: f64,
    /// `(i, j)` of `∂η_i/∂x_j`.
    pub entry: (usize, usize),
}

pub fn max_jacobian(flow: &FlowTrajectory) -> Result<JacobianMax> {
    let mut best: Option<JacobianMax> = None;
    for st in &flow.states {
        for (s, m) in st.jacobians.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    let v = m[i][j].abs();
                    if best.is_none_or(|b| v > b.value) {
                        best = Some(JacobianMax {
                            value: v,
                            seed: s,
                            point: flow.seeds[s],
                            time: st.t,
                            entry: (i, j),
                        });
                    }
                }
            }
        }
    }
    best.ok_or_else(|| param("empty flow"))
}

/// `sup_t (max_seeds |η_a - η_b| + max_seeds max_entries |Dη_a - Dη_b|)`.
pub fn flow_distance(a: &FlowTrajectory, b: &FlowTrajectory) -> Result<f64> {
    if a.seeds != b.seeds {
        return Err(param("flows have different seeds"));
    }
    if a.states.len() != b.states.len()
        || a.states
            .iter()
            .zip(&b.states)
            .any(|(x, y)| (x.t - y.t).abs() > 1e-12 * (1.0 + x.t.abs()))
    {
        return Err(param("flows are stored at different times"));
    }
    let mut sup: f64 = 0.0;
    for (x, y) in a.states.iter().zip(&b.states) {
        let mut d0: f64 = 0.0;
        let mut d1: f64 = 0.0;
        for s in 0..a.seeds.len() {
            let (p, q) = (x.positions[s], y.positions[s]);
            d0 = d0.max((p[0] - q[0]).hypot(p[1] - q[1]));
            for i in 0..2 {
                for j in 0..2 {
                    d1 = d1.max((x.jacobians[s][i][j] - y.jacobians[s][i][j]).abs());
                }
            }
        }
        sup = sup.max(d0 + d1);
    }
    Ok(sup)
}

/// Largest `|det Dη - 1|` over all seeds and stored times.
pub fn volume_defect(flow: &FlowTrajectory) -> f64 {
    flow.states
        .iter()
        .flat_map(|s| s.jacobians.iter())
        .fold(0.0, |m, j| m.max((det(j) - 1.0).abs()))
}

/// Standard seed set: a 64×64 cell-centred grid on `[-extent, extent]²`,
/// 16 seeds on each half axis, and the origin.
pub fn standard_seeds(extent: f64) -> Vec<Point> {
    const SIDE: usize = 64;
    const AXIS: usize = 16;
    let mut seeds = Vec::with_capacity(SIDE * SIDE + 4 * AXIS + 1);
    let h = 2.0 * extent / SIDE as f64;
    for i in 0..SIDE {
        for j in 0..SIDE {
            seeds.push([
                -extent + (i as f64 + 0.5) * h,
                -extent + (j as f64 + 0.5) * h,
            ]);
        }
    }
    for k in 1..=AXIS {
        let a = extent * k as f64 / AXIS as f64;
        seeds.extend([[a, 0.0], [-a, 0.0], [0.0, a], [0.0, -a]]);
    }
    seeds.push([0.0, 0.0]);
    seeds
}

pub fn flow_csv(flow: &FlowTrajectory) -> String {
    let mut s = String::from(FLOW_CSV_HEADER);
    s.push('\n');
    for st in &flow.states {
        for (i, (p, m)) in st.positions.iter().zip(&st.jacobians).enumerate() {
            let _ = writeln!(
                s,
                "{:.12e},{i},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                st.t, p[0], p[1], m[0][0], m[0][1], m[1][0], m[1][1]
            );
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero() -> FnSampler<impl Fn(f64, Point) -> Sample + Sync> {
        FnSampler::new((0.0, 1.0), |_, _| ([0.0; 2], [[0.0; 2]; 2]))
    }

    #[test]
    fn zero_velocity_is_identity() {
        let f = advect(
            &zero(),
            &[[0.3, -0.2]],
            &AdvectConfig {
                dt: 0.1,
                t_end: 1.0,
                cadence: 5,
            },
        )
        .unwrap();
        assert_eq!(f.states.len(), 3);
        let last = f.states.last().unwrap();
        assert_eq!(last.positions[0], [0.3, -0.2]);
        assert_eq!(last.jacobians[0], IDENTITY);
        assert_eq!(max_jacobian(&f).unwrap().value, 1.0);
    }

    #[test]
    fn distance_is_symmetric_and_checks_layout() {
        let s = FnSampler::new((0.0, 1.0), |_, x: Point| {
            ([-x[1], x[0]], [[0.0, -1.0], [1.0, 0.0]])
        });
        let cfg = AdvectConfig {
            dt: 0.05,
            t_end: 1.0,
            cadence: 4,
        };
        let a = advect(&s, &[[1.0, 0.0]], &cfg).unwrap();
        let b = advect(&zero(), &[[1.0, 0.0]], &cfg).unwrap();
        assert_eq!(flow_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(
            flow_distance(&a, &b).unwrap(),
            flow_distance(&b, &a).unwrap()
        );
        let c = advect(&zero(), &[[0.5, 0.0]], &cfg).unwrap();
        assert!(flow_distance(&a, &c).is_err());
    }

    #[test]
    fn exit_is_reported() {
        let s = FnSampler::new((0.0, 1.0), |_, _| ([1.0, 0.0], [[0.0; 2]; 2]));
        struct Boxed<S>(S);
        impl<S: VelocitySampler> VelocitySampler for Boxed<S> {
            fn time_span(&self) -> (f64, f64) {
                self.0.time_span()
            }
            fn sample(&self, t: f64, x: Point) -> Sample {
                self.0.sample(t, x)
            }
            fn safe_half_width(&self) -> f64 {
                0.5
            }
        }
        let r = advect(
            &Boxed(s),
            &[[0.0, 0.0], [0.2, 0.0]],
            &AdvectConfig {
                dt: 0.1,
                t_end: 1.0,
                cadence: 1,
            },
        );
        assert!(matches!(r, Err(Error::DomainExit { .. })));
    }

    #[test]
    fn seed_set_layout() {
        let s = standard_seeds(1.0);
        assert_eq!(s.len(), 64 * 64 + 64 + 1);
        assert_eq!(*s.last().unwrap(), [0.0, 0.0]);
    }
}

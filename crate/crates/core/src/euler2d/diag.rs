use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::EulerState;
use crate::error::{Error, Result};
use crate::funcspace::w1r_norm;
use crate::spectral::{spectral_derivative, sup_norm_refined, write_field, Axis, Field2D};

/// Relative odd-odd defect tolerated at every diagnostic row when the
/// initial data is odd in both variables.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

pub const DIAGNOSTIC_CSV_HEADER: &str =
    "t,energy,enstrophy,omega_sup,omega_w1r,u_c1,mean,symmetry_defect";

/// What [`super::solve`] records at each output time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticSpec {
    /// Exponent of the `W^{1,r}` column.
    pub r: f64,
    /// Use the interpolant maximum for `‖ω‖_∞` instead of the node maximum.
    pub refined_sup: bool,
    /// Assert odd-odd symmetry when the initial data has it.
    pub check_symmetry: bool,
    /// Keep the states themselves, not only their diagnostics.
    pub keep_states: bool,
}

impl Default for DiagnosticSpec {
    fn default() -> Self {
        Self {
            r: 2.5,
            refined_sup: false,
            check_symmetry: true,
            keep_states: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub t: f64,
    pub energy: f64,
    pub enstrophy: f64,
    pub omega_sup: f64,
    pub omega_w1r: f64,
    /// `max|u| + max_{i,j} |∂_j u_i|` over the nodes.
    pub u_c1: f64,
    pub mean: f64,
    /// Relative odd-odd defect, 0 when symmetry is not tracked.
    pub symmetry_defect: f64,
}

/// Output of [`super::solve`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    spec: DiagnosticSpec,
    odd_odd: bool,
    states: Vec<EulerState>,
    rows: Vec<DiagnosticRow>,
}

fn u_c1(state: &EulerState) -> f64 {
    let u = state.velocity();
    let mut grad: f64 = 0.0;
    for c in [&u.u1, &u.u2] {
        for axis in [Axis::X1, Axis::X2] {
            grad = grad.max(spectral_derivative(c, axis).max_abs());
        }
    }
    u.max_speed() + grad
}

impl Trajectory {
    pub(super) fn new(spec: DiagnosticSpec, odd_odd: bool) -> Self {
        Self {
            spec,
            odd_odd,
            states: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub(super) fn record(&mut self, state: &EulerState) -> Result<()> {
        let w = state.omega();
        let sup = if self.spec.refined_sup {
            sup_norm_refined(w)
        } else {
            w.max_abs()
        };
        let symmetry_defect = if self.odd_odd {
            let d = w.odd_odd_defect() / w.max_abs().max(f64::MIN_POSITIVE);
            if d > SYMMETRY_TOLERANCE {
                return Err(Error::Precondition(format!(
                    "odd-odd symmetry lost at t = {}: relative defect {d:.3e}",
                    state.time()
                )));
            }
            d
        } else {
            0.0
        };
        self.rows.push(DiagnosticRow {
            t: state.time(),
            energy: state.energy(),
            enstrophy: state.enstrophy(),
            omega_sup: sup,
            omega_w1r: w1r_norm(w, self.spec.r)?,
            u_c1: u_c1(state),
            mean: w.mean(),
            symmetry_defect,
        });
        if self.spec.keep_states {
            self.states.push(state.clone());
        }
        Ok(())
    }

    pub fn rows(&self) -> &[DiagnosticRow] {
        &self.rows
    }

    /// Stored states; empty unless `keep_states` was set.
    pub fn states(&self) -> &[EulerState] {
        &self.states
    }

    pub fn tracks_symmetry(&self) -> bool {
        self.odd_odd
    }

    pub fn first(&self) -> &DiagnosticRow {
        &self.rows[0]
    }

    pub fn last(&self) -> &DiagnosticRow {
        self.rows
            .last()
            .expect("a trajectory has at least its initial row")
    }

    /// Largest `|q(t)/q(0) - 1|` of energy and enstrophy.
    pub fn conservation_drift(&self) -> (f64, f64) {
        let a = self.first();
        let drift = |f: fn(&DiagnosticRow) -> f64| {
            let q0 = f(a);
            self.rows
                .iter()
                .fold(0.0_f64, |m, r| m.max(((f(r) - q0) / q0).abs()))
        };
        (drift(|r| r.energy), drift(|r| r.enstrophy))
    }

    /// Writes every stored state whose time is within `tol` of a requested
    /// time as `omega_t<time>.ilf2`.
    pub fn write_snapshots(&self, dir: &Path, times: &[f64], tol: f64) -> Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        for s in &self.states {
            if times.iter().any(|t| (s.time() - t).abs() <= tol) {
                let path = dir.join(format!("omega_t{:.6}.ilf2", s.time()));
                write_field(&path, s.omega())?;
                out.push(path);
            }
        }
        Ok(out)
    }
}

pub fn diagnostics_csv(rows: &[DiagnosticRow]) -> String {
    let mut s = String::from(DIAGNOSTIC_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            r.t, r.energy, r.enstrophy, r.omega_sup, r.omega_w1r, r.u_c1, r.mean, r.symmetry_defect
        );
    }
    s
}

/// Area fractions of the node values in `bins` equal bins over `[lo, hi]`.
/// Values outside the range are clamped to the end bins.
pub fn value_histogram(f: &Field2D, bins: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut h = vec![0.0; bins.max(1)];
    let v = f.physical();
    let width = (hi - lo) / h.len() as f64;
    for &x in v {
        let b = if width > 0.0 {
            ((x - lo) / width).floor()
        } else {
            0.0
        };
        h[(b.max(0.0) as usize).min(bins - 1)] += 1.0;
    }
    let n = v.len() as f64;
    h.iter_mut().for_each(|c| *c /= n);
    h
}

/// Total-variation distance `½ Σ |a - b|`.
pub fn histogram_distance(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    #[test]
    fn histogram_is_a_distribution() {
        let g = GridSpec::new(1.0, 32).unwrap();
        let f = Field2D::from_fn(g, |x, y| x * y);
        let h = value_histogram(&f, 64, -1.0, 1.0);
        assert!((h.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(histogram_distance(&h, &h), 0.0);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let row = DiagnosticRow {
            t: 0.0,
            energy: 1.0,
            enstrophy: 2.0,
            omega_sup: 3.0,
            omega_w1r: 4.0,
            u_c1: 5.0,
            mean: 0.0,
            symmetry_defect: 0.0,
        };
        let s = diagnostics_csv(&[row, row]);
        assert_eq!(s.lines().count(), 3);
        assert!(s.starts_with("t,energy"));
        assert_eq!(s.lines().nth(1).unwrap().split(',').count(), 8);
    }
}

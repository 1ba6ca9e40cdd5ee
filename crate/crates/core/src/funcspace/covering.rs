use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{param, Result};
use crate::spectral::GridSpec;

/// Pointwise overlap allowed by the audit.
pub const MAX_OVERLAP: usize = 16;
/// Bound on circumscribed over inscribed radius.
pub const ECCENTRICITY_LIMIT: f64 = 8.0;
/// Admissible range of `|Q| / (1 + |ξ_Q|²)^α`.
pub const AREA_LAW_BOUNDS: (f64, f64) = (0.1, 100.0);

/// Radial step of the polar construction in units of `(1 + r²)^{α/2}`.
const RADIAL_STEP: f64 = 0.5;
/// Fraction of a sector's width added on each side.
const INFLATION: f64 = 0.125;
/// Radius of the central disc of the polar construction.
const CORE_RADIUS: f64 = 1.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PatchShape {
    /// `|ξ| < radius` with a squared-cosine bump.
    Disc { radius: f64 },
    /// `|ξ| < 2`, flat on the unit disc and log-radial outside.
    DyadicCore,
    /// `2^{level-1} < |ξ| < 2^{level+1}`.
    Shell { level: u32 },
    /// `r_in < |ξ| < r_out` with polar angle within `half_angle` of `center_angle`.
    Sector {
        r_in: f64,
        r_out: f64,
        center_angle: f64,
        half_angle: f64,
    },
}

fn cos2(t: f64) -> f64 {
    let c = (FRAC_PI_2 * t).cos();
    c * c
}

/// Angle difference folded into `(-π, π]`.
fn angle_offset(theta: f64, center: f64) -> f64 {
    let d = (theta - center).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

impl PatchShape {
    /// Unnormalised window; positive exactly on the open patch.
    pub fn raw_bump(&self, xi: [f64; 2]) -> f64 {
        let r = xi[0].hypot(xi[1]);
        match *self {
            PatchShape::Disc { radius } => {
                if r < radius {
                    cos2(r / radius)
                } else {
                    0.0
                }
            }
            PatchShape::DyadicCore => {
                if r <= 1.0 {
                    1.0
                } else if r < 2.0 {
                    cos2(r.log2())
                } else {
                    0.0
                }
            }
            PatchShape::Shell { level } => {
                let t = if r > 0.0 {
                    r.log2() - level as f64
                } else {
                    -1.0
                };
                if t.abs() < 1.0 {
                    cos2(t)
                } else {
                    0.0
                }
            }
            PatchShape::Sector {
                r_in,
                r_out,
                center_angle,
                half_angle,
            } => {
                let half_width = 0.5 * (r_out - r_in);
                let u = (r - 0.5 * (r_in + r_out)) / half_width;
                if u.abs() >= 1.0 {
                    return 0.0;
                }
                let v = angle_offset(xi[1].atan2(xi[0]), center_angle) / half_angle;
                if v.abs() >= 1.0 {
                    return 0.0;
                }
                cos2(u) * cos2(v)
            }
        }
    }

    /// Largest `|ξ|` in the patch.
    pub fn max_radius(&self) -> f64 {
        match *self {
            PatchShape::Disc { radius } => radius,
            PatchShape::DyadicCore => 2.0,
            PatchShape::Shell { level } => ((level + 1) as f64).exp2(),
            PatchShape::Sector { r_out, .. } => r_out,
        }
    }

    /// Extent in frequency space: `[[ξ₁ lo, ξ₁ hi], [ξ₂ lo, ξ₂ hi]]`.
    fn bounds(&self) -> [[f64; 2]; 2] {
        let disc = |r: f64| [[-r, r], [-r, r]];
        match *self {
            PatchShape::Disc { radius } => disc(radius),
            PatchShape::DyadicCore => disc(2.0),
            PatchShape::Shell { level } => disc(((level + 1) as f64).exp2()),
            PatchShape::Sector {
                r_in,
                r_out,
                center_angle,
                half_angle,
            } => {
                let (a0, a1) = (center_angle - half_angle, center_angle + half_angle);
                let mut cos_range = [a0.cos().min(a1.cos()), a0.cos().max(a1.cos())];
                let mut sin_range = [a0.sin().min(a1.sin()), a0.sin().max(a1.sin())];
                // Axis crossings inside the arc.
                let first = (a0 / FRAC_PI_2).ceil() as i64;
                let last = (a1 / FRAC_PI_2).floor() as i64;
                for q in first..=last {
                    match q.rem_euclid(4) {
                        0 => cos_range[1] = 1.0,
                        1 => sin_range[1] = 1.0,
                        2 => cos_range[0] = -1.0,
                        _ => sin_range[0] = -1.0,
                    }
                }
                let span = |lo: f64, hi: f64| {
                    let cands = [r_in * lo, r_out * lo, r_in * hi, r_out * hi];
                    [
                        cands.iter().cloned().fold(f64::INFINITY, f64::min),
                        cands.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                    ]
                };
                [
                    span(cos_range[0], cos_range[1]),
                    span(sin_range[0], sin_range[1]),
                ]
            }
        }
    }
}

/// One frequency patch `Q` with its representative point and radii.
#[derive(Debug, Clone, Serialize)]
pub struct Patch {
    /// Representative frequency `ξ_Q`, a point of the patch.
    pub center: [f64; 2],
    /// Radius of a ball contained in the patch.
    pub inner_radius: f64,
    /// Radius of a ball containing the patch.
    pub outer_radius: f64,
    pub area: f64,
    pub shape: PatchShape,
    /// Inclusive signed lattice index ranges `[[k₁ lo, k₁ hi], [k₂ lo, k₂ hi]]`,
    /// clipped to the grid.
    pub index_box: [[i64; 2]; 2],
}

impl Patch {
    fn new(shape: PatchShape, grid: &GridSpec) -> Self {
        let (center, inner_radius, outer_radius, area) = match shape {
            PatchShape::Disc { radius } => ([0.0, 0.0], radius, radius, PI * radius * radius),
            PatchShape::DyadicCore => ([0.0, 0.0], 2.0, 2.0, 4.0 * PI),
            PatchShape::Shell { level } => {
                let (a, b) = (((level as f64) - 1.0).exp2(), ((level + 1) as f64).exp2());
                // The centroid of a shell is the origin, which is not in the
                // shell; use the area-weighted mean radius on the ξ₁ axis.
                let mean_r = 2.0 / 3.0 * (b.powi(3) - a.powi(3)) / (b * b - a * a);
                ([mean_r, 0.0], 0.5 * (b - a), b, PI * (b * b - a * a))
            }
            PatchShape::Sector {
                r_in,
                r_out,
                center_angle,
                half_angle,
            } => {
                let mean_r =
                    2.0 / 3.0 * (r_out.powi(3) - r_in.powi(3)) / (r_out * r_out - r_in * r_in);
                let rc = mean_r * half_angle.sin() / half_angle;
                let center = [rc * center_angle.cos(), rc * center_angle.sin()];
                let h = half_angle.min(FRAC_PI_2);
                let inner = (0.5 * (r_out - r_in)).min(0.5 * (r_in + r_out) * h.sin());
                let outer = 0.5 * (r_out - r_in * h.cos()).hypot(2.0 * r_out * h.sin());
                (
                    center,
                    inner,
                    outer,
                    half_angle * (r_out * r_out - r_in * r_in),
                )
            }
        };
        let b = shape.bounds();
        let dxi = grid.dxi();
        let half = (grid.n() / 2) as i64;
        let clip = |lo: f64, hi: f64| {
            [
                ((lo / dxi).ceil() as i64).max(-half),
                ((hi / dxi).floor() as i64).min(half - 1),
            ]
        };
        Self {
            center,
            inner_radius,
            outer_radius,
            area,
            shape,
            index_box: [clip(b[0][0], b[0][1]), clip(b[1][0], b[1][1])],
        }
    }

    pub fn eccentricity(&self) -> f64 {
        self.outer_radius / self.inner_radius
    }

    /// Lattice points where the raw bump is positive, as
    /// `(k₁, k₂, raw value)`.
    pub fn footprint(&self, grid: &GridSpec) -> Vec<(i64, i64, f64)> {
        let dxi = grid.dxi();
        let [[a0, a1], [b0, b1]] = self.index_box;
        let mut out = Vec::new();
        for k1 in a0..=a1 {
            for k2 in b0..=b1 {
                let v = self.shape.raw_bump([k1 as f64 * dxi, k2 as f64 * dxi]);
                if v > 0.0 {
                    out.push((k1, k2, v));
                }
            }
        }
        out
    }
}

/// An α-covering of the frequency disc `|ξ| ≤ ξ_max` on a grid's lattice.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaCovering {
    pub alpha: f64,
    pub xi_max: f64,
    pub grid: GridSpec,
    pub patches: Vec<Patch>,
    /// Smallest and largest `|Q| / (1 + |ξ_Q|²)^α` over the patches.
    pub area_law: (f64, f64),
}

/// Dyadic shells for `α = 1`, polar annuli split into sectors otherwise.
pub fn build_alpha_covering(alpha: f64, xi_max: f64, grid: GridSpec) -> Result<AlphaCovering> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(param(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if !(xi_max > 0.0) {
        return Err(param(format!("xi_max must be positive, got {xi_max}")));
    }
    if xi_max > grid.nyquist() {
        return Err(param(format!(
            "xi_max {xi_max} exceeds the grid Nyquist frequency {}",
            grid.nyquist()
        )));
    }
    let mut shapes = Vec::new();
    if alpha == 1.0 {
        shapes.push(PatchShape::DyadicCore);
        let mut level = 1;
        while ((level - 1) as f64).exp2() < xi_max {
            shapes.push(PatchShape::Shell { level });
            level += 1;
        }
    } else {
        let spread = |r: f64| (1.0 + r * r).powf(0.5 * alpha);
        shapes.push(PatchShape::Disc {
            radius: CORE_RADIUS,
        });
        let mut r = 1.0;
        while r < xi_max {
            let next = r + RADIAL_STEP * spread(r);
            let w = next - r;
            let count = (TAU * r / spread(r)).ceil() as usize;
            let step = TAU / count as f64;
            for i in 0..count {
                shapes.push(PatchShape::Sector {
                    r_in: r - INFLATION * w,
                    r_out: next + INFLATION * w,
                    center_angle: (i as f64 + 0.5) * step,
                    half_angle: (0.5 + INFLATION) * step,
                });
            }
            r = next;
        }
    }
    let patches: Vec<Patch> = shapes.into_iter().map(|s| Patch::new(s, &grid)).collect();
    let area_law = patches
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), p| {
            let c2 = p.center[0] * p.center[0] + p.center[1] * p.center[1];
            let ratio = p.area / (1.0 + c2).powf(alpha);
            (lo.min(ratio), hi.max(ratio))
        });
    Ok(AlphaCovering {
        alpha,
        xi_max,
        grid,
        patches,
        area_law,
    })
}

/// Outcome of checking the covering axioms on the lattice.
#[derive(Debug, Clone, Serialize)]
pub struct CoveringAudit {
    pub alpha: f64,
    pub xi_max: f64,
    pub patch_count: usize,
    /// Lattice points with `|ξ| ≤ ξ_max` in no footprint.
    pub uncovered: usize,
    /// Largest number of footprints sharing a lattice point.
    pub max_overlap: usize,
    /// Largest `#{Q' : Q ∩ Q' ≠ ∅}`, counting `Q` itself.
    pub max_neighbors: usize,
    pub area_law: (f64, f64),
    pub max_eccentricity: f64,
    /// Every `ξ_Q` lies inside its own patch.
    pub centers_inside: bool,
}

impl CoveringAudit {
    pub fn coverage_ok(&self) -> bool {
        self.uncovered == 0
    }

    pub fn overlap_ok(&self) -> bool {
        self.max_overlap <= MAX_OVERLAP
    }

    pub fn area_law_ok(&self) -> bool {
        self.area_law.0 >= AREA_LAW_BOUNDS.0 && self.area_law.1 <= AREA_LAW_BOUNDS.1
    }

    pub fn eccentricity_ok(&self) -> bool {
        self.max_eccentricity <= ECCENTRICITY_LIMIT
    }

    pub fn passes(&self) -> bool {
        self.coverage_ok()
            && self.overlap_ok()
            && self.area_law_ok()
            && self.eccentricity_ok()
            && self.centers_inside
    }
}

impl AlphaCovering {
    /// Lattice slot of signed indices `(k₁, k₂)`.
    pub(crate) fn slot(&self, k1: i64, k2: i64) -> usize {
        let n = self.grid.n();
        self.grid.slot(k1).expect("index inside lattice") * n
            + self.grid.slot(k2).expect("index inside lattice")
    }

    /// `(slot, patch, raw)` for every footprint point, sorted by slot.
    pub(crate) fn incidences(&self) -> Vec<(u32, u32, f64)> {
        let mut all: Vec<(u32, u32, f64)> = self
            .patches
            .par_iter()
            .enumerate()
            .flat_map_iter(|(q, p)| {
                p.footprint(&self.grid)
                    .into_iter()
                    .map(move |(k1, k2, v)| (self.slot(k1, k2) as u32, q as u32, v))
            })
            .collect();
        all.sort_unstable_by_key(|&(s, q, _)| (s, q));
        all
    }

    /// Lattice points with `|ξ| ≤ ξ_max`.
    pub(crate) fn disc_slots(&self) -> Vec<usize> {
        let n = self.grid.n();
        let dxi = self.grid.dxi();
        let half = (n / 2) as i64;
        let mut out = Vec::new();
        for k1 in -half..half {
            for k2 in -half..half {
                if (k1 as f64 * dxi).hypot(k2 as f64 * dxi) <= self.xi_max {
                    out.push(self.slot(k1, k2));
                }
            }
        }
        out
    }

    pub fn audit(&self) -> CoveringAudit {
        let inc = self.incidences();
        let mut count = vec![0usize; self.grid.len()];
        for &(s, _, _) in &inc {
            count[s as usize] += 1;
        }
        let uncovered = self
            .disc_slots()
            .into_iter()
            .filter(|&s| count[s] == 0)
            .count();
        let max_overlap = count.iter().copied().max().unwrap_or(0);

        let mut pairs: HashSet<(u32, u32)> = HashSet::new();
        let mut start = 0;
        while start < inc.len() {
            let mut end = start;
            while end < inc.len() && inc[end].0 == inc[start].0 {
                end += 1;
            }
            for a in start..end {
                for b in a + 1..end {
                    pairs.insert((inc[a].1, inc[b].1));
                }
            }
            start = end;
        }
        let mut neighbors = vec![1usize; self.patches.len()];
        for &(a, b) in &pairs {
            neighbors[a as usize] += 1;
            neighbors[b as usize] += 1;
        }

        CoveringAudit {
            alpha: self.alpha,
            xi_max: self.xi_max,
            patch_count: self.patches.len(),
            uncovered,
            max_overlap,
            max_neighbors: neighbors.into_iter().max().unwrap_or(0),
            area_law: self.area_law,
            max_eccentricity: self
                .patches
                .iter()
                .map(Patch::eccentricity)
                .fold(0.0, f64::max),
            centers_inside: self
                .patches
                .iter()
                .all(|p| p.shape.raw_bump(p.center) > 0.0),
        }
    }
}

//! Function-space norms on periodic grids.
//!
//! Lebesgue, Sobolev and Hölder norms act on physical samples. Besov norms
//! use a smooth dyadic Littlewood–Paley family. α-modulation norms use an
//! [`AlphaCovering`] of the frequency lattice and a [`Bapu`] built on it; at
//! `α = 1` the covering is dyadic and the two families are equivalent.

mod bapu;
mod covering;
mod export;
mod norms;

pub use bapu::{
    alpha_mod_norm, build_bapu, Bapu, WindowSummary, KERNEL_BOUND_LIMIT, NEGLIGIBLE_PIECE,
    TAIL_TOLERANCE,
};
pub use covering::{
    build_alpha_covering, AlphaCovering, CoveringAudit, Patch, PatchShape, AREA_LAW_BOUNDS,
    ECCENTRICITY_LIMIT, MAX_OVERLAP,
};
pub use export::{bapu_json, covering_json, NORM_CSV_HEADER};
pub use norms::{
    besov_norm, dyadic_block, holder_norm, holder_norm_with, lp_norm, lp_profile, lp_window,
    smooth_step, w1r_norm, HolderEstimate, HolderOptions, BESOV_L2_EQUIVALENCE,
};

use crate::error::{param, Result};
use crate::spectral::Field2D;
use norms::check_exponent;

/// A norm together with its exponents. `p` and `q` may be `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormSpec {
    Lp { p: f64 },
    W1r { r: f64 },
    Holder { sigma: f64, order: u8 },
    Besov { s: f64, p: f64, q: f64 },
    AlphaMod { s: f64, alpha: f64, p: f64, q: f64 },
}

/// `C¹ ⊂ M^{1+σ,α}_{p,q}` holds when `σ > 2(1-α)(1-1/q)`.
pub fn c1_embedding_holds(sigma: f64, alpha: f64, q: f64) -> bool {
    sigma > 2.0 * (1.0 - alpha) * (1.0 - 1.0 / q)
}

impl NormSpec {
    pub fn tag(&self) -> &'static str {
        match self {
            NormSpec::Lp { .. } => "Lp",
            NormSpec::W1r { .. } => "W1r",
            NormSpec::Holder { .. } => "Holder",
            NormSpec::Besov { .. } => "Besov",
            NormSpec::AlphaMod { .. } => "AlphaMod",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NormSpec::Lp { p } => check_exponent("p", p),
            NormSpec::W1r { r } => {
                if r.is_nan() || r <= 1.0 || r.is_infinite() {
                    return Err(param(format!("r must lie in (1, inf), got {r}")));
                }
                Ok(())
            }
            NormSpec::Holder { sigma, order } => {
                if !(sigma > 0.0 && sigma < 1.0) {
                    return Err(param(format!("sigma must lie in (0, 1), got {sigma}")));
                }
                if order > 1 {
                    return Err(param(format!("order must be 0 or 1, got {order}")));
                }
                Ok(())
            }
            NormSpec::Besov { s, p, q } => {
                if !s.is_finite() {
                    return Err(param(format!("s must be finite, got {s}")));
                }
                check_exponent("p", p)?;
                check_exponent("q", q)
            }
            NormSpec::AlphaMod { s, alpha, p, q } => {
                if !s.is_finite() {
                    return Err(param(format!("s must be finite, got {s}")));
                }
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(param(format!("alpha must lie in (0, 1], got {alpha}")));
                }
                check_exponent("p", p)?;
                check_exponent("q", q)
            }
        }
    }

    /// For `M^{1+σ,α}_{p,q}`, whether it embeds in `C¹`; `None` for other
    /// spaces.
    pub fn embeds_in_c1(&self) -> Option<bool> {
        match *self {
            NormSpec::AlphaMod { s, alpha, q, .. } => Some(c1_embedding_holds(s - 1.0, alpha, q)),
            _ => None,
        }
    }

    /// Evaluates the norm of `f`. α-modulation norms need a partition.
    pub fn evaluate(&self, f: &Field2D, bapu: Option<&Bapu>) -> Result<f64> {
        self.validate()?;
        match *self {
            NormSpec::Lp { p } => lp_norm(f, p),
            NormSpec::W1r { r } => w1r_norm(f, r),
            NormSpec::Holder { sigma, order } => Ok(holder_norm(f, sigma, order)?.value),
            NormSpec::Besov { s, p, q } => besov_norm(f, s, p, q),
            NormSpec::AlphaMod { .. } => {
                let b =
                    bapu.ok_or_else(|| param("alpha-modulation norm needs a partition of unity"))?;
                alpha_mod_norm(f, self, b)
            }
        }
    }

    /// `space,s,sigma,p,q,r,alpha,value` with blanks for unused exponents.
    pub fn csv_row(&self, value: f64) -> String {
        let e = |v: Option<f64>| v.map(export::fmt_exponent).unwrap_or_default();
        let (s, sigma, p, q, r, alpha) = match *self {
            NormSpec::Lp { p } => (None, None, Some(p), None, None, None),
            NormSpec::W1r { r } => (None, None, None, None, Some(r), None),
            NormSpec::Holder { sigma, order } => (
                Some(order as f64 + sigma),
                Some(sigma),
                None,
                None,
                None,
                None,
            ),
            NormSpec::Besov { s, p, q } => (Some(s), None, Some(p), Some(q), None, None),
            NormSpec::AlphaMod { s, alpha, p, q } => {
                (Some(s), None, Some(p), Some(q), None, Some(alpha))
            }
        };
        format!(
            "{},{},{},{},{},{},{},{:.12e}",
            self.tag(),
            e(s),
            e(sigma),
            e(p),
            e(q),
            e(r),
            e(alpha),
            value
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_predicate() {
        // q = 1 never loses anything.
        assert!(c1_embedding_holds(0.01, 0.1, 1.0));
        assert!(c1_embedding_holds(0.9, 0.8, 2.0));
        assert!(!c1_embedding_holds(0.5, 0.5, 2.0));
        let s = NormSpec::AlphaMod {
            s: 1.5,
            alpha: 0.5,
            p: 2.0,
            q: f64::INFINITY,
        };
        assert_eq!(s.embeds_in_c1(), Some(false));
        assert_eq!(NormSpec::Lp { p: 2.0 }.embeds_in_c1(), None);
    }

    #[test]
    fn validation() {
        assert!(NormSpec::Lp { p: 0.5 }.validate().is_err());
        assert!(NormSpec::W1r { r: 1.0 }.validate().is_err());
        assert!(NormSpec::Holder {
            sigma: 0.5,
            order: 2
        }
        .validate()
        .is_err());
        assert!(NormSpec::AlphaMod {
            s: 1.0,
            alpha: 0.0,
            p: 2.0,
            q: 2.0
        }
        .validate()
        .is_err());
        assert!(NormSpec::Besov {
            s: 0.5,
            p: f64::INFINITY,
            q: 1.0
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn csv_row_layout() {
        let row = NormSpec::Besov {
            s: 0.5,
            p: f64::INFINITY,
            q: 2.0,
        }
        .csv_row(1.25);
        assert_eq!(row, "Besov,0.5,,inf,2,,,1.250000000000e0");
    }
}

//! Explicit initial data: the multi-scale odd quadrupole vorticity and its
//! high-frequency perturbations.
//!
//! `ω₀` is a sum of rescaled four-bump quadrupoles with disjoint supports
//! accumulating at the origin. The perturbation `β` places four signed copies
//! of a concentrated profile `ρ(λ·)` at the reflections of a point `x*` and
//! modulates them by `sin(k x₁)`.

mod bump;
mod perturb;
mod rho;

pub use bump::{
    base_bump, omega0, omega0_value, omega0_w1r_norm, quadrupole, quadrupole_value,
    scaled_quadrupole_value, Bump, Omega0Params, CELLS_PER_BUMP, LOCAL_CELLS, MAX_BUMP_RADIUS,
};
pub use perturb::{
    beta_hat, beta_perturbation, beta_perturbation_with, perturbed_vorticity, PerturbParams,
    CELLS_PER_SCALE, DEFAULT_X_STAR, MARGIN_SCALES,
};
pub use rho::{rho_field, RhoSpec};

//! Numerical laboratory for loss of continuity of the Euler solution map.
//!
//! The crate is organised by subsystem:
//!
//! * [`spectral`] periodic grids, fields and Fourier-side operators
//!   (derivatives, inverse and fractional Laplacians, Biot–Savart).
//! * [`funcspace`] Lebesgue, Sobolev, Hölder, Besov and α-modulation norms,
//!   together with α-coverings and their partitions of unity.
//! * [`initdata`] the explicit initial vorticities and high-frequency
//!   perturbations.
//! * [`euler2d`] a pseudo-spectral RK4 solver for the 2D vorticity equation.
//! * [`lagrangian`] particle trajectories with their Jacobians.
//! * [`shear3d`] exact 3D shear flows and the C^{1+σ} solution gap.

pub mod error;
pub mod euler2d;
pub mod funcspace;
pub mod initdata;
pub mod lagrangian;
pub mod shear3d;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};

/// Version of this crate, recorded in experiment manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

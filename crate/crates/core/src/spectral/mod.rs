//! Periodic-grid fields on `[-L, L)²` and their Fourier-side operators.
//!
//! The plane is replaced by a large torus. Fourier coefficients are stored in
//! FFT order and normalised so that `f(x) = Σ_m c_m exp(i ξ_m · x)` in
//! physical coordinates, which keeps closed-form transforms directly
//! comparable with the lattice coefficients.

mod fft;
mod field;
mod grid;
mod io;
mod ops;
mod random;

pub use fft::{fft2, ifft2};
pub(crate) use field::{physical_to_spectral, spectral_to_complex};
pub use field::{Field2D, Velocity2D};
pub use grid::GridSpec;
pub use io::{read_field, read_field_from, write_field, write_field_to, ILF2_MAGIC, ILF2_VERSION};
pub use ops::{
    biot_savart, curl, divergence, frac_laplacian, inv_laplacian, laplacian, spectral_derivative,
    sup_norm_refined, Axis,
};
pub use random::random_band_limited;

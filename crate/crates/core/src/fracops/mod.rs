//! Nonlocal operators: pointwise quadrature for radial functions and
//! spectral multipliers on periodic grids.

mod grid;
mod radial;
mod spectral;

pub use grid::{GridField, GridSpec};
pub use radial::{
    frac_laplacian_radial_point, lyapunov_residual, riesz_potential_radial, Combination, Constant, Gaussian,
    Power, RadialProfile,
};
pub use spectral::{apply_symbol, gradient_l2, gradient_spectral, FftN, Wavenumbers};
pub(crate) use spectral::gradient_l2_spectral;

//! Time stepping for the regularised semigroups on a periodic grid, and a
//! radial solver for the drift operator in three dimensions.
//!
//! The forward equation is `∂_t u = -(-Δ)^{α/2}u + εΔu + b_ε·∇u` and the
//! adjoint one `∂_t g = -(-Δ)^{α/2}g + εΔg - div(b_ε g)`. Each step treats the
//! Fourier multiplier exactly and the transport term with a strong-stability
//! preserving Runge–Kutta scheme.

mod grid;
mod radial;

pub use grid::{
    heat_kernel_column, heat_kernel_row, mollified_delta, phi_weight, GridSolver, NormSample, PhiWeight,
    SolverConfig, Splitting,
};
pub use radial::{RadialConfig, RadialSolver};

//! Fractional diffusion with a repulsive Hardy-type drift.
//!
//! The operator `Λ = (-Δ)^{α/2} - b·∇` with `b(x) = κ|x|^{-α}x` near the
//! origin has a heat kernel that vanishes like `|y|^β` at the singularity,
//! where β solves a transcendental exponent equation. This crate provides the
//! exponent solver, pointwise and spectral realisations of the operator,
//! time steppers for the regularised semigroups, a Monte Carlo simulator for
//! the associated stable-driven SDE, and audits of the quantitative
//! estimates.

// `!(x > 0.0)` style guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod checks;
pub mod error;
pub mod evolve;
pub mod fracops;
pub mod io;
pub mod mc;
pub mod model;
pub mod quad;
pub mod report;
pub mod roots;
pub mod specfun;

#[cfg(test)]
mod oracle;

pub use error::{Error, Result};

//! Problem definition: parameters, the drift and its regularisation, the
//! exponent equation and the desingularising weights.

mod drift;
mod exponent;
mod weights;

pub use drift::{
    cutoff, cutoff_derivative, div_drift_eps, drift, drift_eps, drift_factor, jacobian_bounds,
    sigma_bounds, sup_drift,
};
pub use exponent::{beta_of_kappa, kappa_of_beta, BetaSolution};
pub(crate) use weights::least_squares_slope;
pub use weights::{
    check_b22_b23, weight_eta, weight_eta_d1, weight_eta_d2, weight_psi, weight_psi_radial,
    WeightSpec,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radius inside which the drift is exactly `κ|x|^{-α}x`.
pub const CUTOFF_INNER: f64 = 1.0;
/// Radius beyond which the drift vanishes.
pub const CUTOFF_OUTER: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub d: usize,
    pub alpha: f64,
    pub kappa: f64,
    /// Bound on the columns `|∂_i b_ε|` over `|x| ≥ 1`, uniform in ε.
    pub sigma1: f64,
    /// Bound on `|div b_ε|` over `|x| ≥ 1`, uniform in ε.
    pub sigma2: f64,
}

impl ModelParams {
    /// Validates `d ≥ 3`, `0 < α ≤ 1` and `κ ≥ 0`. The σ bounds start at zero;
    /// see [`ModelParams::with_sigma_bounds`].
    ///
    /// `κ = 0` is accepted because the drift-free operator is the reference
    /// case for most oracles.
    pub fn new(d: usize, alpha: f64, kappa: f64) -> Result<Self> {
        if d < 3 {
            return Err(Error::Domain(format!("dimension must be at least 3, got {d}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::Domain(format!("kappa must be finite and non-negative, got {kappa}")));
        }
        Ok(Self { d, alpha, kappa, sigma1: 0.0, sigma2: 0.0 })
    }

    /// Parameters whose coupling is the one producing the exponent `beta`.
    pub fn with_beta(d: usize, alpha: f64, beta: f64) -> Result<Self> {
        let probe = Self::new(d, alpha, 0.0)?;
        let kappa = kappa_of_beta(beta, &probe)?;
        Self::new(d, alpha, kappa)
    }

    pub fn with_sigma_bounds(mut self, eps_list: &[f64]) -> Result<Self> {
        let (s1, s2) = sigma_bounds(&self, eps_list)?;
        self.sigma1 = s1;
        self.sigma2 = s2;
        Ok(self)
    }

    /// Exponent `β(κ)`; zero for the drift-free operator.
    pub fn beta(&self) -> Result<f64> {
        if self.kappa == 0.0 {
            Ok(0.0)
        } else {
            beta_of_kappa(self.kappa, self).map(|b| b.beta)
        }
    }
}

//! The exponent equation
//! `κ = β (d+β-2)/(d+β-α) · γ(d+β-2)/γ(d+β-α)`, `0 < β < α`,
//! whose root makes `|x|^β` annihilated by the formal adjoint operator.

use serde::{Deserialize, Serialize};

use super::ModelParams;
use crate::error::{domain, Result};
use crate::roots::brent;
use crate::specfun::{ln_gamma_pos, log_gamma_weight};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaSolution {
    pub beta: f64,
    /// `α - β`, carried separately because it is the accurate quantity when
    /// β is close to α.
    pub gap: f64,
    /// `|κ(β) - κ|`.
    pub residual: f64,
}

/// `ln κ(β)` written in terms of both `β` and `δ = α - β`, so that neither
/// end of the interval loses precision.
fn ln_kappa(beta: f64, gap: f64, p: &ModelParams) -> f64 {
    let d = p.d as f64;
    let s1 = d + beta - 2.0;
    let s2 = d - gap;
    let ln_gw2 = s2 * std::f64::consts::LN_2 + 0.5 * d * std::f64::consts::PI.ln()
        + ln_gamma_pos(0.5 * s2)
        - ln_gamma_pos(0.5 * gap);
    beta.ln() + s1.ln() - s2.ln() + log_gamma_weight(s1, p.d).expect("0 < d+β-2 < d")
        - ln_gw2
}

pub fn kappa_of_beta(beta: f64, p: &ModelParams) -> Result<f64> {
    if !(beta > 0.0 && beta < p.alpha) {
        return domain(format!("beta must lie in (0, {}), got {beta}", p.alpha));
    }
    Ok(ln_kappa(beta, p.alpha - beta, p).exp())
}

/// Solves the exponent equation for β.
///
/// The root is bracketed in `ln β` when it lies in the lower half of `(0, α)`
/// and in `ln(α - β)` otherwise; both maps are smooth and monotone, and the
/// pole at `β = α` becomes a linear asymptote in the log variable.
pub fn beta_of_kappa(kappa: f64, p: &ModelParams) -> Result<BetaSolution> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return domain(format!("kappa must be finite and positive, got {kappa}"));
    }
    let alpha = p.alpha;
    let half = 0.5 * alpha;
    let target = kappa.ln();
    let lower = ln_kappa(half, alpha - half, p) >= target;
    const LO: f64 = -700.0;
    let hi = half.ln();
    let root = if lower {
        brent(|u| ln_kappa(u.exp(), alpha - u.exp(), p) - target, LO, hi, 0.0, 500)
    } else {
        brent(|u| ln_kappa(alpha - u.exp(), u.exp(), p) - target, LO, hi, 0.0, 500)
    };
    let Some(root) = root else {
        return domain(format!("kappa = {kappa} is outside the representable range"));
    };
    let x = root.x.exp();
    let (beta, gap) = if lower { (x, alpha - x) } else { (alpha - x, x) };
    let residual = (ln_kappa(beta, gap, p).exp() - kappa).abs();
    Ok(BetaSolution { beta, gap, residual })
}

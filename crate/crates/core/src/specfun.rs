//! Log-Gamma and the Riesz-kernel normalisation `γ(s)`.
//!
//! `γ(s) = 2^s π^{d/2} Γ(s/2) / Γ((d-s)/2)` is the constant for which
//! `|x|^{s-d} / γ(s)` is the kernel of `(-Δ)^{-s/2}` on `R^d`. It is evaluated
//! in log space because the ratio spans many decades as `s → d`.

use std::f64::consts::PI;

use crate::error::{domain, Result};

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln Γ(x)` for finite `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return domain(format!("log_gamma requires a finite positive argument, got {x}"));
    }
    Ok(ln_gamma_pos(x))
}

/// Unchecked kernel of [`log_gamma`]; callers guarantee `x > 0`.
pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the Lanczos sum in its accurate range.
        (PI / (PI * x).sin()).ln() - lanczos(1.0 - x)
    } else {
        lanczos(x)
    }
}

fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

/// `ln γ(s)` for `0 < s < d`.
pub fn log_gamma_weight(s: f64, d: usize) -> Result<f64> {
    let df = d as f64;
    if !(s.is_finite() && s > 0.0 && s < df) {
        return domain(format!("gamma_weight requires 0 < s < d = {d}, got s = {s}"));
    }
    Ok(s * std::f64::consts::LN_2 + 0.5 * df * PI.ln() + ln_gamma_pos(0.5 * s)
        - ln_gamma_pos(0.5 * (df - s)))
}

/// `γ(s) = 2^s π^{d/2} Γ(s/2) / Γ(d/2 - s/2)`, strictly positive on `(0, d)`.
pub fn gamma_weight(s: f64, d: usize) -> Result<f64> {
    log_gamma_weight(s, d).map(f64::exp)
}

/// Surface area of the unit sphere `S^{d-1} ⊂ R^d`.
pub fn sphere_area(d: usize) -> f64 {
    let h = 0.5 * d as f64;
    2.0 * (h * PI.ln() - ln_gamma_pos(h)).exp()
}

/// Normalising constant of the hypersingular representation of `(-Δ)^{α/2}`:
/// `C(d, α) = 2^α Γ((d+α)/2) / (π^{d/2} |Γ(-α/2)|)`, for `0 < α < 2`.
pub fn frac_laplacian_constant(d: usize, alpha: f64) -> f64 {
    let df = d as f64;
    // |Γ(-α/2)| = Γ(1 - α/2) / (α/2)
    let ln_abs_gamma_neg = ln_gamma_pos(1.0 - 0.5 * alpha) - (0.5 * alpha).ln();
    (alpha * std::f64::consts::LN_2 + ln_gamma_pos(0.5 * (df + alpha))
        - 0.5 * df * PI.ln()
        - ln_abs_gamma_neg)
        .exp()
}

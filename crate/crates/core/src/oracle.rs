//! Independent reference implementations used only by tests.

/// `ln Γ(x)` by upward recurrence to `x ≥ 25` followed by the Stirling series
/// through the `B_12` term (truncation error below `1e-17` there).
pub(crate) fn stirling_ln_gamma(x: f64) -> f64 {
    let mut shift = 0.0;
    let mut z = x;
    while z < 25.0 {
        shift += z.ln();
        z += 1.0;
    }
    let z2 = z * z;
    let series = 1.0 / (12.0 * z) - 1.0 / (360.0 * z * z2) + 1.0 / (1260.0 * z * z2 * z2)
        - 1.0 / (1680.0 * z * z2 * z2 * z2)
        + 1.0 / (1188.0 * z * z2 * z2 * z2 * z2)
        - 691.0 / (360360.0 * z * z2 * z2 * z2 * z2 * z2);
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

/// `ln γ(s)` built on [`stirling_ln_gamma`].
pub(crate) fn stirling_ln_gamma_weight(s: f64, d: usize) -> f64 {
    let df = d as f64;
    s * std::f64::consts::LN_2 + 0.5 * df * std::f64::consts::PI.ln()
        + stirling_ln_gamma(0.5 * s)
        - stirling_ln_gamma(0.5 * (df - s))
}

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::fracops::lyapunov_residual;
use crate::model::{beta_of_kappa, check_b22_b23, weight_eta, ModelParams, WeightSpec};
use crate::report::CheckReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaCurveRow {
    pub kappa: f64,
    pub beta: f64,
    pub residual: f64,
}

/// Solves the exponent equation on `count` log-spaced couplings in
/// `[kappa_lo, kappa_hi]`.
///
/// `measured = [max residual/max(1,κ), number of non-increasing steps,
/// α - β(κ_hi)]`, `bound = [1e-12, 0, α - β(κ_hi/10)]`: residuals at double
/// precision, a strictly increasing curve, and a gap to α that keeps shrinking
/// over the last decade.
pub fn check_beta_curve(p: &ModelParams, kappa_lo: f64, kappa_hi: f64, count: usize) -> Result<(CheckReport, Vec<BetaCurveRow>)> {
    if !(kappa_lo > 0.0 && kappa_hi > kappa_lo && kappa_hi.is_finite()) || count < 2 {
        return domain(format!("need 0 < kappa_lo < kappa_hi and at least two points, got [{kappa_lo}, {kappa_hi}] x {count}"));
    }
    let mut rows = Vec::with_capacity(count);
    for i in 0..count {
        let kappa = kappa_lo * (kappa_hi / kappa_lo).powf(i as f64 / (count - 1) as f64);
        let sol = beta_of_kappa(kappa, p)?;
        rows.push(BetaCurveRow { kappa, beta: sol.beta, residual: sol.residual });
    }
    let worst = rows.iter().map(|r| r.residual / r.kappa.max(1.0)).fold(0.0, f64::max);
    let bad_steps = rows.windows(2).filter(|w| !(w[1].beta > w[0].beta)).count();
    let gap_top = p.alpha - beta_of_kappa(kappa_hi, p)?.beta;
    let gap_decade = p.alpha - beta_of_kappa(kappa_hi / 10.0, p)?.beta;
    let mut rep = CheckReport::new("beta_curve", 0.0)
        .param("d", p.d)
        .param("alpha", p.alpha)
        .param("kappa_lo", kappa_lo)
        .param("kappa_hi", kappa_hi)
        .param("count", count);
    rep.measured = vec![worst, bad_steps as f64, gap_top];
    rep.bound = vec![1e-12, 0.0, gap_decade];
    let ok = worst <= 1e-12 && bad_steps == 0 && gap_top < gap_decade && gap_top > 0.0;
    Ok((super::finish(rep, ok), rows))
}

/// `|residual(r)|/r^{β-α}` of the Lyapunov identity at each radius, for
/// β = β(κ) of `p`. Passes when every entry is at most `tol`.
pub fn check_lyapunov(p: &ModelParams, radii: &[f64], tol: f64) -> Result<CheckReport> {
    let beta = beta_of_kappa(p.kappa, p)?.beta;
    let mut rep = CheckReport::new(format!("lyapunov_d{}_alpha{}_kappa{}", p.d, p.alpha, p.kappa), 0.0)
        .param("d", p.d)
        .param("alpha", p.alpha)
        .param("kappa", p.kappa)
        .param("beta", beta)
        .param("radii", radii.to_vec());
    for &r in radii {
        let res = lyapunov_residual(beta, p.kappa, r, p.d, p.alpha)?;
        rep.measured.push((res / r.powf(beta - p.alpha)).abs());
        rep.bound.push(tol);
    }
    let ok = rep.within_bounds();
    Ok(super::finish(rep, ok))
}

/// Knot values and one-sided slopes of η at `τ = 1, 2`, plus the weight
/// hypotheses of [`check_b22_b23`].
///
/// `measured` holds the absolute deviations of `[η(1), η'(1⁻), η'(1⁺), η(2),
/// η'(2⁻), η'(2⁺)]` from `[1, β, β, 1+β/2, 0, 0]` followed by the deviation of
/// the fitted ball-norm exponent from `j'/q'`; bounds are `1e-5` and `1e-3`.
pub fn check_weights(beta: f64, p: &ModelParams) -> Result<CheckReport> {
    let spec = WeightSpec::new(1.0, beta, p)?;
    let eta = |t: f64| weight_eta(t, beta);
    let h = 1e-6;
    let left = |t: f64| (eta(t) - eta(t - h)) / h;
    let right = |t: f64| (eta(t + h) - eta(t)) / h;
    let got = [eta(1.0), left(1.0), right(1.0), eta(2.0), left(2.0), right(2.0)];
    let want = [1.0, beta, beta, 1.0 + 0.5 * beta, 0.0, 0.0];
    let b23 = check_b22_b23(&spec, p);
    let mut rep = CheckReport::new("weights", 0.0)
        .param("d", p.d)
        .param("alpha", p.alpha)
        .param("beta", beta)
        .param("theta", spec.theta)
        .param("q_prime", spec.q_prime)
        .param("j_prime", spec.j_prime)
        .param("fitted_exponent", b23.measured[1])
        .param("b23_passed", b23.passed);
    for (g, w) in got.iter().zip(&want) {
        rep.measured.push((g - w).abs());
        rep.bound.push(1e-5);
    }
    rep.measured.push((b23.measured[1] - b23.bound[1]).abs());
    rep.bound.push(1e-3);
    let ok = rep.within_bounds() && b23.passed;
    Ok(super::finish(rep, ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_passes_and_is_monotone() {
        let p = ModelParams::new(3, 0.5, 1.0).unwrap();
        let (rep, rows) = check_beta_curve(&p, 1e-2, 1e2, 41).unwrap();
        assert!(rep.passed, "{}", rep.summary());
        assert!(rows.iter().all(|r| r.beta > 0.0 && r.beta < 0.5));
        assert!(check_beta_curve(&p, 1.0, 1.0, 10).is_err());
    }

    #[test]
    fn lyapunov_detects_wrong_coupling() {
        let p = ModelParams::new(3, 0.5, 1.0).unwrap();
        let rep = check_lyapunov(&p, &[0.5], 1e-4).unwrap();
        assert!(rep.passed, "{}", rep.summary());
        // with κ off by 10% the divergence term no longer cancels
        let beta = beta_of_kappa(1.0, &p).unwrap().beta;
        let res = lyapunov_residual(beta, 1.1, 0.5, 3, 0.5).unwrap() / 0.5f64.powf(beta - 0.5);
        let want = 0.1 * (3.0 + beta - 0.5);
        assert!((res - want).abs() < 1e-6 * want, "{res} vs {want}");
    }

    #[test]
    fn weights_pass() {
        let p = ModelParams::new(3, 0.5, 1.0).unwrap();
        let rep = check_weights(0.3, &p).unwrap();
        assert!(rep.passed, "{}", rep.summary());
    }
}

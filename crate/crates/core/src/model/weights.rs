//! Desingularising weights.
//!
//! `η(τ) = τ^β` on `[0, 1)`, `βτ(2 - τ/2) + 1 - 3β/2` on `[1, 2)` and
//! `1 + β/2` beyond; `ψ_s(y) = η(s^{-1/α}|y|)`. The middle branch is the
//! quadratic that joins the power to the plateau with matching slopes.


use super::ModelParams;
use crate::error::{domain, Result};
use crate::quad::DoubleExponential;
use crate::report::CheckReport;
use crate::specfun::sphere_area;

pub fn weight_eta(tau: f64, beta: f64) -> f64 {
    if tau < 1.0 {
        tau.max(0.0).powf(beta)
    } else if tau < 2.0 {
        beta * tau * (2.0 - 0.5 * tau) + 1.0 - 1.5 * beta
    } else {
        1.0 + 0.5 * beta
    }
}

pub fn weight_eta_d1(tau: f64, beta: f64) -> f64 {
    if tau < 1.0 {
        beta * tau.powf(beta - 1.0)
    } else if tau < 2.0 {
        beta * (2.0 - tau)
    } else {
        0.0
    }
}

pub fn weight_eta_d2(tau: f64, beta: f64) -> f64 {
    if tau < 1.0 {
        beta * (beta - 1.0) * tau.powf(beta - 2.0)
    } else if tau < 2.0 {
        -beta
    } else {
        0.0
    }
}

/// `ψ_t(y)`.
pub fn weight_psi(t: f64, y: &[f64], beta: f64, p: &ModelParams) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("weight time scale must be positive, got {t}"));
    }
    let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(weight_psi_radial(r, t, beta, p.alpha))
}

/// `ψ_s` as a function of `|y|`, without argument checks.
pub fn weight_psi_radial(r: f64, s: f64, beta: f64, alpha: f64) -> f64 {
    weight_eta(r * s.powf(-1.0 / alpha), beta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub s: f64,
    pub beta: f64,
    pub theta: f64,
    pub q_prime: f64,
    pub j_prime: f64,
    pub omega_ball_radius: f64,
}

impl WeightSpec {
    pub fn new(s: f64, beta: f64, p: &ModelParams) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return domain(format!("weight time scale must be positive, got {s}"));
        }
        if !(beta > 0.0 && beta < p.alpha) {
            return domain(format!("weight exponent must lie in (0, {}), got {beta}", p.alpha));
        }
        let da = (2.0 - p.alpha) * p.d as f64;
        let theta = da / (da + 8.0 * beta);
        Ok(Self {
            s,
            beta,
            theta,
            q_prime: 2.0 / (1.0 - theta),
            j_prime: p.d as f64 / p.alpha,
            omega_ball_radius: s.powf(1.0 / p.alpha),
        })
    }

    /// `θβq'`, the singularity order of `ψ_s^{-θq'}` at the origin.
    pub fn singular_order(&self) -> f64 {
        self.theta * self.beta * self.q_prime
    }
}

/// `‖ψ_s^{-θ}‖_{L^{q'}(B(0, s^{1/α}))}` by radial quadrature.
pub(crate) fn b23_norm(spec: &WeightSpec, s: f64, p: &ModelParams) -> f64 {
    let radius = s.powf(1.0 / p.alpha);
    let expo = -spec.theta * spec.q_prime;
    let d = p.d as f64;
    let q = DoubleExponential::with_tolerance(1e-13);
    let e = q.tanh_sinh(0.0, radius, |r, _, _| {
        r.powf(d - 1.0) * weight_psi_radial(r, s, spec.beta, p.alpha).powf(expo)
    });
    (sphere_area(p.d) * e.value).powf(1.0 / spec.q_prime)
}

const B23_S_MIN: f64 = 1e-3;
const B23_S_MAX: f64 = 2.0;
const B23_POINTS: usize = 25;

/// Audits the two weight hypotheses.
///
/// `measured = [c₂, fitted s-exponent, θβq']` against
/// `bound = [1, j'/q', d]`. Passes when `c₂ = 1`, the fitted exponent is within
/// the tolerance of `j'/q'`, and `θβq' < d` (the weight power is integrable).
pub fn check_b22_b23(spec: &WeightSpec, p: &ModelParams) -> CheckReport {
    let target = spec.j_prime / spec.q_prime;
    let tol = 1e-3;
    let mut rep = CheckReport::new("weights_b22_b23", tol)
        .param("d", p.d)
        .param("alpha", p.alpha)
        .param("beta", spec.beta)
        .param("theta", spec.theta)
        .param("q_prime", spec.q_prime)
        .param("j_prime", spec.j_prime)
        .param("s", spec.s);
    let order = spec.singular_order();
    let integrable = order < p.d as f64;
    // ψ_s ≥ 1 off the ball because η ≥ 1 on [1, ∞).
    let c2 = 1.0;
    let mut fitted = f64::NAN;
    if integrable {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for i in 0..B23_POINTS {
            let s = B23_S_MIN * (B23_S_MAX / B23_S_MIN).powf(i as f64 / (B23_POINTS - 1) as f64);
            xs.push(s.ln());
            ys.push(b23_norm(spec, s, p).ln());
        }
        fitted = least_squares_slope(&xs, &ys);
        rep.set("c3_at_s", b23_norm(spec, spec.s, p) / spec.s.powf(target));
    }
    rep.measured = vec![c2, fitted, order];
    rep.bound = vec![1.0, target, p.d as f64];
    rep.passed = integrable && c2 <= 1.0 && (fitted - target).abs() <= tol;
    rep.set("s_grid", format!("{B23_POINTS} log-spaced points in [{B23_S_MIN}, {B23_S_MAX}]"));
    rep
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}


#[cfg(test)]
mod tests {
    use super::*;

    const B: f64 = 0.3;

    #[test]
    fn knots() {
        assert!((weight_eta(1.0, B) - 1.0).abs() < 1e-15);
        assert!((weight_eta(1.0 - 1e-15, B) - 1.0).abs() < 1e-14);
        assert!((weight_eta(2.0, B) - (1.0 + B / 2.0)).abs() < 1e-15);
        assert!((weight_eta(2.0 - 1e-15, B) - (1.0 + B / 2.0)).abs() < 1e-14);
        assert_eq!(weight_eta(0.0, B), 0.0);
    }

    #[test]
    fn one_sided_derivatives_at_knots() {
        let h = 1e-6;
        for &(k, want) in &[(1.0, B), (2.0, 0.0)] {
            let left = (weight_eta(k, B) - weight_eta(k - h, B)) / h;
            let right = (weight_eta(k + h, B) - weight_eta(k, B)) / h;
            assert!((left - want).abs() < 1e-5, "left at {k}: {left}");
            assert!((right - want).abs() < 1e-5, "right at {k}: {right}");
        }
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        for i in 1..400 {
            let t = 2.5 * i as f64 / 400.0;
            if (t - 1.0).abs() < 1e-3 || (t - 2.0).abs() < 1e-3 {
                continue;
            }
            let h = 1e-5;
            let d1 = (weight_eta(t + h, B) - weight_eta(t - h, B)) / (2.0 * h);
            let d2 = (weight_eta(t + h, B) - 2.0 * weight_eta(t, B) + weight_eta(t - h, B)) / (h * h);
            assert!((d1 - weight_eta_d1(t, B)).abs() < 1e-6 * (1.0 + d1.abs()), "t={t}");
            assert!((d2 - weight_eta_d2(t, B)).abs() < 1e-3 * (1.0 + d2.abs()), "t={t}");
        }
    }

    #[test]
    fn psi_values() {
        let p = ModelParams::new(3, 0.5, 1.0).unwrap();
        assert_eq!(weight_psi(1.0, &[0.0; 3], B, &p).unwrap(), 0.0);
        assert_eq!(weight_psi(0.5, &[0.6, 0.0, 0.0], B, &p).unwrap(), 1.0 + B / 2.0);
        assert!(weight_psi(0.0, &[1.0; 3], B, &p).is_err());
        let v = weight_psi(1.0, &[0.3, 0.4, 0.0], B, &p).unwrap();
        assert!((v - 0.5f64.powf(B)).abs() < 1e-15);
    }

    #[test]
    fn theta_arithmetic() {
        let p = ModelParams::new(3, 0.5, 1.0).unwrap();
        let w = WeightSpec::new(1.0, B, &p).unwrap();
        assert!((w.theta - 4.5 / 6.9).abs() < 1e-15);
        assert!((w.q_prime - 2.0 / (1.0 - 4.5 / 6.9)).abs() < 1e-12);
        assert!(w.singular_order() < 3.0);
        assert!(WeightSpec::new(0.0, B, &p).is_err());
        assert!(WeightSpec::new(1.0, 0.6, &p).is_err());
    }

    #[test]
    fn b23_norm_matches_closed_form() {
        let p = ModelParams::new(3, 0.5, 1.0).unwrap();
        let w = WeightSpec::new(1.0, B, &p).unwrap();
        for &s in &[1e-3f64, 0.1, 1.0, 2.0] {
            let radius = s.powf(2.0);
            let k = 3.0 - w.singular_order();
            let exact = (4.0 * std::f64::consts::PI * radius.powi(3) / k).powf(1.0 / w.q_prime);
            let got = b23_norm(&w, s, &p);
            assert!(((got - exact) / exact).abs() < 1e-10, "s={s}: {got} vs {exact}");
        }
    }

    #[test]
    fn b22_b23_report() {
        let p = ModelParams::new(3, 0.5, 1.0).unwrap();
        let w = WeightSpec::new(1.0, B, &p).unwrap();
        let r = check_b22_b23(&w, &p);
        assert!(r.passed, "{}", r.summary());
        assert_eq!(r.measured[0], 1.0);
    }

    proptest::proptest! {
        #[test]
        fn eta_bounded_and_monotone(a in 0.0f64..5.0, b in 0.0f64..5.0, beta in 0.01f64..0.99) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let (x, y) = (weight_eta(lo, beta), weight_eta(hi, beta));
            proptest::prop_assert!(x <= y + 1e-15);
            proptest::prop_assert!((0.0..=1.0 + beta / 2.0 + 1e-15).contains(&y));
        }

        #[test]
        fn psi_self_similar(t in 1e-3f64..10.0, r in 0.0f64..50.0, beta in 0.05f64..0.45) {
            let a = weight_psi_radial(r, t, beta, 0.5);
            let b = weight_psi_radial(r * t.powf(-2.0), 1.0, beta, 0.5);
            proptest::prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}

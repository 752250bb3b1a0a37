//! The drift `b(x) = κχ(|x|)|x|^{-α}x` and its regularisation, where `|x|` is
//! replaced by `|x|_ε = (|x|² + ε)^{1/2}`.
//!
//! Both are radial fields `φ(r)x`, so every derived quantity reduces to the
//! profile `φ` and its derivative.

use super::{ModelParams, CUTOFF_INNER, CUTOFF_OUTER};
use crate::error::{domain, Result};

fn g(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

fn g_d1(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp() / (t * t)
    } else {
        0.0
    }
}

/// Smooth cutoff: 1 on `[0, 1]`, 0 on `[2, ∞)`.
pub fn cutoff(r: f64) -> f64 {
    if r <= CUTOFF_INNER {
        1.0
    } else if r >= CUTOFF_OUTER {
        0.0
    } else {
        let a = g(CUTOFF_OUTER - r);
        let b = g(r - CUTOFF_INNER);
        a / (a + b)
    }
}

pub fn cutoff_derivative(r: f64) -> f64 {
    if r <= CUTOFF_INNER || r >= CUTOFF_OUTER {
        return 0.0;
    }
    let a = g(CUTOFF_OUTER - r);
    let b = g(r - CUTOFF_INNER);
    let da = -g_d1(CUTOFF_OUTER - r);
    let db = g_d1(r - CUTOFF_INNER);
    (da * b - a * db) / ((a + b) * (a + b))
}

/// Radial profile `φ_ε(r)` with `b_ε(x) = φ_ε(|x|) x`, and its derivative.
/// `eps = 0` gives the unregularised drift.
pub fn drift_factor(r: f64, eps: f64, p: &ModelParams) -> (f64, f64) {
    if r >= CUTOFF_OUTER || p.kappa == 0.0 {
        return (0.0, 0.0);
    }
    let q = r * r + eps;
    if q == 0.0 {
        return (0.0, 0.0);
    }
    let pw = q.powf(-0.5 * p.alpha);
    let chi = cutoff(r);
    let phi = p.kappa * chi * pw;
    let dphi = p.kappa * (cutoff_derivative(r) * pw - p.alpha * chi * r * pw / q);
    (phi, dphi)
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn scaled(x: &[f64], phi: f64) -> Vec<f64> {
    x.iter().map(|v| phi * v).collect()
}

/// `b(x)`; the zero vector at the origin.
pub fn drift(x: &[f64], p: &ModelParams) -> Vec<f64> {
    let r = norm(x);
    if r == 0.0 {
        return vec![0.0; x.len()];
    }
    scaled(x, drift_factor(r, 0.0, p).0)
}

pub fn drift_eps(x: &[f64], eps: f64, p: &ModelParams) -> Result<Vec<f64>> {
    if !(eps > 0.0) {
        return domain(format!("regularisation parameter must be positive, got {eps}"));
    }
    Ok(scaled(x, drift_factor(norm(x), eps, p).0))
}

/// `div b_ε(x) = dφ_ε + rφ_ε'`.
pub fn div_drift_eps(x: &[f64], eps: f64, p: &ModelParams) -> Result<f64> {
    if !(eps > 0.0) {
        return domain(format!("regularisation parameter must be positive, got {eps}"));
    }
    let r = norm(x);
    let (phi, dphi) = drift_factor(r, eps, p);
    Ok(x.len() as f64 * phi + r * dphi)
}

/// `(max_i |∂_i b_ε|, |div b_ε|)` at radius `r`.
///
/// `∂_i b = φ e_i + φ' x_i x / r`, whose length is maximised along or across
/// the radial direction, giving `max(|φ|, |φ + rφ'|)`.
pub fn jacobian_bounds(r: f64, eps: f64, p: &ModelParams) -> (f64, f64) {
    let (phi, dphi) = drift_factor(r, eps, p);
    let col = phi.abs().max((phi + r * dphi).abs());
    let div = (p.d as f64 * phi + r * dphi).abs();
    (col, div)
}

const SIGMA_GRID: usize = 20_000;
const SIGMA_PAD: f64 = 1.1;

/// Measured `(σ₁, σ₂)`: suprema over `1 ≤ |x| ≤ 2` and the given ε values,
/// padded by 10%. Both vanish beyond radius 2.
pub fn sigma_bounds(p: &ModelParams, eps_list: &[f64]) -> Result<(f64, f64)> {
    sigma_bounds_on(p, eps_list, SIGMA_GRID)
}

pub(crate) fn sigma_bounds_on(p: &ModelParams, eps_list: &[f64], m: usize) -> Result<(f64, f64)> {
    if eps_list.is_empty() {
        return domain("sigma_bounds needs at least one regularisation parameter");
    }
    let (mut s1, mut s2) = (0.0f64, 0.0f64);
    for &eps in eps_list {
        if !(eps >= 0.0) {
            return domain(format!("invalid regularisation parameter {eps}"));
        }
        for i in 0..=m {
            let r = CUTOFF_INNER + (CUTOFF_OUTER - CUTOFF_INNER) * i as f64 / m as f64;
            let (c, dv) = jacobian_bounds(r, eps, p);
            s1 = s1.max(c);
            s2 = s2.max(dv);
        }
    }
    Ok((SIGMA_PAD * s1, SIGMA_PAD * s2))
}

/// `sup_x |b_ε(x)|`, padded by 1%.
///
/// For α < 1 this exceeds κ: the cutoff decays more slowly than `r^{1-α}`
/// grows just outside the unit ball.
pub fn sup_drift(eps: f64, p: &ModelParams) -> f64 {
    let m = 4000;
    let mut s = 0.0f64;
    for i in 0..=m {
        let r = CUTOFF_OUTER * i as f64 / m as f64;
        s = s.max(drift_factor(r, eps, p).0 * r);
    }
    1.01 * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn params() -> ModelParams {
        ModelParams::new(3, 0.5, 1.0).unwrap()
    }

    #[test]
    fn cutoff_profile() {
        assert_eq!(cutoff(0.3), 1.0);
        assert_eq!(cutoff(1.0), 1.0);
        assert_eq!(cutoff(2.0), 0.0);
        assert!((cutoff(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 1..1000 {
            let c = cutoff(1.0 + i as f64 / 1000.0);
            assert!(c <= prev && (0.0..=1.0).contains(&c));
            prev = c;
        }
        for i in 1..200 {
            let r = 1.0 + i as f64 / 200.0;
            let h = 1e-6;
            let fd = (cutoff(r + h) - cutoff(r - h)) / (2.0 * h);
            assert!((fd - cutoff_derivative(r)).abs() < 1e-6, "r={r}");
        }
    }

    #[test]
    fn drift_values() {
        let p = params();
        let b = drift(&[0.5, 0.0, 0.0], &p);
        assert!((b[0] - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(drift(&[3.0, 0.0, 0.0], &p), vec![0.0; 3]);
        assert_eq!(drift(&[0.0; 3], &p), vec![0.0; 3]);
        assert_eq!(drift_eps(&[0.0; 3], 1e-3, &p).unwrap(), vec![0.0; 3]);
        assert!(drift_eps(&[1.0, 0.0, 0.0], 0.0, &p).is_err());
        let tiny = drift_eps(&[0.5, 0.0, 0.0], 1e-300, &p).unwrap();
        assert!((tiny[0] - b[0]).abs() < 1e-15);
        let far = drift_eps(&[2.5, 0.0, 0.0], 0.1, &p).unwrap();
        assert_eq!(far, vec![0.0; 3]);
    }

    #[test]
    fn regularised_drift_converges_uniformly() {
        let p = params();
        let sup_diff = |eps: f64| {
            let mut s = 0.0f64;
            for i in 0..=6000 {
                let r = 3.0 * i as f64 / 6000.0;
                let a = drift_factor(r, eps, &p).0 * r;
                let b = drift_factor(r, 0.0, &p).0 * r;
                s = s.max((a - b).abs());
            }
            s
        };
        let seq: Vec<f64> = [1e-2, 1e-4, 1e-6].iter().map(|&e| sup_diff(e)).collect();
        assert!(seq[0] > seq[1] && seq[1] > seq[2], "{seq:?}");
    }

    #[test]
    fn divergence_formula() {
        let p = params();
        let eps = 1e-4;
        let d0 = div_drift_eps(&[0.0; 3], eps, &p).unwrap();
        assert!((d0 - 3.0 * eps.powf(-0.25)).abs() < 1e-9 * d0);
        let v = div_drift_eps(&[0.5, 0.0, 0.0], eps, &p).unwrap();
        assert!(v >= 2.5 * (0.25f64 + eps).powf(-0.25));

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let h = 1e-5;
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-2.2..2.2)).collect();
            let mut fd = 0.0;
            for i in 0..3 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                fd += (drift_eps(&xp, eps, &p).unwrap()[i] - drift_eps(&xm, eps, &p).unwrap()[i])
                    / (2.0 * h);
            }
            let an = div_drift_eps(&x, eps, &p).unwrap();
            assert!((fd - an).abs() <= 1e-5 * an.abs().max(1.0), "{x:?}: {fd} vs {an}");
        }
    }

    #[test]
    fn sigma_bounds_properties() {
        let zero = ModelParams::new(3, 0.5, 0.0).unwrap();
        assert_eq!(sigma_bounds(&zero, &[1e-2]).unwrap(), (0.0, 0.0));
        let p = params();
        let a = sigma_bounds(&p, &[1e-2]).unwrap();
        let b = sigma_bounds(&p, &[1e-6]).unwrap();
        assert!(((a.0 - b.0) / b.0).abs() < 0.1 && ((a.1 - b.1) / b.1).abs() < 0.1);
        let c = sigma_bounds_on(&p, &[1e-6], 2 * SIGMA_GRID).unwrap();
        assert!(((c.0 - b.0) / b.0).abs() < 0.01 && ((c.1 - b.1) / b.1).abs() < 0.01);
        assert!(sigma_bounds(&p, &[]).is_err());
    }

    #[test]
    fn divergence_bounded_below_by_minus_sigma2() {
        let p = params().with_sigma_bounds(&[1e-2, 1e-4]).unwrap();
        for &eps in &[1e-2, 1e-4] {
            for i in 0..=3000 {
                let r = 3.0 * i as f64 / 3000.0;
                let v = div_drift_eps(&[r, 0.0, 0.0], eps, &p).unwrap();
                assert!(v >= -p.sigma2, "r={r} eps={eps}");
            }
        }
    }

    #[test]
    fn sup_drift_exceeds_kappa_for_small_alpha() {
        let p = params();
        let s = sup_drift(1e-6, &p);
        assert!(s > p.kappa && s < p.kappa * 2f64.powf(1.0 - p.alpha));
        let one = ModelParams::new(3, 1.0, 1.0).unwrap();
        assert!(sup_drift(1e-6, &one) <= 1.01 * one.kappa + 1e-12);
    }
}

//! Pointwise nonlocal operators on radial functions.
//!
//! For `|x| = r` and `z = ρω`, the integrals over `R^d` reduce to
//! `∫_0^∞ dρ ∫_{-1}^{1} dt (1-t²)^{(d-3)/2} …`, with `|x+z|² = (r-ρ)² + 2rρ(1+t)`.
//! The ρ-axis is split where the sphere `|z| = ρ` passes through the origin or
//! through a kink of the profile, and the t-axis where `|x+z|` crosses a kink.

use crate::error::{domain, Result};
use crate::quad::DoubleExponential;
use crate::specfun::{frac_laplacian_constant, gamma_weight, sphere_area};

/// A radial function `f(x) = F(|x|)` on `R^d`.
pub trait RadialProfile: Sync {
    fn value(&self, r: f64) -> f64;
    /// `ΔF(r) = F''(r) + (d-1)F'(r)/r`.
    fn laplacian(&self, r: f64, d: usize) -> f64;
    /// Radii where the profile is not smooth.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
    /// `g` such that `|F(r)| = O(r^g)` as `r → ∞`.
    fn growth(&self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Constant(pub f64);

impl RadialProfile for Constant {
    fn value(&self, _: f64) -> f64 {
        self.0
    }
    fn laplacian(&self, _: f64, _: usize) -> f64 {
        0.0
    }
    fn growth(&self) -> f64 {
        if self.0 == 0.0 {
            f64::NEG_INFINITY
        } else {
            0.0
        }
    }
}

/// `|x|^p`.
#[derive(Debug, Clone, Copy)]
pub struct Power(pub f64);

impl RadialProfile for Power {
    fn value(&self, r: f64) -> f64 {
        r.powf(self.0)
    }
    fn laplacian(&self, r: f64, d: usize) -> f64 {
        self.0 * (self.0 + d as f64 - 2.0) * r.powf(self.0 - 2.0)
    }
    fn kinks(&self) -> Vec<f64> {
        vec![0.0]
    }
    fn growth(&self) -> f64 {
        self.0
    }
}

/// `exp(-|x|²/w²)`.
#[derive(Debug, Clone, Copy)]
pub struct Gaussian(pub f64);

impl RadialProfile for Gaussian {
    fn value(&self, r: f64) -> f64 {
        (-(r / self.0).powi(2)).exp()
    }
    fn laplacian(&self, r: f64, d: usize) -> f64 {
        let w2 = self.0 * self.0;
        (4.0 * r * r / (w2 * w2) - 2.0 * d as f64 / w2) * self.value(r)
    }
    fn growth(&self) -> f64 {
        f64::NEG_INFINITY
    }
}

/// `a·f + b·g`.
pub struct Combination<'a> {
    pub a: f64,
    pub f: &'a dyn RadialProfile,
    pub b: f64,
    pub g: &'a dyn RadialProfile,
}

impl RadialProfile for Combination<'_> {
    fn value(&self, r: f64) -> f64 {
        self.a * self.f.value(r) + self.b * self.g.value(r)
    }
    fn laplacian(&self, r: f64, d: usize) -> f64 {
        self.a * self.f.laplacian(r, d) + self.b * self.g.laplacian(r, d)
    }
    fn kinks(&self) -> Vec<f64> {
        let mut k = self.f.kinks();
        k.extend(self.g.kinks());
        k
    }
    fn growth(&self) -> f64 {
        self.f.growth().max(self.g.growth())
    }
}

/// `|x + z|` for `|x| = r`, `|z| = rho`, with `1 + cos∠(x, z) = one_plus_t`,
/// free of cancellation and overflow.
fn shifted_radius(r: f64, rho: f64, one_plus_t: f64) -> f64 {
    let m = r.max(rho);
    if m == 0.0 {
        return 0.0;
    }
    let (a, b) = (r / m, rho / m);
    m * ((a - b) * (a - b) + 2.0 * a * b * one_plus_t).max(0.0).sqrt()
}

/// Angular parameters `t ∈ (-1, 1)` where `|x + z| = k` for some kink `k`.
fn angular_breaks(r: f64, rho: f64, kinks: &[f64]) -> Vec<f64> {
    let mut br: Vec<f64> = kinks
        .iter()
        .filter(|&&k| k > 0.0)
        .map(|&k| ((k - r) * (k + r) - rho * rho) / (2.0 * r * rho))
        .filter(|t| t.abs() < 1.0 - 1e-14)
        .collect();
    br.sort_by(f64::total_cmp);
    br
}

struct Angular<'a> {
    f: &'a dyn RadialProfile,
    d: usize,
    r: f64,
    kinks: Vec<f64>,
    rule: DoubleExponential,
}

impl Angular<'_> {
    /// `∫_{-1}^{1} [F(|x+z|) - c] (1-t²)^{(d-3)/2} dt`.
    fn integral(&self, rho: f64, c: f64) -> f64 {
        let mut nodes = vec![-1.0];
        nodes.extend(angular_breaks(self.r, rho, &self.kinks));
        nodes.push(1.0);
        let half = 0.5 * (self.d as f64 - 3.0);
        let mut total = 0.0;
        for w in nodes.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let e = self.rule.tanh_sinh(lo, hi, |t, da, db| {
                // distances to ±1 from the absolute endpoints, for accuracy at t → -1
                let one_plus = if lo == -1.0 { da } else { 1.0 + t };
                let one_minus = if hi == 1.0 { db } else { 1.0 - t };
                let wt = if half == 0.0 { 1.0 } else { (one_plus * one_minus).powf(half) };
                (self.f.value(shifted_radius(self.r, rho, one_plus)) - c) * wt
            });
            total += e.value;
        }
        total
    }
}

/// Breakpoints in ρ for the outer integral, restricted to `(lo, ∞)`.
fn radial_breaks(r: f64, kinks: &[f64], lo: f64) -> Vec<f64> {
    let mut br = vec![r];
    for &k in kinks {
        br.push((r - k).abs());
        br.push(r + k);
    }
    br.retain(|&b| b > lo * (1.0 + 1e-12));
    br.sort_by(f64::total_cmp);
    br.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    br
}

/// `∫_a^∞ g(ρ) dρ`, split at `breaks` and continued by an exp-sinh tail.
fn integrate_radially(a: f64, breaks: &[f64], rule: &DoubleExponential, mut g: impl FnMut(f64) -> f64) -> f64 {
    let mut nodes = vec![a];
    nodes.extend(breaks.iter().copied().filter(|&b| b > a));
    let last = *nodes.last().unwrap();
    let tail_start = if last > 0.0 { 2.0 * last } else { 1.0 };
    nodes.push(tail_start);
    let mut total = 0.0;
    for w in nodes.windows(2) {
        total += rule.tanh_sinh(w[0], w[1], |rho, _, _| g(rho)).value;
    }
    total + rule.exp_sinh(tail_start, |rho, _| g(rho)).value
}

/// `(-Δ)^{α/2} f` at a point of radius `r > 0`, from the symmetrised
/// hypersingular integral `-(C/2)∫ (f(x+z) + f(x-z) - 2f(x)) |z|^{-d-α} dz`.
///
/// On `|z| < δ = min(0.1, r/2)` the second-order Taylor term `ρ²|S|ΔF/d` of
/// the spherical mean is subtracted and integrated in closed form.
pub fn frac_laplacian_radial_point(f: &dyn RadialProfile, r: f64, alpha: f64, d: usize) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return domain(format!("radius must be positive, got {r}"));
    }
    if !(alpha > 0.0 && alpha < 2.0) {
        return domain(format!("order must lie in (0, 2), got {alpha}"));
    }
    if d < 2 {
        return domain("radial reduction needs d ≥ 2");
    }
    if f.growth() >= alpha {
        return domain(format!(
            "profile grows like r^{} which is not integrable against |z|^(-d-{alpha})",
            f.growth()
        ));
    }
    let kinks = f.kinks();
    let fr = f.value(r);
    let area = sphere_area(d);
    let ang = Angular { f, d, r, kinks: kinks.clone(), rule: DoubleExponential::with_tolerance(1e-10) };
    let omega = sphere_area(d - 1);
    // spherical mean excess A(ρ) = ∫_S [f(x+ρω) - f(x)] dω, doubled for the symmetric form
    let spherical = |rho: f64| 2.0 * omega * ang.integral(rho, fr);

    let delta = (0.1f64).min(0.5 * r);
    let taylor = area * f.laplacian(r, d) / d as f64;
    let outer_rule = DoubleExponential::with_tolerance(1e-8);

    let floor = 1e-3 * delta;
    let inner_breaks: Vec<f64> = radial_breaks(r, &kinks, floor).into_iter().filter(|&b| b < delta).collect();
    let mut nodes = vec![floor];
    nodes.extend(inner_breaks);
    nodes.push(delta);
    let mut inner = 0.0;
    for w in nodes.windows(2) {
        inner += outer_rule
            .tanh_sinh(w[0], w[1], |rho, _, _| rho.powf(-1.0 - alpha) * (spherical(rho) - taylor * rho * rho))
            .value;
    }
    // the subtracted term integrates to taylor·δ^{2-α}/(2-α) over [0, δ]
    inner += taylor * delta.powf(2.0 - alpha) / (2.0 - alpha);

    let outer = integrate_radially(delta, &radial_breaks(r, &kinks, delta), &outer_rule, |rho| {
        rho.powf(-1.0 - alpha) * spherical(rho)
    });
    let c = frac_laplacian_constant(d, alpha);
    Ok(-0.5 * c * (inner + outer))
}

/// Riesz potential `I_ν f(x) = γ(ν)^{-1} ∫ f(y) |x-y|^{ν-d} dy` at radius `r`.
pub fn riesz_potential_radial(f: &dyn RadialProfile, nu: f64, r: f64, d: usize) -> Result<f64> {
    let df = d as f64;
    if !(nu > 0.0 && nu < df) {
        return domain(format!("Riesz order must lie in (0, {d}), got {nu}"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return domain(format!("radius must be positive, got {r}"));
    }
    if f.growth() + nu >= 0.0 {
        return domain(format!("profile of growth {} is not Riesz-integrable at order {nu}", f.growth()));
    }
    let kinks = f.kinks();
    let ang = Angular { f, d, r, kinks: kinks.clone(), rule: DoubleExponential::with_tolerance(1e-10) };
    let omega = sphere_area(d - 1);
    let rule = DoubleExponential::with_tolerance(1e-8);
    let mut breaks = radial_breaks(r, &kinks, 0.0);
    breaks.retain(|&b| b > 0.0);
    let total = integrate_radially(0.0, &breaks, &rule, |rho| {
        rho.powf(nu - 1.0) * omega * ang.integral(rho, 0.0)
    });
    Ok(total / gamma_weight(nu, d)?)
}

/// `(-Δ)^{α/2}|x|^β + div(κ|x|^{-α}x |x|^β)` at radius `r`; the divergence
/// term is `κ(d+β-α) r^{β-α}`. Vanishes when β solves the exponent equation.
pub fn lyapunov_residual(beta: f64, kappa: f64, r: f64, d: usize, alpha: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < alpha) {
        return domain(format!("beta must lie in (0, {alpha}), got {beta}"));
    }
    let lap = frac_laplacian_radial_point(&Power(beta), r, alpha, d)?;
    Ok(lap + kappa * (d as f64 + beta - alpha) * r.powf(beta - alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma_weight;
    use std::f64::consts::PI;

    fn power_law_coefficient(beta: f64, d: usize, alpha: f64) -> f64 {
        let df = d as f64;
        -beta * (df + beta - 2.0) * gamma_weight(df + beta - 2.0, d).unwrap()
            / gamma_weight(df + beta - alpha, d).unwrap()
    }

    #[test]
    fn annihilates_constants() {
        let v = frac_laplacian_radial_point(&Constant(3.0), 0.7, 0.5, 3).unwrap();
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn power_law() {
        for &(d, alpha, beta, r) in &[(3, 0.5, 0.3, 0.7), (3, 1.0, 0.5, 0.25), (4, 0.75, 0.3, 1.3), (3, 0.5, 0.1, 5.0)] {
            let got = frac_laplacian_radial_point(&Power(beta), r, alpha, d).unwrap();
            let want = power_law_coefficient(beta, d, alpha) * r.powf(beta - alpha);
            assert!(((got - want) / want).abs() < 1e-6, "{d} {alpha} {beta} {r}: {got} vs {want}");
        }
    }

    #[test]
    fn rejects_fast_growth() {
        assert!(frac_laplacian_radial_point(&Power(0.6), 1.0, 0.5, 3).is_err());
        assert!(frac_laplacian_radial_point(&Power(0.3), 0.0, 0.5, 3).is_err());
    }

    /// `(2π)^{-3} ∫ |ξ|^α \hat f(ξ) e^{iξ·x} dξ` for `f = exp(-|x|²)` in 3D.
    fn gaussian_fourier_oracle(alpha: f64, r: f64) -> f64 {
        let rule = DoubleExponential::with_tolerance(1e-13);
        let e = rule.tanh_sinh(0.0, 60.0, |k, _, _| {
            k.powf(alpha + 2.0) * (-k * k / 4.0).exp() * (k * r).sin() / (k * r)
        });
        (2.0 * PI).powi(-3) * 4.0 * PI * PI.powf(1.5) * e.value
    }

    #[test]
    fn gaussian_against_fourier_side() {
        for &alpha in &[0.5, 1.0] {
            for &r in &[0.5, 1.0] {
                let got = frac_laplacian_radial_point(&Gaussian(1.0), r, alpha, 3).unwrap();
                let want = gaussian_fourier_oracle(alpha, r);
                assert!((got - want).abs() < 1e-5 * want.abs().max(1e-3), "{alpha} {r}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn riesz_of_power_law() {
        for &(d, alpha, beta, r) in &[(3, 0.5, 0.3, 0.5), (3, 1.0, 0.5, 1.0), (4, 0.75, 0.2, 2.0)] {
            let nu = 2.0 - alpha;
            let got = riesz_potential_radial(&Power(beta - 2.0), nu, r, d).unwrap();
            let df = d as f64;
            let want = gamma_weight(df + beta - 2.0, d).unwrap() / gamma_weight(df + beta - alpha, d).unwrap()
                * r.powf(beta - alpha);
            assert!(((got - want) / want).abs() < 1e-6, "{d} {alpha} {beta} {r}: {got} vs {want}");
        }
    }

    #[test]
    fn riesz_zero_and_linearity() {
        assert_eq!(riesz_potential_radial(&Constant(0.0), 1.5, 0.8, 3).unwrap(), 0.0);
        assert!(riesz_potential_radial(&Constant(1.0), 1.5, 0.8, 3).is_err());
        let f = Gaussian(1.0);
        let g = Power(-2.5);
        let (a, b) = (0.7, -1.3);
        let comb = Combination { a, f: &f, b, g: &g };
        let lhs = riesz_potential_radial(&comb, 1.5, 0.8, 3).unwrap();
        let rhs = a * riesz_potential_radial(&f, 1.5, 0.8, 3).unwrap()
            + b * riesz_potential_radial(&g, 1.5, 0.8, 3).unwrap();
        assert!((lhs - rhs).abs() < 1e-9 * rhs.abs().max(1.0));
    }
}

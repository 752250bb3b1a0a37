use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::evolve::{GridSolver, SolverConfig};
use crate::fracops::{frac_laplacian_radial_point, GridField, RadialProfile};
use crate::model::{drift_factor, weight_eta, weight_eta_d1, weight_eta_d2, weight_psi_radial, ModelParams};
use crate::quad::DoubleExponential;
use crate::report::CheckReport;

/// `ψ_s` as a radial profile.
struct Psi {
    s: f64,
    beta: f64,
    alpha: f64,
}

impl Psi {
    fn scale(&self) -> f64 {
        self.s.powf(-1.0 / self.alpha)
    }

    fn d1(&self, r: f64) -> f64 {
        self.scale() * weight_eta_d1(r * self.scale(), self.beta)
    }
}

impl RadialProfile for Psi {
    fn value(&self, r: f64) -> f64 {
        weight_eta(r * self.scale(), self.beta)
    }
    fn laplacian(&self, r: f64, d: usize) -> f64 {
        let k = self.scale();
        k * k * weight_eta_d2(r * k, self.beta) + (d as f64 - 1.0) * self.d1(r) / r
    }
    fn kinks(&self) -> Vec<f64> {
        let rad = self.s.powf(1.0 / self.alpha);
        vec![0.0, rad, 2.0 * rad]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaVConfig {
    pub s: f64,
    /// Strictly decreasing.
    pub eps_list: Vec<f64>,
    /// Grid sizes whose radii are sampled: every distinct `|k|h < L` over
    /// the nodes of `[-L, L)^d`, `h = 2L/n`.
    pub n_list: Vec<usize>,
    pub half_width: f64,
}

impl Default for LemmaVConfig {
    fn default() -> Self {
        Self { s: 1.0, eps_list: vec![1e-2, 1e-3, 1e-4], n_list: vec![64, 96], half_width: 8.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaVMeasurement {
    pub n: usize,
    pub eps: f64,
    /// Smallest ĉ with `(Λ^ε)^*ψ ≥ -ĉ s^{-1}ψ - V_ε` at the sampled radii.
    pub c_hat: f64,
    /// Claim constant of the viscous term.
    pub c0: f64,
    /// Claim constant of the transition-annulus term.
    pub c_annulus: f64,
    pub v_l1: f64,
    /// Largest value of the inner-ball term; never positive.
    pub u_max: f64,
}

fn sample_radii(n: usize, half_width: f64) -> Vec<f64> {
    // |k|h over integer vectors k: m = |k|² is a sum of three squares iff it
    // is not of the form 4^a(8b+7)
    let h = 2.0 * half_width / n as f64;
    let m_max = (n / 2) * (n / 2);
    (1..m_max)
        .filter(|&m| {
            let mut m = m;
            while m % 4 == 0 {
                m /= 4;
            }
            m % 8 != 7
        })
        .map(|m| (m as f64).sqrt() * h)
        .collect()
}

/// Pointwise data at one radius that does not depend on ε.
struct Sample {
    r: f64,
    psi: f64,
    dpsi: f64,
    lap: f64,
    frac: f64,
}

/// Audits the lower bound on `(Λ^ε)^*ψ_s`.
///
/// The adjoint operator is evaluated pointwise at radial sample points:
/// `(-Δ)^{α/2}ψ` by singular quadrature, `Δψ` from η'' and
/// `div(b_εψ) = ψ(dφ_ε + rφ_ε') + φ_ε rψ'`. The correction `V_ε = P_ε + |U_ε|
/// + W_ε` uses
/// `P_ε = εc₀1_{|x|≤4^{1/α}}|x|^{β-2}`,
/// `U_ε = 1_{|x|<1}κ(d+β-α)(|x|_ε^{-α} - |x|^{-α})ψ ≤ 0` and
/// `W_ε = c1_{1≤|x|≤2}|b_ε - b|`, with `c₀`, `c` the smallest constants that
/// work on the samples. `‖V_ε‖₁` is integrated by quadrature.
///
/// `measured = [‖V_ε‖₁ for each ε (first n), spread of ĉ]` where the spread is
/// `max ĉ / min ĉ - 1` over all (n, ε). Passes when `‖V_ε‖₁` strictly
/// decreases, the spread is at most 10% and every `U_ε ≤ 0`.
pub fn check_lemma_v(cfg: &LemmaVConfig, p: &ModelParams) -> Result<(CheckReport, Vec<LemmaVMeasurement>)> {
    if cfg.eps_list.is_empty() || cfg.eps_list.windows(2).any(|w| !(w[1] < w[0])) || cfg.eps_list[0] <= 0.0 {
        return domain("eps_list must be positive and strictly decreasing");
    }
    if cfg.n_list.iter().any(|&n| n < 64) {
        return domain("the unit ball is not resolved below n = 64");
    }
    if !(cfg.s > 0.0 && cfg.s <= 2.0) {
        return domain(format!("weight scale must lie in (0, 2], got {}", cfg.s));
    }
    let beta = p.beta()?;
    if beta <= 0.0 {
        return domain("the weight needs a positive exponent (κ > 0)");
    }
    let (d, alpha, kappa, s) = (p.d as f64, p.alpha, p.kappa, cfg.s);
    let psi = Psi { s, beta, alpha };
    let mut out = Vec::new();
    for &n in &cfg.n_list {
        let samples: Vec<Sample> = sample_radii(n, cfg.half_width)
            .into_iter()
            .map(|r| {
                Ok(Sample {
                    r,
                    psi: psi.value(r),
                    dpsi: psi.d1(r),
                    lap: psi.laplacian(r, p.d),
                    frac: frac_laplacian_radial_point(&psi, r, alpha, p.d)?,
                })
            })
            .collect::<Result<_>>()?;
        let reach = 4f64.powf(1.0 / alpha);
        let c0 = samples
            .iter()
            .filter(|q| q.r <= reach)
            .map(|q| q.lap.max(0.0) * q.r.powf(2.0 - beta))
            .fold(0.0, f64::max);
        for &eps in &cfg.eps_list {
            let mut c_annulus = 0.0f64;
            let mut rows = Vec::with_capacity(samples.len());
            for q in &samples {
                let (phi_e, dphi_e) = drift_factor(q.r, eps, p);
                let (phi, dphi) = drift_factor(q.r, 0.0, p);
                let div_bpsi = q.psi * (d * phi_e + q.r * dphi_e) + phi_e * q.r * q.dpsi;
                let adjoint = -eps * q.lap + q.frac + div_bpsi;
                let u = if q.r < 1.0 {
                    kappa * (d + beta - alpha) * ((q.r * q.r + eps).powf(-0.5 * alpha) - q.r.powf(-alpha)) * q.psi
                } else {
                    0.0
                };
                let gap = (phi_e - phi).abs() * q.r;
                if (1.0..=2.0).contains(&q.r) && gap > 0.0 {
                    let diff = q.psi * (d * (phi_e - phi) + q.r * (dphi_e - dphi)) + (phi_e - phi) * q.r * q.dpsi;
                    c_annulus = c_annulus.max((-diff).max(0.0) / gap);
                }
                rows.push((q, adjoint, u, gap));
            }
            let mut c_hat = 0.0f64;
            let mut u_max = f64::NEG_INFINITY;
            for (q, adjoint, u, gap) in &rows {
                let p_term = if q.r <= reach { eps * c0 * q.r.powf(beta - 2.0) } else { 0.0 };
                let w_term = if (1.0..=2.0).contains(&q.r) { c_annulus * gap } else { 0.0 };
                let v = p_term - u + w_term;
                c_hat = c_hat.max(-s * (adjoint + v) / q.psi);
                u_max = u_max.max(*u);
            }
            let v_l1 = v_norm(eps, c0, c_annulus, beta, &psi, p);
            out.push(LemmaVMeasurement { n, eps, c_hat, c0, c_annulus, v_l1, u_max });
        }
    }
    let first: Vec<&LemmaVMeasurement> = out.iter().filter(|m| m.n == cfg.n_list[0]).collect();
    let v: Vec<f64> = first.iter().map(|m| m.v_l1).collect();
    let (lo, hi) = out.iter().fold((f64::INFINITY, 0.0f64), |(a, b), m| (a.min(m.c_hat), b.max(m.c_hat)));
    let spread = if lo > 0.0 { hi / lo - 1.0 } else if hi == 0.0 { 0.0 } else { f64::INFINITY };
    let u_ok = out.iter().all(|m| m.u_max <= 0.0);
    let ok = v.windows(2).all(|w| w[1] < w[0]) && spread <= 0.1 && u_ok;
    let mut rep = CheckReport::new("lemma_v", 0.1)
        .param("s", s)
        .param("beta", beta)
        .param("kappa", kappa)
        .param("alpha", alpha)
        .param("eps_list", cfg.eps_list.clone())
        .param("n_list", cfg.n_list.clone())
        .param("c_hat", out.iter().map(|m| m.c_hat).collect::<Vec<_>>())
        .param("u_nonpositive", u_ok);
    rep.provenance.grid = Some(crate::report::GridInfo { d: p.d, n: cfg.n_list[0], half_width: cfg.half_width });
    rep.measured = v.iter().cloned().chain([spread]).collect();
    rep.bound = v.iter().map(|_| f64::INFINITY).chain([0.1]).collect();
    Ok((super::finish(rep, ok), out))
}

/// `‖P_ε‖₁ + ‖U_ε‖₁ + ‖W_ε‖₁`.
fn v_norm(eps: f64, c0: f64, c_annulus: f64, beta: f64, psi: &Psi, p: &ModelParams) -> f64 {
    let (d, alpha, kappa) = (p.d as f64, p.alpha, p.kappa);
    let area = crate::specfun::sphere_area(p.d);
    let reach = 4f64.powf(1.0 / alpha);
    let rule = DoubleExponential::with_tolerance(1e-10);
    let p_part = eps * c0 * area * reach.powf(beta + d - 2.0) / (beta + d - 2.0);
    let u_part = area
        * kappa
        * (d + beta - alpha)
        * rule
            .tanh_sinh(0.0, 1.0, |r, _, _| (r.powf(-alpha) - (r * r + eps).powf(-0.5 * alpha)) * psi.value(r) * r.powf(d - 1.0))
            .value;
    let w_part = c_annulus
        * area
        * rule
            .tanh_sinh(1.0, 2.0, |r, _, _| (drift_factor(r, eps, p).0 - drift_factor(r, 0.0, p).0).abs() * r.powf(d))
            .value;
    p_part + u_part + w_part
}

/// Weighted `L¹` growth `‖ψ_s u(t)‖₁/‖ψ_s f‖₁` with `u = e^{-tΛ}f`, for
/// `t ∈ {s/2, s}`, against `e^{(ĉ_s/s + σ₂)t}`.
///
/// `c_hat[i]` is the measured constant for `s_list[i]`. `measured` holds, for
/// each (s, t), the largest ratio over `fields` divided by the exponential;
/// bound 1, tolerance 10%.
pub fn check_b3_weighted(s_list: &[f64], c_hat: &[f64], fields: &[GridField], cfg: &SolverConfig, p: &ModelParams) -> Result<CheckReport> {
    if s_list.len() != c_hat.len() || fields.is_empty() {
        return domain("need one measured constant per weight scale and at least one field");
    }
    let p = if p.sigma2 == 0.0 && p.kappa > 0.0 { p.with_sigma_bounds(&[cfg.eps_visc])? } else { *p };
    let beta = p.beta()?;
    let solver = GridSolver::new(*cfg, p)?;
    let mut rep = CheckReport::new("b3_weighted", 0.1)
        .param("s_list", s_list.to_vec())
        .param("c_hat", c_hat.to_vec())
        .param("sigma2", p.sigma2)
        .param("count", fields.len())
        .param("beta", beta);
    rep.provenance = super::grid_provenance(cfg);
    let mut raw = Vec::new();
    for (&s, &c) in s_list.iter().zip(c_hat) {
        let weight = GridField::from_fn(cfg.grid, |x| {
            weight_psi_radial(x.iter().map(|v| v * v).sum::<f64>().sqrt(), s, beta, p.alpha)
        });
        let mut worst = [0.0f64; 2];
        for f in fields {
            let base = weight.zip_map(f, |w, v| w * v).norm_l1();
            let mut z = solver.spectrum(f);
            let mut now = 0.0;
            for (k, &t) in [0.5 * s, s].iter().enumerate() {
                solver.run_spectral(&mut z, t - now, false, |_, _| {})?;
                now = t;
                let u = solver.field(&z);
                let ratio = weight.zip_map(&u, |w, v| w * v).norm_l1() / base;
                worst[k] = worst[k].max(ratio * (-(c / s + p.sigma2) * t).exp());
                raw.push(ratio);
            }
        }
        rep.measured.extend(worst);
        rep.bound.extend([1.0, 1.0]);
    }
    rep.set("max_raw_ratio", raw.iter().cloned().fold(0.0, f64::max));
    let ok = rep.within_bounds();
    Ok(super::finish(rep, ok))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolve::Splitting;
    use crate::fracops::GridSpec;

    #[test]
    fn psi_profile_derivatives() {
        let psi = Psi { s: 0.7, beta: 0.3, alpha: 0.5 };
        for &r in &[0.1, 0.3, 0.6, 0.9, 1.5] {
            let h = 1e-5;
            let fd1 = (psi.value(r + h) - psi.value(r - h)) / (2.0 * h);
            assert!((fd1 - psi.d1(r)).abs() < 1e-6, "{r}");
            let fd2 = (psi.value(r + h) - 2.0 * psi.value(r) + psi.value(r - h)) / (h * h);
            let lap = fd2 + 2.0 * fd1 / r;
            assert!((lap - psi.laplacian(r, 3)).abs() < 1e-3 * (1.0 + lap.abs()), "{r}: {lap}");
        }
    }

    #[test]
    fn sample_radii_cover_the_box() {
        let r = sample_radii(64, 8.0);
        assert_eq!(r[0], 0.25);
        // 7h and 15h are not lattice radii, 3h√3 is
        assert!(!r.iter().any(|&v| (v - 0.25 * 7f64.sqrt()).abs() < 1e-12));
        assert!(r.iter().any(|&v| (v - 0.75 * 3f64.sqrt()).abs() < 1e-12));
        assert!(r.iter().all(|&v| v > 0.0 && v < 8.0));
        assert!(r.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn weight_cancels_without_drift() {
        // κ = 0 and ψ ≡ const: the weighted ratio is the plain L¹ ratio ≤ 1
        let grid = GridSpec::new(3, 16, 4.0).unwrap();
        let cfg = SolverConfig { grid, eps_visc: 0.0, dt: 0.1, t_end: 1.0, splitting: Splitting::Strang, delta_width: 2.5 * grid.h() };
        let p = ModelParams::new(3, 0.5, 0.0).unwrap();
        let fields = super::super::random_smooth_fields(grid, 2, 3);
        let rep = check_b3_weighted(&[1.0], &[0.0], &fields, &cfg, &p).unwrap();
        assert!(rep.passed, "{}", rep.summary());
        assert!(rep.measured.iter().all(|&m| m <= 1.0 + 1e-9));
        let doubled: Vec<GridField> = fields.iter().map(|f| f.map(|v| 2.0 * v)).collect();
        let again = check_b3_weighted(&[1.0], &[0.0], &doubled, &cfg, &p).unwrap();
        for (a, b) in rep.measured.iter().zip(&again.measured) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

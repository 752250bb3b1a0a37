//! Monte Carlo for `dX = b(X)dt + dL`, with `L` the isotropic α-stable
//! process whose generator is `-(-Δ)^{α/2}`.
//!
//! Stable increments are Gaussian vectors subordinated by a one-sided
//! `α/2`-stable variable. Every particle owns a ChaCha stream keyed by the
//! global seed and its index, so ensembles do not depend on how particles are
//! distributed over worker threads.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::ProfileRow;
use crate::model::{drift, sup_drift, ModelParams};
use crate::specfun::sphere_area;

/// One-sided strictly `a`-stable variable with `E e^{-λS} = e^{-λ^a}`,
/// by Kanter's representation.
pub fn sample_one_sided_stable<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    debug_assert!(a > 0.0 && a < 1.0);
    loop {
        let u = PI * rng.random::<f64>();
        let e: f64 = Exp1.sample(rng);
        if u == 0.0 || e == 0.0 {
            continue;
        }
        let s = (a * u).sin() / u.sin().powf(1.0 / a) * (((1.0 - a) * u).sin() / e).powf((1.0 - a) / a);
        if s > 0.0 && s.is_finite() {
            return s;
        }
    }
}

/// Increment with `E e^{iξ·ΔL} = e^{-dt|ξ|^α}`: `√(2S)·N` with
/// `S = dt^{2/α} S_{α/2}` and `N` standard normal in `R^d`.
pub fn sample_stable_increment<R: Rng + ?Sized>(alpha: f64, dt: f64, d: usize, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; d];
    fill_stable_increment(alpha, dt, rng, &mut out);
    out
}

fn fill_stable_increment<R: Rng + ?Sized>(alpha: f64, dt: f64, rng: &mut R, out: &mut [f64]) {
    let s = dt.powf(2.0 / alpha) * sample_one_sided_stable(0.5 * alpha, rng);
    let scale = (2.0 * s).sqrt();
    for v in out.iter_mut() {
        let z: f64 = StandardNormal.sample(rng);
        *v = scale * z;
    }
}

/// `x + b(x)dt + noise·ΔL`. `noise = 1` is the SDE step; `noise = 0` follows
/// the drift alone.
pub fn euler_step_scaled<R: Rng + ?Sized>(x: &mut [f64], dt: f64, noise: f64, rng: &mut R, p: &ModelParams) {
    let b = drift(x, p);
    for (xi, bi) in x.iter_mut().zip(&b) {
        *xi += bi * dt;
    }
    if noise != 0.0 {
        let mut inc = vec![0.0; x.len()];
        fill_stable_increment(p.alpha, dt, rng, &mut inc);
        for (xi, v) in x.iter_mut().zip(&inc) {
            *xi += noise * v;
        }
    }
}

pub fn euler_step<R: Rng + ?Sized>(x: &[f64], dt: f64, rng: &mut R, p: &ModelParams) -> Vec<f64> {
    let mut y = x.to_vec();
    euler_step_scaled(&mut y, dt, 1.0, rng, p);
    y
}

/// Stream of particle `index` under `seed`.
pub fn particle_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCConfig {
    pub n_particles: usize,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    pub start: Vec<f64>,
    /// Radial histogram edges, strictly increasing.
    pub bins: Vec<f64>,
    pub workers: usize,
}

impl MCConfig {
    pub fn validate(&self, p: &ModelParams) -> Result<()> {
        if self.start.len() != p.d {
            return Err(Error::Config(format!("start point has {} coordinates, model has d = {}", self.start.len(), p.d)));
        }
        if self.n_particles == 0 || self.workers == 0 {
            return Err(Error::Config("need at least one particle and one worker".into()));
        }
        if !(self.dt > 0.0 && self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config("dt must be positive and t_end non-negative".into()));
        }
        let step = self.dt * sup_drift(0.0, p);
        if step > 0.01 * (1.0 + 1e-9) {
            return Err(Error::Config(format!("drift displacement per step {step:.4} exceeds 0.01; reduce dt")));
        }
        if self.bins.windows(2).any(|w| !(w[1] > w[0])) || self.bins.first().is_some_and(|&b| b < 0.0) {
            return Err(Error::Config("bin edges must be non-negative and strictly increasing".into()));
        }
        Ok(())
    }

    /// Whole steps, the last one shortened to land on `t_end`.
    fn steps(&self) -> Vec<f64> {
        let full = (self.t_end / self.dt * (1.0 + 1e-12)).floor() as usize;
        let mut v = vec![self.dt; full];
        let rest = self.t_end - full as f64 * self.dt;
        if rest > 1e-12 * self.dt {
            v.push(rest);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble {
    pub d: usize,
    /// Row-major `n_particles × d`.
    pub positions: Vec<f64>,
    pub seed: u64,
    pub workers: usize,
}

impl ParticleEnsemble {
    pub fn len(&self) -> usize {
        self.positions.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn radii(&self) -> Vec<f64> {
        self.positions.chunks(self.d).map(|x| x.iter().map(|v| v * v).sum::<f64>().sqrt()).collect()
    }
}

pub fn simulate_ensemble(cfg: &MCConfig, p: &ModelParams) -> Result<ParticleEnsemble> {
    cfg.validate(p)?;
    let steps = cfg.steps();
    let d = p.d;
    let mut positions = vec![0.0; cfg.n_particles * d];
    let run = |positions: &mut [f64]| {
        positions.par_chunks_mut(d).enumerate().for_each(|(i, x)| {
            x.copy_from_slice(&cfg.start);
            let mut rng = particle_rng(cfg.seed, i as u64);
            for &tau in &steps {
                euler_step_scaled(x, tau, 1.0, &mut rng, p);
            }
        });
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run(&mut positions));
    Ok(ParticleEnsemble { d, positions, seed: cfg.seed, workers: cfg.workers })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityBin {
    pub r_lo: f64,
    pub r_hi: f64,
    pub r_mid: f64,
    pub count: u64,
    pub density: f64,
    pub stderr: f64,
}

impl DensityBin {
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn row(&self) -> ProfileRow {
        ProfileRow { r_mid: self.r_mid, density: self.density, stderr: self.stderr }
    }
}

/// Histogram density `count / (N · shell volume)` with Poisson errors.
/// `r_mid` is the geometric mean of the edges (arithmetic for a bin at 0).
pub fn radial_density(radii: &[f64], d: usize, bins: &[f64]) -> Result<Vec<DensityBin>> {
    if bins.len() < 2 || bins.windows(2).any(|w| !(w[1] > w[0])) || bins[0] < 0.0 {
        return Err(Error::Config("need at least two strictly increasing non-negative edges".into()));
    }
    let mut counts = vec![0u64; bins.len() - 1];
    for &r in radii {
        if r < bins[0] || r >= bins[bins.len() - 1] {
            continue;
        }
        let k = bins.partition_point(|&e| e <= r) - 1;
        counts[k] += 1;
    }
    let n = radii.len().max(1) as f64;
    let c = sphere_area(d) / d as f64;
    Ok(counts
        .iter()
        .enumerate()
        .map(|(k, &m)| {
            let (lo, hi) = (bins[k], bins[k + 1]);
            let vol = c * (hi.powi(d as i32) - lo.powi(d as i32));
            let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
            DensityBin {
                r_lo: lo,
                r_hi: hi,
                r_mid: mid,
                count: m,
                density: m as f64 / (n * vol),
                stderr: (m as f64).sqrt() / (n * vol),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub beta_hat: f64,
    pub stderr: f64,
    pub bins_used: usize,
}

/// Weighted least squares of `ln density` against `ln r` over the populated
/// bins with `r_mid` in `window`. Weights are `(density/stderr)²`, the inverse
/// variance of the log density; the slope error is inflated by the Birge ratio
/// when the scatter exceeds the quoted errors.
pub fn fit_vanishing_exponent(profile: &[ProfileRow], window: (f64, f64)) -> Result<ExponentFit> {
    let pts: Vec<(f64, f64, f64)> = profile
        .iter()
        .filter(|b| b.r_mid >= window.0 && b.r_mid <= window.1 && b.density > 0.0 && b.stderr > 0.0 && b.r_mid > 0.0)
        .map(|b| (b.r_mid.ln(), b.density.ln(), (b.density / b.stderr).powi(2)))
        .collect();
    if pts.len() < 4 {
        return Err(Error::Fit(format!("only {} populated bins in the fit window; need 4", pts.len())));
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::Fit("fit window spans a single radius".into()));
    }
    let slope = sxy / sxx;
    let chi2: f64 = pts.iter().map(|p| p.2 * (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let birge = (chi2 / (pts.len() - 2) as f64).sqrt().max(1.0);
    Ok(ExponentFit { beta_hat: slope, stderr: birge / sxx.sqrt(), bins_used: pts.len() })
}

/// Kolmogorov–Smirnov statistic and asymptotic p-value (with Stephens'
/// small-sample correction) of `samples` against the continuous `cdf`.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut dmax = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        dmax = dmax.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let sn = n.sqrt();
    (dmax, kolmogorov_q((sn + 0.12 + 0.11 / sn) * dmax))
}

/// `Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} e^{-2k²λ²}`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// `P(|X| ≤ R)` for the three-dimensional Cauchy law of `e^{-t|ξ|}`, whose
/// density is `t / (π² (t² + |x|²)²)`.
pub fn cauchy3_radial_cdf(radius: f64, t: f64) -> f64 {
    2.0 / PI * ((radius / t).atan() - radius * t / (t * t + radius * radius))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_sided_samples_are_positive_and_match_levy_law() {
        let mut rng = particle_rng(1, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| sample_one_sided_stable(0.5, &mut rng)).collect();
        assert!(xs.iter().all(|&x| x > 0.0));
        // a = 1/2: P(S ≤ s) = erfc(1/(2√s))
        let (_, p) = ks_test(&xs, |s| statrs::function::erf::erfc(1.0 / (2.0 * s.sqrt())));
        assert!(p > 0.01, "p = {p}");
    }

    #[test]
    fn ks_detects_wrong_law() {
        let mut rng = particle_rng(2, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>().powf(1.2)).collect();
        assert!(ks_test(&xs, |x| x.clamp(0.0, 1.0)).1 < 1e-6);
        let ys: Vec<f64> = (0..20_000).map(|_| rng.random::<f64>()).collect();
        assert!(ks_test(&ys, |x| x.clamp(0.0, 1.0)).1 > 0.01);
    }

    #[test]
    fn cauchy_cdf_limits() {
        assert_eq!(cauchy3_radial_cdf(0.0, 1.0), 0.0);
        assert!((cauchy3_radial_cdf(1e9, 1.0) - 1.0).abs() < 1e-8);
        // derivative matches 4πR² t / (π²(t²+R²)²)
        let (r, t, h) = (0.7, 0.5, 1e-6);
        let fd = (cauchy3_radial_cdf(r + h, t) - cauchy3_radial_cdf(r - h, t)) / (2.0 * h);
        let pdf = 4.0 * PI * r * r * t / (PI * PI * (t * t + r * r).powi(2));
        assert!((fd - pdf).abs() < 1e-8);
    }

    #[test]
    fn drift_only_steps_follow_radial_ode() {
        let p = ModelParams::new(3, 0.5, 1.0).unwrap();
        let mut rng = particle_rng(3, 0);
        let mut x = vec![0.1, 0.0, 0.0];
        let dt = 1e-5;
        for _ in 0..20_000 {
            euler_step_scaled(&mut x, dt, 0.0, &mut rng, &p);
        }
        // inside the unit ball r^α grows linearly: r(t)^α = r0^α + ακt
        let want = (0.1f64.sqrt() + 0.5 * 0.2).powi(2);
        assert!((x[0] - want).abs() < 1e-4, "{} vs {want}", x[0]);
        assert_eq!(x[1], 0.0);
    }

    #[test]
    fn reproducible_and_independent_of_workers() {
        let p = ModelParams::new(3, 0.5, 0.5).unwrap();
        let mut cfg = MCConfig {
            n_particles: 500,
            dt: 0.01,
            t_end: 0.1,
            seed: 42,
            start: vec![1.0, 0.0, 0.0],
            bins: vec![0.0, 1.0],
            workers: 1,
        };
        let a = simulate_ensemble(&cfg, &p).unwrap();
        let b = simulate_ensemble(&cfg, &p).unwrap();
        cfg.workers = 2;
        let c = simulate_ensemble(&cfg, &p).unwrap();
        assert_eq!(a.positions, b.positions);
        assert_eq!(a.positions, c.positions);
        let mut first = particle_rng(42, 0);
        let y = euler_step(&[1.0, 0.0, 0.0], 0.01, &mut first, &p);
        let mut again = particle_rng(42, 0);
        assert_eq!(y, euler_step(&[1.0, 0.0, 0.0], 0.01, &mut again, &p));
        cfg.t_end = 0.0;
        let z = simulate_ensemble(&cfg, &p).unwrap();
        assert!(z.positions.chunks(3).all(|x| x == [1.0, 0.0, 0.0]));
    }

    #[test]
    fn uniform_ball_has_flat_profile_and_mass_bookkeeping() {
        let mut rng = particle_rng(4, 0);
        let mut radii = Vec::new();
        while radii.len() < 200_000 {
            let x: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            if r < 1.0 {
                radii.push(r);
            }
        }
        radii.extend(std::iter::repeat_n(5.0, 10_000));
        let bins: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
        let prof = radial_density(&radii, 3, &bins).unwrap();
        let level = 200_000.0 / (radii.len() as f64 * 4.0 / 3.0 * PI);
        for b in &prof {
            assert!((b.density - level).abs() < 4.0 * b.stderr, "{b:?}");
        }
        let mass: f64 = prof.iter().map(|b| b.density * 4.0 / 3.0 * PI * (b.r_hi.powi(3) - b.r_lo.powi(3))).sum();
        assert!((mass - 200_000.0 / radii.len() as f64).abs() < 1e-12);
    }

    #[test]
    fn fit_recovers_synthetic_exponent() {
        let mut rng = particle_rng(5, 0);
        let rows: Vec<ProfileRow> = (0..12)
            .map(|k| {
                let r = 0.05 * 1.25f64.powi(k);
                let noise: f64 = StandardNormal.sample(&mut rng);
                ProfileRow { r_mid: r, density: 3.0 * r.powf(0.3) * (1.0 + 0.01 * noise), stderr: 0.03 * r.powf(0.3) }
            })
            .collect();
        let fit = fit_vanishing_exponent(&rows, (0.0, 1.0)).unwrap();
        assert!((fit.beta_hat - 0.3).abs() < 0.02, "{fit:?}");
        assert!(fit_vanishing_exponent(&rows[..3], (0.0, 1.0)).is_err());
    }

    #[test]
    fn config_validation() {
        let p = ModelParams::new(3, 0.5, 1.0).unwrap();
        let cfg = MCConfig { n_particles: 10, dt: 0.1, t_end: 1.0, seed: 0, start: vec![0.0; 3], bins: vec![], workers: 1 };
        assert!(cfg.validate(&p).is_err());
        let ok = MCConfig { dt: 0.005, ..cfg.clone() };
        assert!(ok.validate(&p).is_ok());
        assert!(MCConfig { start: vec![0.0; 2], ..ok.clone() }.validate(&p).is_err());
        assert!(MCConfig { bins: vec![0.5, 0.2], ..ok }.validate(&p).is_err());
    }
}

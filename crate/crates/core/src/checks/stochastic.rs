use crate::error::{domain, Result};
use crate::io::ProfileRow;
use crate::mc::{
    cauchy3_radial_cdf, fit_vanishing_exponent, ks_test, particle_rng, radial_density, sample_one_sided_stable,
    sample_stable_increment, simulate_ensemble, MCConfig,
};
use crate::model::ModelParams;
use crate::report::{CheckReport, Provenance};

/// Mean and standard error.
fn mean_se(xs: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut s, mut s2) = (0.0, 0.0, 0.0);
    for x in xs {
        n += 1.0;
        s += x;
        s2 += x * x;
    }
    let m = s / n;
    (m, ((s2 / n - m * m).max(0.0) / (n - 1.0)).sqrt())
}

/// Closed-form laws of the samplers.
///
/// * Laplace transform of the one-sided `α/2`-stable variable at
///   `λ ∈ {0.5, 1, 2}` for `α ∈ {1/2, 1}`;
/// * characteristic function of the three-dimensional increment with
///   `dt = 0.5` at five frequencies for the same α;
/// * Kolmogorov–Smirnov test of `|ΔL|` at `α = 1` against the Cauchy law.
///
/// `measured = [max |z| Laplace, max |z| characteristic function, KS p]`
/// against `[3, 3, 0.01]`; passes when both z-scores are at most 3 and the
/// p-value exceeds 0.01.
pub fn check_sampler_oracles(draws: usize, ks_draws: usize, seed: u64) -> Result<CheckReport> {
    if draws < 100 || ks_draws < 100 {
        return domain("need at least 100 draws per test");
    }
    let mut stream = 0u64;
    let mut next_rng = || {
        stream += 1;
        particle_rng(seed, stream)
    };
    let mut z_laplace = 0.0f64;
    let mut z_cf = 0.0f64;
    let mut details = Vec::new();
    for &alpha in &[0.5, 1.0] {
        let a = 0.5 * alpha;
        let mut rng = next_rng();
        let xs: Vec<f64> = (0..draws).map(|_| sample_one_sided_stable(a, &mut rng)).collect();
        for &lambda in &[0.5f64, 1.0, 2.0] {
            let (m, se) = mean_se(xs.iter().map(|s| (-lambda * s).exp()));
            let want = (-lambda.powf(a)).exp();
            let z = (m - want).abs() / se;
            z_laplace = z_laplace.max(z);
            details.push(serde_json::json!({"test": "laplace", "a": a, "lambda": lambda, "mean": m, "exact": want, "z": z}));
        }
        let dt = 0.5;
        let mut rng = next_rng();
        let incs: Vec<Vec<f64>> = (0..draws).map(|_| sample_stable_increment(alpha, dt, 3, &mut rng)).collect();
        let freqs: [[f64; 3]; 5] =
            [[0.25, 0.0, 0.0], [0.0, 0.5, 0.0], [0.0, 0.0, 1.0], [1.0, 1.0, 0.0], [1.5, -1.5, 2.0]];
        for xi in &freqs {
            let (m, se) = mean_se(incs.iter().map(|v| (xi[0] * v[0] + xi[1] * v[1] + xi[2] * v[2]).cos()));
            let k = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
            let want = (-dt * k.powf(alpha)).exp();
            let z = (m - want).abs() / se;
            z_cf = z_cf.max(z);
            details.push(serde_json::json!({"test": "charfn", "alpha": alpha, "xi": xi, "mean": m, "exact": want, "z": z}));
        }
    }
    let t = 0.5;
    let mut rng = next_rng();
    let radii: Vec<f64> = (0..ks_draws)
        .map(|_| sample_stable_increment(1.0, t, 3, &mut rng).iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let (ks_d, ks_p) = ks_test(&radii, |r| cauchy3_radial_cdf(r, t));
    let mut rep = CheckReport::new("sampler_oracles", 0.0)
        .param("draws", draws)
        .param("ks_draws", ks_draws)
        .param("ks_statistic", ks_d)
        .param("tests", serde_json::Value::Array(details));
    rep.provenance = Provenance { seed: Some(seed), ..Provenance::default() };
    rep.measured = vec![z_laplace, z_cf, ks_p];
    rep.bound = vec![3.0, 3.0, 0.01];
    let ok = z_laplace <= 3.0 && z_cf <= 3.0 && ks_p > 0.01;
    Ok(super::finish(rep, ok))
}

/// Log-spaced edges over `[lo, hi]`.
pub fn log_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    (0..=bins).map(|k| lo * (hi / lo).powf(k as f64 / bins as f64)).collect()
}

/// Small-radius exponent of the SDE density.
///
/// `cfg.bins` are used as histogram edges; the fit window is
/// `window·t^{1/α}`. `measured = [β̂]`, `bound = [β - 2·stderr - 0.1]`;
/// passes when `β̂` is at least the bound. `|β̂ - β|` is reported in `params`.
pub fn check_mc_exponent(cfg: &MCConfig, p: &ModelParams, window: (f64, f64)) -> Result<(CheckReport, Vec<ProfileRow>)> {
    let beta = p.beta()?;
    let scale = cfg.t_end.powf(1.0 / p.alpha);
    let ens = simulate_ensemble(cfg, p)?;
    let bins = radial_density(&ens.radii(), p.d, &cfg.bins)?;
    let rows: Vec<ProfileRow> = bins.iter().map(|b| b.row()).collect();
    let fit = fit_vanishing_exponent(&rows, (window.0 * scale, window.1 * scale));
    let mut rep = CheckReport::new("mc_exponent", 0.0)
        .param("beta", beta)
        .param("kappa", p.kappa)
        .param("alpha", p.alpha)
        .param("n_particles", cfg.n_particles)
        .param("t", cfg.t_end)
        .param("start", cfg.start.clone())
        .param("counts", bins.iter().map(|b| b.count).collect::<Vec<_>>())
        .param("empty_bins", bins.iter().filter(|b| b.is_empty()).count());
    rep.provenance = Provenance { grid: None, dt: Some(cfg.dt), eps: Some(0.0), seed: Some(cfg.seed) };
    match fit {
        Ok(fit) => {
            let bound = beta - 2.0 * fit.stderr - 0.1;
            rep.set("beta_hat", fit.beta_hat);
            rep.set("stderr", fit.stderr);
            rep.set("bins_used", fit.bins_used);
            rep.set("abs_deviation", (fit.beta_hat - beta).abs());
            rep.measured = vec![fit.beta_hat];
            rep.bound = vec![bound];
            let ok = fit.beta_hat >= bound;
            Ok((super::finish(rep, ok), rows))
        }
        Err(e) => {
            rep.set("fit_error", e.to_string());
            rep.measured = vec![f64::NAN];
            rep.bound = vec![f64::NAN];
            Ok((super::finish(rep, false), rows))
        }
    }
}

/// Drift-free ensemble at `α = 1` against the Cauchy law.
///
/// Each populated bin's density is compared with the exact bin average
/// `(F(r_hi) - F(r_lo))/vol`. `measured = [max |z| over bins]`, `bound = [3]`.
pub fn check_cauchy_mc(n_particles: usize, t: f64, seed: u64, workers: usize, edges: &[f64]) -> Result<(CheckReport, Vec<ProfileRow>)> {
    let p = ModelParams::new(3, 1.0, 0.0)?;
    let cfg = MCConfig {
        n_particles,
        dt: t / 10.0,
        t_end: t,
        seed,
        start: vec![0.0; 3],
        bins: edges.to_vec(),
        workers,
    };
    let ens = simulate_ensemble(&cfg, &p)?;
    let radii = ens.radii();
    let bins = radial_density(&radii, 3, edges)?;
    let mut zmax = 0.0f64;
    let mut zs = Vec::new();
    for b in bins.iter().filter(|b| !b.is_empty()) {
        let vol = 4.0 / 3.0 * std::f64::consts::PI * (b.r_hi.powi(3) - b.r_lo.powi(3));
        let exact = (cauchy3_radial_cdf(b.r_hi, t) - cauchy3_radial_cdf(b.r_lo, t)) / vol;
        let z = (b.density - exact).abs() / b.stderr;
        zmax = zmax.max(z);
        zs.push(z);
    }
    let (_, ks_p) = ks_test(&radii, |r| cauchy3_radial_cdf(r, t));
    let mut rep = CheckReport::new("cauchy_mc", 0.0)
        .param("n_particles", n_particles)
        .param("t", t)
        .param("z_scores", zs)
        .param("ks_p", ks_p);
    rep.provenance = Provenance { grid: None, dt: Some(cfg.dt), eps: Some(0.0), seed: Some(seed) };
    rep.measured = vec![zmax];
    rep.bound = vec![3.0];
    let ok = rep.within_bounds();
    Ok((super::finish(rep, ok), bins.iter().map(|b| b.row()).collect()))
}

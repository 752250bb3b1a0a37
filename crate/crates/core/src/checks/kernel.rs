use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::evolve::{heat_kernel_column, GridSolver, RadialConfig, RadialSolver, SolverConfig};
use crate::fracops::{GridField, GridSpec};
use crate::model::{least_squares_slope, ModelParams};
use crate::report::{CheckReport, Provenance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelBoundConfig {
    pub t_list: Vec<f64>,
    /// Source radii as multiples of `t^{1/α}`.
    pub y_fractions: Vec<f64>,
    /// Radial line resolution.
    pub n: usize,
    pub half_width: f64,
    /// Time steps per run.
    pub steps: usize,
}

impl Default for KernelBoundConfig {
    fn default() -> Self {
        Self {
            t_list: vec![0.25, 0.5, 1.0],
            y_fractions: vec![0.05, 0.0889, 0.158, 0.281, 0.5],
            n: 1 << 15,
            half_width: 4.0,
            steps: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelBoundRow {
    pub t: f64,
    pub y: f64,
    /// `sup_x` of the evolved source.
    pub sup: f64,
    /// `sup / (t^{-d/α} E[1 ∧ t^{-β/α}|y|^β])`.
    pub ratio: f64,
    /// The same with `β/2` in place of β.
    pub ratio_half: f64,
}

/// Vanishing of the heat kernel at the singular point.
///
/// For each `t` and source radius `ρ = f·t^{1/α}` a thin Gaussian shell of
/// unit mass at radius ρ is evolved by the radial forward solver (three
/// dimensions). The shell average of the column `x ↦ e^{-tΛ}(x, y)` over
/// `|y| = ρ` is radial, and its supremum over `x` is compared with the
/// envelope `t^{-d/α}[1 ∧ t^{-β/α}|y|^β]` averaged over the shell.
///
/// For every t, `measured` holds the per-decade variation of the ratio,
/// `(max/min)^{1/decades}`, with bound 1.5; then the per-decade change of the
/// `β/2` ratio, `10^{|slope|}` of its log-log fit, with bound 2 (which it must
/// exceed); then the largest ratio. Passes when every variation is below 1.5,
/// every `β/2` change exceeds 2 and all ratios are finite.
pub fn check_kernel_bound(cfg: &KernelBoundConfig, p: &ModelParams) -> Result<(CheckReport, Vec<KernelBoundRow>)> {
    if p.d != 3 {
        return domain("the kernel bound audit runs in three dimensions");
    }
    if cfg.y_fractions.len() < 2 || cfg.t_list.is_empty() || cfg.steps == 0 {
        return domain("need at least two source radii, one time and one step");
    }
    let beta = p.beta()?;
    let df = p.d as f64;
    let mut rows = Vec::new();
    let mut rep = CheckReport::new("kernel_bound", 0.5)
        .param("d", p.d)
        .param("alpha", p.alpha)
        .param("kappa", p.kappa)
        .param("beta", beta)
        .param("t_list", cfg.t_list.clone())
        .param("y_fractions", cfg.y_fractions.clone())
        .param("method", "radial solver, Gaussian shell sources of width max(rho/4, 2.5h)");
    rep.provenance = Provenance {
        grid: Some(crate::report::GridInfo { d: 1, n: cfg.n, half_width: cfg.half_width }),
        dt: None,
        eps: Some(0.0),
        seed: None,
    };
    let (mut variation, mut half_change, mut c_hat) = (Vec::new(), Vec::new(), 0.0f64);
    let mut excluded = Vec::new();
    for &t in &cfg.t_list {
        let rc = RadialConfig { n: cfg.n, half_width: cfg.half_width, dt: t / cfg.steps as f64, eps_visc: 0.0 };
        let solver = RadialSolver::new(rc, *p)?;
        let h = rc.h();
        let scale = t.powf(1.0 / p.alpha);
        let mut block = Vec::new();
        for &f in &cfg.y_fractions {
            let rho = f * scale;
            if rho < 3.0 * h {
                excluded.push(serde_json::json!({"t": t, "y": rho}));
                continue;
            }
            let u0 = solver.shell(rho, (0.25 * rho).max(2.5 * h));
            let u = solver.evolve_forward(&u0, t)?;
            let sup = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let envelope = |b: f64| -> f64 {
                let nodes = solver.nodes();
                let mut acc = 0.0;
                for (j, &s) in nodes.iter().enumerate().skip(cfg.n / 2) {
                    let w = 4.0 * PI * s * s * u0[j] * h;
                    acc += w * (t.powf(-b / p.alpha) * s.powf(b)).min(1.0);
                }
                t.powf(-df / p.alpha) * acc
            };
            let row = KernelBoundRow { t, y: rho, sup, ratio: sup / envelope(beta), ratio_half: sup / envelope(0.5 * beta) };
            c_hat = c_hat.max(row.ratio);
            block.push(row);
        }
        if block.len() < 2 {
            return Err(Error::Resolution(format!("fewer than two resolved source radii at t = {t}")));
        }
        let ly: Vec<f64> = block.iter().map(|r| r.y.log10()).collect();
        let decades = ly[ly.len() - 1] - ly[0];
        let (lo, hi) = block.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r.ratio), b.max(r.ratio)));
        variation.push((hi / lo).powf(1.0 / decades));
        let lh: Vec<f64> = block.iter().map(|r| r.ratio_half.log10()).collect();
        half_change.push(10f64.powf(least_squares_slope(&ly, &lh).abs()));
        rows.extend(block);
    }
    rep.set("excluded", serde_json::Value::Array(excluded));
    rep.set("c_hat", c_hat);
    rep.set("variation_per_decade", variation.clone());
    rep.set("half_exponent_change_per_decade", half_change.clone());
    let ok = variation.iter().all(|&v| v < 1.5) && half_change.iter().all(|&g| g > 2.0) && c_hat.is_finite();
    rep.measured = variation.iter().chain(&half_change).cloned().chain([c_hat]).collect();
    rep.bound = std::iter::repeat_n(1.5, variation.len())
        .chain(std::iter::repeat_n(2.0, half_change.len()))
        .chain([f64::INFINITY])
        .collect();
    Ok((super::finish(rep, ok), rows))
}

/// Sign of a grid column. `measured = [-min/sup, clipped mass fraction]`,
/// `bound = [1e-4, 1e-4]`; passes when `min ≥ -1e-4·sup`.
pub fn check_kernel_nonnegativity(cfg: &SolverConfig, p: &ModelParams, t: f64, y: &[f64]) -> Result<CheckReport> {
    let solver = GridSolver::new(*cfg, *p)?;
    let col = heat_kernel_column(&solver, y, t)?;
    let (min, sup) = (col.min(), col.max());
    let negative: f64 = col.values.iter().map(|v| (-v).max(0.0)).sum::<f64>() * cfg.grid.cell_volume();
    let clipped = negative / col.norm_l1();
    let mut rep = CheckReport::new("kernel_nonnegativity", 0.0)
        .param("t", t)
        .param("y", y.to_vec())
        .param("kappa", p.kappa)
        .param("alpha", p.alpha)
        .param("min", min)
        .param("sup", sup);
    rep.provenance = super::grid_provenance(cfg);
    rep.measured = vec![(-min / sup).max(0.0), clipped];
    rep.bound = vec![1e-4, 1e-4];
    let ok = min >= -1e-4 * sup;
    Ok(super::finish(rep, ok))
}

/// Radial profile of the three-dimensional Cauchy density `e^{-t|ξ|}`
/// convolved with a Gaussian of standard deviation `w`.
struct MollifiedCauchy {
    t: f64,
    w: f64,
    step: f64,
    table: Vec<f64>,
}

const TABLE_RADIUS: f64 = 16.0;

impl MollifiedCauchy {
    /// `(2π²r)^{-1} ∫_0^∞ k sin(kr) e^{-tk - w²k²/2} dk` by composite Simpson.
    fn new(t: f64, w: f64) -> Self {
        let kmax = (90.0f64).sqrt() / w;
        let m = 8192usize;
        let dk = kmax / m as f64;
        let weights: Vec<f64> = (0..=m)
            .map(|i| {
                let k = i as f64 * dk;
                let s = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                s * dk / 3.0 * k * (-t * k - 0.5 * w * w * k * k).exp()
            })
            .collect();
        let step = 0.004;
        let count = (TABLE_RADIUS / step) as usize + 2;
        let table = (0..count)
            .map(|j| {
                let r = j as f64 * step;
                let sum: f64 = if r == 0.0 {
                    weights.iter().enumerate().map(|(i, c)| c * i as f64 * dk).sum()
                } else {
                    weights.iter().enumerate().map(|(i, c)| c * (i as f64 * dk * r).sin() / r).sum()
                };
                sum / (2.0 * PI * PI)
            })
            .collect();
        Self { t, w, step, table }
    }

    fn value(&self, r: f64) -> f64 {
        if r < TABLE_RADIUS {
            let s = r / self.step;
            let j = s.floor() as usize;
            let f = s - j as f64;
            self.table[j] * (1.0 - f) + self.table[j + 1] * f
        } else {
            // K + (w²/2)ΔK for the unmollified K = t/(π²(t²+r²)²)
            let (t, q) = (self.t, self.t * self.t + r * r);
            let c = t / (PI * PI);
            let k = c / (q * q);
            let lap = -12.0 * c / q.powi(3) + 24.0 * c * r * r / q.powi(4);
            k + 0.5 * self.w * self.w * lap
        }
    }
}

/// Periodisation over `[-L, L)^3` of the Gaussian-mollified Cauchy density
/// centred at the origin: images with `|m|_∞ ≤ 2`, and the mass of the
/// remaining images spread uniformly.
pub fn mollified_cauchy_periodic(spec: GridSpec, t: f64, width: f64) -> Result<GridField> {
    if spec.d != 3 {
        return domain("the closed-form Cauchy oracle is three-dimensional");
    }
    let k = MollifiedCauchy::new(t, width);
    let period = 2.0 * spec.half_width;
    let images = 2i32;
    let mut f = GridField::from_fn(spec, |x| {
        let mut acc = 0.0;
        for a in -images..=images {
            for b in -images..=images {
                for c in -images..=images {
                    let y = [x[0] + period * a as f64, x[1] + period * b as f64, x[2] + period * c as f64];
                    acc += k.value((y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt());
                }
            }
        }
        acc
    });
    let rest = (1.0 - f.integral()) / period.powi(3);
    f.values.iter_mut().for_each(|v| *v += rest);
    Ok(f)
}

/// Drift-free kernel at `α = 1` against the closed form.
/// `measured = [‖u - K‖₁/‖K‖₁]`, `bound = [0.02]`.
pub fn check_cauchy_pde(cfg: &SolverConfig, t: f64) -> Result<CheckReport> {
    let p = ModelParams::new(3, 1.0, 0.0)?;
    let solver = GridSolver::new(*cfg, p)?;
    let u = heat_kernel_column(&solver, &[0.0; 3], t)?;
    let oracle = mollified_cauchy_periodic(cfg.grid, t, cfg.delta_width)?;
    let err = u.zip_map(&oracle, |a, b| a - b).norm_l1() / oracle.norm_l1();
    let mut rep = CheckReport::new("cauchy_pde", 0.0).param("t", t).param("alpha", 1.0).param("kappa", 0.0);
    rep.provenance = super::grid_provenance(cfg);
    rep.measured = vec![err];
    rep.bound = vec![0.02];
    let ok = rep.within_bounds();
    Ok(super::finish(rep, ok))
}

use crate::error::{domain, Result};
use crate::evolve::{mollified_delta, GridSolver, SolverConfig};
use crate::fracops::{apply_symbol, gradient_spectral, GridField};
use crate::model::{drift_factor, ModelParams};
use crate::report::CheckReport;

fn with_sigma(p: &ModelParams, eps: f64) -> Result<ModelParams> {
    if p.kappa > 0.0 && p.sigma1 == 0.0 && p.sigma2 == 0.0 {
        p.with_sigma_bounds(&[eps])
    } else {
        Ok(*p)
    }
}

/// Gradient growth `‖∇u(t)‖₂/‖∇f‖₂` against `e^{tω₃}`, `ω₃ = σ₁d + σ₂/2`,
/// at every step up to `t_end`.
///
/// `measured = [max_t ratio·e^{-tω₃}]`, `bound = [1]`, tolerance 5%.
/// σ bounds are measured for the solver's ε when `p` carries none.
pub fn check_claim1_gradient(f: &GridField, t_end: f64, cfg: &SolverConfig, p: &ModelParams) -> Result<CheckReport> {
    let p = with_sigma(p, cfg.eps_visc)?;
    let solver = GridSolver::new(*cfg, p)?;
    let (_, series) = solver.evolve_forward(f, t_end)?;
    let omega3 = p.sigma1 * p.d as f64 + 0.5 * p.sigma2;
    let g0 = series[0].grad_l2;
    if !(g0 > 0.0) {
        return domain("initial field has zero gradient");
    }
    let ratios: Vec<f64> = series.iter().map(|s| s.grad_l2 / g0).collect();
    let worst = series.iter().zip(&ratios).map(|(s, r)| r * (-s.t * omega3).exp()).fold(0.0, f64::max);
    let mut rep = CheckReport::new("claim1_gradient", 0.05)
        .param("kappa", p.kappa)
        .param("alpha", p.alpha)
        .param("sigma1", p.sigma1)
        .param("sigma2", p.sigma2)
        .param("omega3", omega3)
        .param("t_end", t_end)
        .param("max_ratio", ratios.iter().cloned().fold(0.0, f64::max))
        .param("final_ratio", *ratios.last().expect("series is never empty"));
    rep.provenance = super::grid_provenance(cfg);
    rep.measured = vec![worst];
    rep.bound = vec![1.0];
    let ok = rep.within_bounds();
    Ok(super::finish(rep, ok))
}

/// ε-Cauchy property of the regularised flows.
///
/// Solutions for consecutive ε in `eps_list` (strictly decreasing) are
/// advanced in lockstep and `D_i = sup_{t ≤ t_end} ‖u_{ε_i} - u_{ε_{i+1}}‖₂`
/// recorded. The splitting floor is `sup_t ‖u_dt - u_{dt/2}‖₂` at the
/// smallest ε. `measured = [D_1, …, D_m, floor]`; passes when each `D_{i+1}`
/// is below `D_i` or both are already at the floor.
pub fn check_claim2_cauchy(eps_list: &[f64], f: &GridField, t_end: f64, cfg: &SolverConfig, p: &ModelParams) -> Result<CheckReport> {
    if eps_list.len() < 2 || eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return domain("eps_list must hold at least two strictly decreasing values");
    }
    let solvers: Vec<GridSolver> = eps_list
        .iter()
        .map(|&e| GridSolver::new(SolverConfig { eps_visc: e, ..*cfg }, *p))
        .collect::<Result<_>>()?;
    let last = *eps_list.last().expect("checked non-empty");
    let fine = GridSolver::new(SolverConfig { eps_visc: last, dt: 0.5 * cfg.dt, ..*cfg }, *p)?;
    let z0 = solvers[0].spectrum(f);
    let mut states = vec![z0.clone(); solvers.len()];
    let mut fine_state = z0;
    let mut diffs = vec![0.0f64; solvers.len() - 1];
    let mut floor = 0.0f64;
    let steps = (t_end / cfg.dt).round().max(1.0) as usize;
    let tau = t_end / steps as f64;
    for _ in 0..steps {
        for (s, z) in solvers.iter().zip(states.iter_mut()) {
            s.step_spectral(z, tau, false);
        }
        fine.step_spectral(&mut fine_state, 0.5 * tau, false);
        fine.step_spectral(&mut fine_state, 0.5 * tau, false);
        for i in 0..diffs.len() {
            diffs[i] = diffs[i].max(solvers[0].l2_distance(&states[i], &states[i + 1]));
        }
        floor = floor.max(solvers[0].l2_distance(&states[states.len() - 1], &fine_state));
    }
    let ok = diffs.windows(2).all(|w| w[1] < w[0] || w[0].max(w[1]) <= floor);
    let mut rep = CheckReport::new("claim2_cauchy", 0.0)
        .param("eps_list", eps_list.to_vec())
        .param("kappa", p.kappa)
        .param("alpha", p.alpha)
        .param("t_end", t_end)
        .param("splitting_floor", floor)
        .param("step", tau);
    rep.provenance = super::grid_provenance(cfg);
    rep.measured = diffs.iter().cloned().chain([floor]).collect();
    rep.bound = diffs.iter().map(|_| f64::INFINITY).chain([f64::INFINITY]).collect();
    Ok(super::finish(rep, ok))
}

/// `‖u(t)‖_r/‖f‖_r` against `e^{σ₂t/r}` (1 for `r = ∞`) at every step.
///
/// `measured[i] = max_t ratio_r·e^{-σ₂t/r}` for `r = r_list[i]`, bound 1;
/// tolerance 5% for finite r and 1% for `r = ∞`.
pub fn check_lr_contraction(r_list: &[f64], f: &GridField, t_end: f64, cfg: &SolverConfig, p: &ModelParams) -> Result<CheckReport> {
    if r_list.is_empty() || r_list.iter().any(|&r| !(r >= 1.0)) {
        return domain("exponents must be at least 1");
    }
    let p = with_sigma(p, cfg.eps_visc)?;
    let solver = GridSolver::new(*cfg, p)?;
    let norm = |u: &GridField, r: f64| if r.is_infinite() { u.norm_linf() } else { u.norm_lr(r) };
    let base: Vec<f64> = r_list.iter().map(|&r| norm(f, r)).collect();
    let mut worst = vec![0.0f64; r_list.len()];
    let mut z = solver.spectrum(f);
    let mut record = |t: f64, z: &[num_complex::Complex64]| {
        let u = solver.field(z);
        for (i, &r) in r_list.iter().enumerate() {
            let v = norm(&u, r) / base[i] * (-p.sigma2 * t / r).exp();
            worst[i] = worst[i].max(v);
        }
    };
    record(0.0, &z);
    solver.run_spectral(&mut z, t_end, false, |t, z| record(t, z))?;
    let mut rep = CheckReport::new("lr_contraction", 0.05)
        .param("r_list", r_list.iter().map(|r| if r.is_infinite() { -1.0 } else { *r }).collect::<Vec<_>>())
        .param("sigma2", p.sigma2)
        .param("kappa", p.kappa)
        .param("t_end", t_end);
    rep.provenance = super::grid_provenance(cfg);
    rep.measured = worst.clone();
    rep.bound = vec![1.0; r_list.len()];
    let ok = r_list.iter().zip(&worst).all(|(r, w)| *w <= if r.is_infinite() { 1.01 } else { 1.05 });
    Ok(super::finish(rep, ok))
}

/// Smoothing `L^r → L^q` from a mollified point mass at `y`.
///
/// At each `t` in `t_list` with `t ≥ (3h)^α` the constant
/// `t^{(d/α)(1/r-1/q)}‖u(t)‖_q/‖f‖_r` is measured. `measured =
/// [max constant / constant at the largest t]`, `bound = [1]` with tolerance
/// 10%: no growth as t decreases. The constants are in `params`.
pub fn check_ultracontractivity(
    y: &[f64],
    t_list: &[f64],
    r: f64,
    q: f64,
    cfg: &SolverConfig,
    p: &ModelParams,
) -> Result<CheckReport> {
    if !(r >= 1.0 && q > r) {
        return domain(format!("need 1 ≤ r < q, got r = {r}, q = {q}"));
    }
    let solver = GridSolver::new(*cfg, *p)?;
    let f = mollified_delta(cfg.grid, y, cfg.delta_width)?;
    let norm = |u: &GridField, e: f64| if e.is_infinite() { u.norm_linf() } else { u.norm_lr(e) };
    let fr = norm(&f, r);
    let expo = p.d as f64 / p.alpha * (1.0 / r - if q.is_infinite() { 0.0 } else { 1.0 / q });
    let floor = (3.0 * cfg.grid.h()).powf(p.alpha);
    let mut times: Vec<f64> = t_list.to_vec();
    times.sort_by(f64::total_cmp);
    let mut z = solver.spectrum(&f);
    let (mut now, mut kept, mut consts, mut excluded) = (0.0, Vec::new(), Vec::new(), Vec::new());
    for &t in &times {
        solver.run_spectral(&mut z, t - now, false, |_, _| {})?;
        now = t;
        if t < floor {
            excluded.push(t);
            continue;
        }
        kept.push(t);
        consts.push(t.powf(expo) * norm(&solver.field(&z), q) / fr);
    }
    if consts.is_empty() {
        return domain(format!("no time in the list is resolvable (t ≥ {floor:.3})"));
    }
    let top = *consts.last().expect("non-empty");
    let growth = consts.iter().cloned().fold(0.0, f64::max) / top;
    let mut rep = CheckReport::new("ultracontractivity", 0.1)
        .param("r", r)
        .param("q", if q.is_infinite() { -1.0 } else { q })
        .param("times", kept)
        .param("constants", consts)
        .param("excluded_times", excluded)
        .param("kappa", p.kappa)
        .param("alpha", p.alpha);
    rep.provenance = super::grid_provenance(cfg);
    rep.measured = vec![growth];
    rep.bound = vec![1.0];
    let ok = rep.within_bounds();
    Ok(super::finish(rep, ok))
}

/// `Re⟨Λ^ε u, u⟩ / ‖u‖²_{2d/(d-α)}` on the grid, with the drift term
/// `-⟨b_ε·∇u, u⟩` from the dealiased spectral gradient.
pub(crate) fn sobolev_quotient(u: &GridField, eps: f64, p: &ModelParams) -> f64 {
    let spec = u.spec;
    let diffusion = apply_symbol(u, p.alpha, eps).inner(u);
    let mut transport = 0.0;
    if p.kappa > 0.0 {
        let grad = gradient_spectral(u);
        let mut x = vec![0.0; spec.d];
        for i in 0..spec.len() {
            spec.point(i, &mut x);
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let phi = drift_factor(r, eps, p).0;
            let b_grad: f64 = (0..spec.d).map(|k| phi * x[k] * grad[k].values[i]).sum();
            transport += b_grad * u.values[i];
        }
        transport *= spec.cell_volume();
    }
    let pexp = 2.0 * p.d as f64 / (p.d as f64 - p.alpha);
    (diffusion - transport) / u.norm_lr(pexp).powi(2)
}

/// Minimum Sobolev quotient over `fields`. `measured = [min quotient]`,
/// `bound = [0]`; passes when the minimum is positive.
pub fn check_sobolev_ratio(fields: &[GridField], cfg: &SolverConfig, p: &ModelParams) -> Result<CheckReport> {
    if fields.is_empty() {
        return domain("need at least one test field");
    }
    let quotients: Vec<f64> = fields.iter().map(|u| sobolev_quotient(u, cfg.eps_visc, p)).collect();
    let min = quotients.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut rep = CheckReport::new("sobolev_ratio", 0.0)
        .param("count", fields.len())
        .param("kappa", p.kappa)
        .param("alpha", p.alpha)
        .param("max", quotients.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    rep.provenance = super::grid_provenance(cfg);
    rep.measured = vec![min];
    rep.bound = vec![0.0];
    Ok(super::finish(rep, min > 0.0))
}

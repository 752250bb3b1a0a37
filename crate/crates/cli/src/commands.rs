//! Subcommand drivers.

use fracdrift::checks::*;
use fracdrift::evolve::{GridSolver, SolverConfig};
use fracdrift::fracops::GridField;
use fracdrift::io::{encode_field_snapshot, write_beta_curve_csv, write_norm_series_csv, write_profile_csv};
use fracdrift::model::ModelParams;
use fracdrift::report::CheckReport;

use crate::config::{Format, RunConfig};
use crate::output::{write_table, Sink};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    BetaCurve,
    Lyapunov,
    KernelBound,
    Convergence,
    Weights,
    Sde,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::BetaCurve => "beta-curve",
            Command::Lyapunov => "lyapunov",
            Command::KernelBound => "kernel-bound",
            Command::Convergence => "convergence",
            Command::Weights => "weights",
            Command::Sde => "sde",
            Command::VerifyAll => "verify-all",
        }
    }

    /// Only `verify-all` turns failed checks into a non-zero exit code; the
    /// other subcommands report.
    pub fn strict(self) -> bool {
        self == Command::VerifyAll
    }
}

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub threads: usize,
    pub sink: Sink,
    pub reports: Vec<CheckReport>,
}

impl Context<'_> {
    fn emit(&mut self, rep: CheckReport) -> Result<(), CliError> {
        if self.cfg.emits(Format::Json) {
            self.sink.report(&rep)?;
        }
        self.reports.push(rep);
        Ok(())
    }

    fn csv(&self) -> bool {
        self.cfg.emits(Format::Csv)
    }
}

/// Centred bump used as the initial datum of the convergence runs.
fn bump(cfg: &SolverConfig) -> GridField {
    smooth_bump(cfg.grid, &[0.3, 0.0, 0.0], 1.5)
}

/// `[10ε, ε, ε/10]` for the configured viscosity.
fn eps_ladder(eps: f64) -> Vec<f64> {
    vec![10.0 * eps, eps, 0.1 * eps]
}

fn failed(name: &str, err: &fracdrift::Error) -> CheckReport {
    CheckReport::new(name, 0.0).param("error", err.to_string())
}

pub fn run(cmd: Command, ctx: &mut Context) -> Result<(), CliError> {
    let p = ctx.cfg.model()?;
    match cmd {
        Command::BetaCurve => beta_curve(ctx, &p),
        Command::Lyapunov => lyapunov(ctx, &p),
        Command::KernelBound => kernel_bound(ctx, &p),
        Command::Convergence => convergence(ctx, &p),
        Command::Weights => weights(ctx, &p),
        Command::Sde => sde(ctx, &p),
        Command::VerifyAll => verify_all(ctx, &p),
    }
}

fn beta_curve(ctx: &mut Context, p: &ModelParams) -> Result<(), CliError> {
    let s = &ctx.cfg.sweep;
    let (rep, rows) = check_beta_curve(p, s.kappa_min, s.kappa_max, s.count).map_err(CliError::usage)?;
    if ctx.csv() {
        let triples: Vec<(f64, f64, f64)> = rows.iter().map(|r| (r.kappa, r.beta, r.residual)).collect();
        ctx.sink.text("beta_curve.csv", |w, prov| write_beta_curve_csv(w, &triples, prov))?;
    }
    ctx.emit(rep)
}

fn lyapunov(ctx: &mut Context, p: &ModelParams) -> Result<(), CliError> {
    let rep = check_lyapunov(p, &ctx.cfg.sweep.radii, ctx.cfg.checks.tolerances.lyapunov)?;
    ctx.emit(rep)
}

fn kernel_bound(ctx: &mut Context, p: &ModelParams) -> Result<(), CliError> {
    let (rep, rows) = check_kernel_bound(&KernelBoundConfig::default(), p)?;
    if ctx.csv() {
        let table: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.t, r.y, r.sup, r.ratio, r.ratio_half]).collect();
        ctx.sink.text("kernel_bound.csv", |w, prov| write_table(w, prov, "t,y,sup,ratio,ratio_half", &table))?;
    }
    ctx.emit(rep)
}

fn convergence(ctx: &mut Context, p: &ModelParams) -> Result<(), CliError> {
    let cfg = ctx.cfg.solver_config()?;
    let f = bump(&cfg);
    let t_end = cfg.t_end;
    let solver_p = if p.kappa > 0.0 { p.with_sigma_bounds(&[cfg.eps_visc])? } else { *p };
    let (u, series) = GridSolver::new(cfg, solver_p)?.evolve_forward(&f, t_end)?;
    if ctx.csv() {
        ctx.sink.text("norms.csv", |w, prov| write_norm_series_csv(w, &series, prov))?;
    }
    if ctx.cfg.emits(Format::Bin) {
        let data = encode_field_snapshot(&u, &ctx.sink.stamp.lines())?;
        ctx.sink.bytes("field_final.bin", &data)?;
    }
    ctx.emit(check_claim1_gradient(&f, t_end, &cfg, p)?)?;
    ctx.emit(check_claim2_cauchy(&eps_ladder(cfg.eps_visc), &f, t_end, &cfg, p)?)?;
    ctx.emit(check_lr_contraction(&[1.0, 2.0, f64::INFINITY], &f, t_end, &cfg, p)?)?;
    let fields = random_smooth_fields(cfg.grid, 4, ctx.cfg.mc.seed);
    ctx.emit(check_sobolev_ratio(&fields, &cfg, p)?)
}

fn weights(ctx: &mut Context, p: &ModelParams) -> Result<(), CliError> {
    let beta = p.beta()?;
    ctx.emit(check_weights(beta, p)?)
}

fn sde(ctx: &mut Context, p: &ModelParams) -> Result<(), CliError> {
    let mc = ctx.cfg.mc_config(ctx.threads)?;
    let [lo, hi] = ctx.cfg.mc.window;
    let (rep, rows) = check_mc_exponent(&mc, p, (lo, hi))?;
    if ctx.csv() {
        ctx.sink.text("profile.csv", |w, prov| write_profile_csv(w, &rows, prov))?;
    }
    ctx.emit(rep)
}

fn verify_all(ctx: &mut Context, p: &ModelParams) -> Result<(), CliError> {
    let cfg = ctx.cfg.clone();
    let solver = cfg.solver_config()?;
    let seed = cfg.mc.seed;
    let eps = solver.eps_visc;
    for name in crate::config::CHECK_NAMES {
        if !cfg.wants(name) {
            continue;
        }
        let outcome: fracdrift::Result<Vec<CheckReport>> = (|| {
            Ok(match name {
                "beta_curve" => vec![check_beta_curve(p, cfg.sweep.kappa_min, cfg.sweep.kappa_max, cfg.sweep.count)?.0],
                "lyapunov" => vec![check_lyapunov(p, &cfg.sweep.radii, cfg.checks.tolerances.lyapunov)?],
                "cauchy" => vec![
                    check_cauchy_pde(&solver, 0.5)?,
                    check_cauchy_mc(100_000, 0.5, seed, ctx.threads, &log_edges(0.02, 5.0, 12))?.0,
                ],
                "kernel_bound" => vec![check_kernel_bound(&KernelBoundConfig::default(), p)?.0],
                "gradient" => vec![check_claim1_gradient(&bump(&solver), solver.t_end, &solver, p)?],
                "eps_cauchy" => vec![check_claim2_cauchy(&eps_ladder(eps), &bump(&solver), solver.t_end, &solver, p)?],
                "weights" => vec![check_weights(p.beta()?, p)?],
                "lemma_v" => {
                    let n = cfg.grid.n;
                    let lc = LemmaVConfig { s: 1.0, eps_list: eps_ladder(eps), n_list: vec![n, n + n / 2], half_width: cfg.grid.half_width };
                    vec![check_lemma_v(&lc, p)?.0]
                }
                "b3_weighted" => {
                    let s_list = [0.5, 1.0, 2.0];
                    let mut c_hat = Vec::new();
                    for &s in &s_list {
                        let lc = LemmaVConfig { s, eps_list: vec![eps], n_list: vec![cfg.grid.n], half_width: cfg.grid.half_width };
                        c_hat.push(check_lemma_v(&lc, p)?.1[0].c_hat);
                    }
                    let fields = random_smooth_fields(solver.grid, 10, seed);
                    vec![check_b3_weighted(&s_list, &c_hat, &fields, &solver, p)?]
                }
                "mc_exponent" => {
                    let [lo, hi] = cfg.mc.window;
                    vec![check_mc_exponent(&cfg.mc_config(ctx.threads).map_err(|e| fracdrift::Error::Config(e.to_string()))?, p, (lo, hi))?.0]
                }
                "sampler" => vec![check_sampler_oracles(1_000_000, 100_000, seed)?],
                other => unreachable!("unlisted check {other}"),
            })
        })();
        let reps = match outcome {
            Ok(r) => r,
            Err(e) => vec![failed(name, &e)],
        };
        for rep in reps {
            eprintln!("{}", rep.summary());
            ctx.emit(rep)?;
        }
    }
    let summary: Vec<(String, bool)> = ctx.reports.iter().map(|r| (r.name.clone(), r.passed)).collect();
    if ctx.cfg.emits(Format::Json) {
        ctx.sink.json("summary.json", &summary)?;
    }
    Ok(())
}

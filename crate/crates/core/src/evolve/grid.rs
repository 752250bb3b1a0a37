use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fracops::{gradient_l2_spectral, FftN, GridField, GridSpec, Wavenumbers};
use crate::model::{drift_factor, sup_drift, weight_psi_radial, ModelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    Lie,
    Strang,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: GridSpec,
    /// Viscosity, also used as the drift regularisation parameter.
    pub eps_visc: f64,
    pub dt: f64,
    pub t_end: f64,
    pub splitting: Splitting,
    /// Standard deviation of the Gaussian used for approximate point masses.
    pub delta_width: f64,
}

impl SolverConfig {
    /// Desk-scale defaults: `n = 64`, `L = 8`, Strang splitting, point masses
    /// of width `2.5h`.
    pub fn desk(dt: f64) -> Self {
        let grid = GridSpec::new(3, 64, 8.0).expect("valid default grid");
        Self { grid, eps_visc: 0.0, dt, t_end: 1.0, splitting: Splitting::Strang, delta_width: 2.5 * grid.h() }
    }

    pub fn validate(&self, p: &ModelParams) -> Result<()> {
        if self.grid.d != p.d {
            return Err(Error::Config(format!("grid dimension {} differs from model dimension {}", self.grid.d, p.d)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.eps_visc >= 0.0 && self.eps_visc.is_finite()) {
            return Err(Error::Config(format!("viscosity must be non-negative, got {}", self.eps_visc)));
        }
        let cfl = self.dt * sup_drift(self.eps_visc, p) / self.grid.h();
        if cfl > 0.5 {
            return Err(Error::Config(format!("advective CFL number {cfl:.3} exceeds 0.5; reduce dt")));
        }
        Ok(())
    }
}

/// Norms of the solution after each step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSample {
    pub t: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub grad_l2: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Forward,
    Adjoint,
}

/// Precomputed operators for one `(SolverConfig, ModelParams)` pair.
pub struct GridSolver {
    cfg: SolverConfig,
    params: ModelParams,
    fft: FftN,
    wn: Wavenumbers,
    symbol: Vec<f64>,
    drift: Vec<Vec<f64>>,
}

impl GridSolver {
    pub fn new(cfg: SolverConfig, params: ModelParams) -> Result<Self> {
        cfg.validate(&params)?;
        let spec = cfg.grid;
        let wn = Wavenumbers::new(spec);
        let symbol = wn.abs.iter().map(|&k| k.powf(params.alpha) + cfg.eps_visc * k * k).collect();
        let mut drift = vec![vec![0.0; spec.len()]; spec.d];
        let mut x = vec![0.0; spec.d];
        for i in 0..spec.len() {
            spec.point(i, &mut x);
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let phi = drift_factor(r, cfg.eps_visc, &params).0;
            for k in 0..spec.d {
                drift[k][i] = phi * x[k];
            }
        }
        Ok(Self { cfg, params, fft: FftN::new(spec), wn, symbol, drift })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn spectrum(&self, f: &GridField) -> Vec<Complex64> {
        self.fft.forward_real(&f.values)
    }

    pub fn field(&self, z: &[Complex64]) -> GridField {
        GridField { spec: self.cfg.grid, values: self.fft.inverse_real(z) }
    }

    /// `‖u - v‖₂` from two spectra.
    pub fn l2_distance(&self, a: &[Complex64], b: &[Complex64]) -> f64 {
        let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        (self.cfg.grid.cell_volume() * s / self.cfg.grid.len() as f64).sqrt()
    }

    fn diffuse(&self, z: &mut [Complex64], tau: f64) {
        for (c, &s) in z.iter_mut().zip(&self.symbol) {
            *c *= (-tau * s).exp();
        }
    }

    fn masked_derivative(&self, z: &[Complex64], k: usize) -> Vec<Complex64> {
        z.iter()
            .enumerate()
            .map(|(i, &c)| if self.wn.mask[i] { Complex64::new(0.0, self.wn.xi[k][i]) * c } else { Complex64::default() })
            .collect()
    }

    /// Inverse transforms of several Hermitian spectra, two per FFT.
    fn inverse_many(&self, zs: &[Vec<Complex64>]) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(zs.len());
        let mut i = 0;
        while i < zs.len() {
            if i + 1 < zs.len() {
                let (a, b) = self.fft.inverse_real_pair(&zs[i], &zs[i + 1]);
                out.push(a);
                out.push(b);
                i += 2;
            } else {
                out.push(self.fft.inverse_real(&zs[i]));
                i += 1;
            }
        }
        out
    }

    fn forward_many(&self, xs: &[Vec<f64>]) -> Vec<Vec<Complex64>> {
        let mut out = Vec::with_capacity(xs.len());
        let mut i = 0;
        while i < xs.len() {
            if i + 1 < xs.len() {
                let (a, b) = self.fft.forward_real_pair(&xs[i], &xs[i + 1]);
                out.push(a);
                out.push(b);
                i += 2;
            } else {
                out.push(self.fft.forward_real(&xs[i]));
                i += 1;
            }
        }
        out
    }

    /// `P(b·P∇u)`, with `P` the dealiasing projection.
    fn transport(&self, z: &[Complex64]) -> Vec<Complex64> {
        let d = self.cfg.grid.d;
        let grads: Vec<Vec<Complex64>> = (0..d).map(|k| self.masked_derivative(z, k)).collect();
        let phys = self.inverse_many(&grads);
        let mut w = vec![0.0; z.len()];
        for k in 0..d {
            for ((wi, bi), gi) in w.iter_mut().zip(&self.drift[k]).zip(&phys[k]) {
                *wi += bi * gi;
            }
        }
        let mut out = self.fft.forward_real(&w);
        for (c, &m) in out.iter_mut().zip(&self.wn.mask) {
            if !m {
                *c = Complex64::default();
            }
        }
        out
    }

    /// Exact transpose of [`Self::transport`]: `-Σ_k ∂_k P(b_k Pg)`.
    fn transport_adjoint(&self, z: &[Complex64]) -> Vec<Complex64> {
        let masked: Vec<Complex64> =
            z.iter().zip(&self.wn.mask).map(|(&c, &m)| if m { c } else { Complex64::default() }).collect();
        let g = self.fft.inverse_real(&masked);
        let products: Vec<Vec<f64>> =
            self.drift.iter().map(|b| b.iter().zip(&g).map(|(x, y)| x * y).collect()).collect();
        let spectra = self.forward_many(&products);
        let mut out = vec![Complex64::default(); z.len()];
        for (k, s) in spectra.iter().enumerate() {
            for (i, o) in out.iter_mut().enumerate() {
                if self.wn.mask[i] {
                    *o -= Complex64::new(0.0, self.wn.xi[k][i]) * s[i];
                }
            }
        }
        out
    }

    /// Three-stage SSP Runge–Kutta step of the transport term. Its stability
    /// polynomial is the cubic Taylor polynomial, so the adjoint direction
    /// yields the exact matrix transpose of the forward step.
    fn transport_step(&self, z: &mut [Complex64], tau: f64, dir: Direction) {
        if self.params.kappa == 0.0 {
            return;
        }
        let op = |v: &[Complex64]| match dir {
            Direction::Forward => self.transport(v),
            Direction::Adjoint => self.transport_adjoint(v),
        };
        let l0 = op(z);
        let u1: Vec<Complex64> = z.iter().zip(&l0).map(|(u, l)| u + tau * l).collect();
        let l1 = op(&u1);
        let u2: Vec<Complex64> =
            z.iter().zip(&u1).zip(&l1).map(|((u, a), l)| 0.75 * u + 0.25 * (a + tau * l)).collect();
        let l2 = op(&u2);
        for ((u, b), l) in z.iter_mut().zip(&u2).zip(&l2) {
            *u = *u / 3.0 + 2.0 / 3.0 * (b + tau * l);
        }
    }

    fn step(&self, z: &mut [Complex64], tau: f64, dir: Direction) {
        match (self.cfg.splitting, dir) {
            (Splitting::Strang, _) => {
                self.diffuse(z, 0.5 * tau);
                self.transport_step(z, tau, dir);
                self.diffuse(z, 0.5 * tau);
            }
            (Splitting::Lie, Direction::Forward) => {
                self.diffuse(z, tau);
                self.transport_step(z, tau, dir);
            }
            (Splitting::Lie, Direction::Adjoint) => {
                self.transport_step(z, tau, dir);
                self.diffuse(z, tau);
            }
        }
    }

    /// One step of length `tau` applied to a spectrum, for callers that run
    /// several solvers in lockstep.
    pub fn step_spectral(&self, z: &mut [Complex64], tau: f64, adjoint: bool) {
        self.step(z, tau, if adjoint { Direction::Adjoint } else { Direction::Forward });
    }

    /// Advances the spectrum `z` by `t`, calling `observe(time, z)` after every
    /// step. The last step is shortened to land exactly on `t`.
    pub fn run_spectral(
        &self,
        z: &mut [Complex64],
        t: f64,
        adjoint: bool,
        mut observe: impl FnMut(f64, &[Complex64]),
    ) -> Result<()> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Config(format!("evolution time must be non-negative, got {t}")));
        }
        let dir = if adjoint { Direction::Adjoint } else { Direction::Forward };
        let dt = self.cfg.dt;
        let full = (t / dt * (1.0 + 1e-12)).floor() as usize;
        let rest = t - full as f64 * dt;
        let mut steps: Vec<f64> = vec![dt; full];
        if rest > 1e-12 * dt {
            // the transpose of a product reverses it, so the adjoint run takes
            // the short step first
            if adjoint {
                steps.insert(0, rest);
            } else {
                steps.push(rest);
            }
        }
        let mut now = 0.0;
        for tau in steps {
            self.step(z, tau, dir);
            now += tau;
            if !z.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::Instability(format!(
                    "non-finite values at t = {now:.6} (dt = {dt}, eps = {}, kappa = {})",
                    self.cfg.eps_visc, self.params.kappa
                )));
            }
            observe(now, z);
        }
        Ok(())
    }

    fn run(&self, f: &GridField, t: f64, adjoint: bool) -> Result<(GridField, Vec<NormSample>)> {
        if f.spec != self.cfg.grid {
            return Err(Error::Config("field grid differs from the solver grid".into()));
        }
        if !f.is_finite() {
            return Err(Error::Config("initial field has non-finite entries".into()));
        }
        let mut z = self.spectrum(f);
        let mut series = vec![self.sample(0.0, &z)];
        self.run_spectral(&mut z, t, adjoint, |now, z| series.push(self.sample(now, z)))?;
        Ok((self.field(&z), series))
    }

    fn sample(&self, t: f64, z: &[Complex64]) -> NormSample {
        let u = self.field(z);
        NormSample {
            t,
            l1: u.norm_l1(),
            l2: u.norm_l2(),
            linf: u.norm_linf(),
            grad_l2: gradient_l2_spectral(z, &self.wn, self.cfg.grid),
        }
    }

    /// One step of the forward equation.
    pub fn step_forward(&self, u: &GridField) -> Result<GridField> {
        self.run(u, self.cfg.dt, false).map(|r| r.0)
    }

    /// `e^{-tΛ^ε} f` together with the norm series (including `t = 0`).
    pub fn evolve_forward(&self, f: &GridField, t: f64) -> Result<(GridField, Vec<NormSample>)> {
        self.run(f, t, false)
    }

    /// `e^{-t(Λ^ε)^*} g` together with the norm series.
    pub fn evolve_adjoint(&self, g: &GridField, t: f64) -> Result<(GridField, Vec<NormSample>)> {
        self.run(g, t, true)
    }
}

/// Gaussian of standard deviation `width` centred at `y` (nearest periodic
/// image), normalised to unit grid mass.
pub fn mollified_delta(spec: GridSpec, y: &[f64], width: f64) -> Result<GridField> {
    let l = spec.half_width;
    if y.len() != spec.d || y.iter().any(|v| !(v.abs() < l)) {
        return Err(Error::Domain(format!("point {y:?} is outside the grid box [-{l}, {l})")));
    }
    let mut f = GridField::from_fn(spec, |x| {
        let r2: f64 = x
            .iter()
            .zip(y)
            .map(|(a, b)| {
                let mut dx = a - b;
                dx -= 2.0 * l * (dx / (2.0 * l)).round();
                dx * dx
            })
            .sum();
        (-0.5 * r2 / (width * width)).exp()
    });
    let m = f.integral();
    f.values.iter_mut().for_each(|v| *v /= m);
    Ok(f)
}

fn check_width(cfg: &SolverConfig) -> Result<()> {
    if cfg.delta_width < 2.0 * cfg.grid.h() {
        return Err(Error::Config(format!(
            "point-mass width {} is below two grid spacings ({})",
            cfg.delta_width,
            2.0 * cfg.grid.h()
        )));
    }
    Ok(())
}

/// `x ↦ e^{-tΛ}(x, y)`: the forward semigroup applied to a point mass at `y`.
pub fn heat_kernel_column(solver: &GridSolver, y: &[f64], t: f64) -> Result<GridField> {
    check_width(solver.config())?;
    let delta = mollified_delta(solver.config().grid, y, solver.config().delta_width)?;
    Ok(solver.evolve_forward(&delta, t)?.0)
}

/// `y ↦ e^{-tΛ}(x, y)`: the adjoint semigroup applied to a point mass at `x`.
/// Its integral is conserved.
pub fn heat_kernel_row(solver: &GridSolver, x: &[f64], t: f64) -> Result<GridField> {
    check_width(solver.config())?;
    let delta = mollified_delta(solver.config().grid, x, solver.config().delta_width)?;
    Ok(solver.evolve_adjoint(&delta, t)?.0)
}

#[derive(Debug, Clone)]
pub struct PhiWeight {
    pub field: GridField,
    pub min: f64,
}

/// `n^{-1} + e^{-(Λ^ε)^*/n} ψ_s`, with `ψ_s` built from the exponent `beta`.
///
/// Fails with a resolution error when the grid minimum drops below `1/(2n)`.
pub fn phi_weight(solver: &GridSolver, n: u32, s: f64, beta: f64) -> Result<PhiWeight> {
    if n == 0 || !(s > 0.0) {
        return Err(Error::Domain(format!("need n ≥ 1 and s > 0, got n = {n}, s = {s}")));
    }
    let alpha = solver.params().alpha;
    let psi = GridField::from_fn(solver.config().grid, |x| {
        weight_psi_radial(x.iter().map(|v| v * v).sum::<f64>().sqrt(), s, beta, alpha)
    });
    let inv = 1.0 / n as f64;
    let evolved = solver.evolve_adjoint(&psi, inv)?.0;
    let field = evolved.map(|v| v + inv);
    let min = field.min();
    if min <= 0.5 * inv {
        return Err(Error::Resolution(format!(
            "weight minimum {min:.3e} is below 1/(2n) = {:.3e}; refine the grid",
            0.5 * inv
        )));
    }
    Ok(PhiWeight { field, min })
}

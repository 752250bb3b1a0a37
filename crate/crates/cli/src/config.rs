//! Run configuration.
//!
//! A TOML file with the sections below. Every key is optional and every
//! default is explicit; unknown keys are rejected. The resolved configuration
//! (file, then flag overrides, then derived values filled in) is what gets
//! written into each output's provenance block.
//!
//! ```toml
//! [model]
//! d = 3
//! alpha = 0.5
//! kappa = 0.6572662506026339   # β = 0.3
//!
//! [grid]
//! n = 64
//! L = 8.0
//!
//! [solver]
//! dt = 0.02
//! t_end = 1.0
//! eps_visc = 1e-3
//! splitting = "strang"
//! delta_width = 0.625          # 2.5 h when omitted
//!
//! [mc]
//! n_particles = 1000000
//! dt = 0.0138888…              # sup|b|·dt ≤ 0.01 when omitted
//! t_end = 0.5
//! seed = 42
//! start = [1.0, 0.0, 0.0]
//! bins = [0.02, …, 0.25]       # 8 log-spaced bins when omitted
//! window = [0.08, 1.0]         # fit window in units of t^(1/α)
//!
//! [sweep]
//! kappa_min = 1e-3
//! kappa_max = 1e3
//! count = 241
//! radii = [0.25, 0.5, 1.0]
//!
//! [checks]
//! which = ["all"]
//! [checks.tolerances]
//! lyapunov = 1e-4
//!
//! [output]
//! directory = "out"
//! formats = ["csv", "json"]
//! ```

use std::path::{Path, PathBuf};

use fracdrift::checks::log_edges;
use fracdrift::evolve::{SolverConfig, Splitting};
use fracdrift::fracops::GridSpec;
use fracdrift::mc::MCConfig;
use fracdrift::model::{sup_drift, ModelParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Checks run by `verify-all`, in order.
pub const CHECK_NAMES: [&str; 11] = [
    "beta_curve",
    "lyapunov",
    "cauchy",
    "kernel_bound",
    "gradient",
    "eps_cauchy",
    "weights",
    "lemma_v",
    "b3_weighted",
    "mc_exponent",
    "sampler",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub d: usize,
    pub alpha: f64,
    pub kappa: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self { d: 3, alpha: 0.5, kappa: 0.6572662506026339 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { n: 64, half_width: 8.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplittingName {
    Lie,
    Strang,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub dt: f64,
    pub t_end: f64,
    pub eps_visc: f64,
    pub splitting: SplittingName,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_width: Option<f64>,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { dt: 0.02, t_end: 1.0, eps_visc: 1e-3, splitting: SplittingName::Strang, delta_width: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSection {
    pub n_particles: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub t_end: f64,
    pub seed: u64,
    pub start: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<Vec<f64>>,
    pub window: [f64; 2],
}

impl Default for McSection {
    fn default() -> Self {
        Self {
            n_particles: 1_000_000,
            dt: None,
            t_end: 0.5,
            seed: 42,
            start: vec![1.0, 0.0, 0.0],
            bins: None,
            window: [0.08, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub kappa_min: f64,
    pub kappa_max: f64,
    pub count: usize,
    pub radii: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { kappa_min: 1e-3, kappa_max: 1e3, count: 241, radii: vec![0.25, 0.5, 1.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub lyapunov: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { lyapunov: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChecksSection {
    pub which: Vec<String>,
    pub tolerances: Tolerances,
}

impl Default for ChecksSection {
    fn default() -> Self {
        Self { which: vec!["all".into()], tolerances: Tolerances::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Bin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { directory: PathBuf::from("out"), formats: vec![Format::Csv, Format::Json] }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelSection,
    pub grid: GridSection,
    pub solver: SolverSection,
    pub mc: McSection,
    pub sweep: SweepSection,
    pub checks: ChecksSection,
    pub output: OutputSection,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| bad(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Applies overrides, validates and fills in derived defaults.
    pub fn resolve(mut self, o: &Overrides) -> Result<Self, CliError> {
        if let Some(out) = &o.out {
            self.output.directory = out.clone();
        }
        if let Some(seed) = o.seed {
            self.mc.seed = seed;
        }
        let p = self.model()?;
        let grid = GridSpec::new(p.d, self.grid.n, self.grid.half_width).map_err(|e| bad(e.to_string()))?;
        self.solver.delta_width.get_or_insert(2.5 * grid.h());
        self.solver_config()?.validate(&p).map_err(|e| bad(e.to_string()))?;
        if self.mc.dt.is_none() {
            let t = self.mc.t_end;
            let steps = (t * sup_drift(0.0, &p) / 0.01).ceil().max(1.0);
            self.mc.dt = Some(if t > 0.0 { t / steps } else { 1e-3 });
        }
        self.mc.bins.get_or_insert_with(|| log_edges(0.02, 0.25, 8));
        self.mc_config(1)?.validate(&p).map_err(|e| bad(e.to_string()))?;
        let [w0, w1] = self.mc.window;
        if !(w0 > 0.0 && w1 > w0) {
            return Err(bad(format!("mc.window must satisfy 0 < lo < hi, got [{w0}, {w1}]")));
        }
        let s = &self.sweep;
        if !(s.kappa_min > 0.0 && s.kappa_max > s.kappa_min && s.kappa_max.is_finite()) || s.count < 2 {
            return Err(bad("sweep needs 0 < kappa_min < kappa_max and count ≥ 2"));
        }
        if s.radii.is_empty() || s.radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            return Err(bad("sweep.radii must be non-empty and positive"));
        }
        let tol = self.checks.tolerances.lyapunov;
        if tol.is_nan() || tol <= 0.0 {
            return Err(bad("checks.tolerances.lyapunov must be positive"));
        }
        for w in &self.checks.which {
            if w != "all" && !CHECK_NAMES.contains(&w.as_str()) {
                return Err(bad(format!("unknown check {w:?}; known: all, {}", CHECK_NAMES.join(", "))));
            }
        }
        if self.output.formats.is_empty() {
            return Err(bad("output.formats must list at least one format"));
        }
        Ok(self)
    }

    pub fn model(&self) -> Result<ModelParams, CliError> {
        let m = &self.model;
        ModelParams::new(m.d, m.alpha, m.kappa).map_err(|e| bad(e.to_string()))
    }

    pub fn solver_config(&self) -> Result<SolverConfig, CliError> {
        let grid = GridSpec::new(self.model.d, self.grid.n, self.grid.half_width).map_err(|e| bad(e.to_string()))?;
        let s = &self.solver;
        Ok(SolverConfig {
            grid,
            eps_visc: s.eps_visc,
            dt: s.dt,
            t_end: s.t_end,
            splitting: match s.splitting {
                SplittingName::Lie => Splitting::Lie,
                SplittingName::Strang => Splitting::Strang,
            },
            delta_width: s.delta_width.unwrap_or(2.5 * grid.h()),
        })
    }

    pub fn mc_config(&self, workers: usize) -> Result<MCConfig, CliError> {
        let m = &self.mc;
        Ok(MCConfig {
            n_particles: m.n_particles,
            dt: m.dt.ok_or_else(|| bad("mc.dt unresolved"))?,
            t_end: m.t_end,
            seed: m.seed,
            start: m.start.clone(),
            bins: m.bins.clone().ok_or_else(|| bad("mc.bins unresolved"))?,
            workers,
        })
    }

    pub fn wants(&self, check: &str) -> bool {
        self.checks.which.iter().any(|w| w == "all" || w == check)
    }

    pub fn emits(&self, f: Format) -> bool {
        self.output.formats.contains(&f)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let c = RunConfig::from_toml("").unwrap();
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn default_kappa_gives_the_reference_exponent() {
        let b = RunConfig::default().model().unwrap().beta().unwrap();
        assert!((b - 0.3).abs() < 1e-12, "{b}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for text in ["[model]\ngamma = 1\n", "[extra]\n", "top = 1\n", "[checks.tolerances]\nfoo = 1\n"] {
            assert!(RunConfig::from_toml(text).is_err(), "{text}");
        }
    }

    #[test]
    fn overrides_win() {
        let c = RunConfig::from_toml("[mc]\nseed = 5\n[output]\ndirectory = \"a\"\n").unwrap();
        let r = c.resolve(&Overrides { out: Some("b".into()), seed: Some(9) }).unwrap();
        assert_eq!(r.mc.seed, 9);
        assert_eq!(r.output.directory, PathBuf::from("b"));
    }

    #[test]
    fn resolution_fills_every_default() {
        let r = RunConfig::default().resolve(&Overrides::default()).unwrap();
        assert_eq!(r.solver.delta_width, Some(0.625));
        let dt = r.mc.dt.unwrap();
        assert!(dt * sup_drift(0.0, &r.model().unwrap()) <= 0.01 + 1e-15);
        assert_eq!(r.mc.bins.as_ref().unwrap().len(), 9);
        // the emitted block round-trips to the same resolved configuration
        let again = RunConfig::from_toml(&r.to_toml()).unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for text in [
            "[model]\nalpha = 1.5\n",
            "[grid]\nn = 63\n",
            "[solver]\ndt = -1\n",
            "[sweep]\nkappa_min = 10\nkappa_max = 1\n",
            "[checks]\nwhich = [\"nope\"]\n",
            "[mc]\nstart = [1.0]\n",
            "[output]\nformats = []\n",
        ] {
            let c = RunConfig::from_toml(text).unwrap();
            assert!(matches!(c.resolve(&Overrides::default()), Err(CliError::Config(_))), "{text}");
        }
    }
}

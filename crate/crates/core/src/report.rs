//! Machine-readable verdicts.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub d: usize,
    pub n: usize,
    pub half_width: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub grid: Option<GridInfo>,
    pub dt: Option<f64>,
    pub eps: Option<f64>,
    pub seed: Option<u64>,
}

/// One audited claim. `measured[i]` is compared against `bound[i]` by the
/// predicate documented for the check that produced the report; `params`
/// carries the run parameters and any supporting measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub measured: Vec<f64>,
    pub bound: Vec<f64>,
    pub tolerance: f64,
    pub params: Map<String, Value>,
    pub provenance: Provenance,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: false,
            measured: Vec::new(),
            bound: Vec::new(),
            tolerance,
            params: Map::new(),
            provenance: Provenance::default(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.to_string(), value.into());
    }

    /// Default predicate: every `measured[i] ≤ bound[i]·(1 + tolerance)`.
    pub fn within_bounds(&self) -> bool {
        self.measured.len() == self.bound.len()
            && self
                .measured
                .iter()
                .zip(&self.bound)
                .all(|(m, b)| m.is_finite() && *m <= b * (1.0 + self.tolerance))
    }

    /// One line: `PASS name measured=[..] bound=[..]`.
    pub fn summary(&self) -> String {
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.6e}")).collect::<Vec<_>>().join(", ");
        format!(
            "{} {} measured=[{}] bound=[{}]",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            fmt(&self.measured),
            fmt(&self.bound)
        )
    }
}

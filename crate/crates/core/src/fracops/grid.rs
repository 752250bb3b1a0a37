//! Uniform periodic grids on `[-L, L)^d`, stored row-major.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::GridInfo;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    pub n: usize,
    pub half_width: f64,
}

impl GridSpec {
    pub fn new(d: usize, n: usize, half_width: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Config("grid dimension must be positive".into()));
        }
        if n < 16 || !n.is_multiple_of(2) {
            return Err(Error::Config(format!("points per axis must be even and at least 16, got {n}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::Config(format!("half width must be positive, got {half_width}")));
        }
        let total = (n as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
        if total > (1u128 << 34) {
            return Err(Error::Config(format!("grid of {n}^{d} points is too large")));
        }
        Ok(Self { d, n, half_width })
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.d as i32)
    }

    /// Coordinate of grid index `i` along any axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.h()
    }

    /// Writes the coordinates of flat index `idx` into `x`.
    pub fn point(&self, mut idx: usize, x: &mut [f64]) {
        for k in (0..self.d).rev() {
            x[k] = self.coord(idx % self.n);
            idx /= self.n;
        }
    }

    /// Signed mode number of FFT index `i`: `0, 1, …, n/2-1, -n/2, …, -1`.
    pub fn mode(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Angular wavenumber of FFT index `i`.
    pub fn wavenumber(&self, i: usize) -> f64 {
        std::f64::consts::PI / self.half_width * self.mode(i) as f64
    }

    pub fn info(&self) -> GridInfo {
        GridInfo { d: self.d, n: self.n, half_width: self.half_width }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl GridField {
    pub fn zeros(spec: GridSpec) -> Self {
        Self { spec, values: vec![0.0; spec.len()] }
    }

    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::Config(format!(
                "expected {} values for the grid, got {}",
                spec.len(),
                values.len()
            )));
        }
        Ok(Self { spec, values })
    }

    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let mut x = vec![0.0; spec.d];
        let values = (0..spec.len())
            .map(|i| {
                spec.point(i, &mut x);
                f(&x)
            })
            .collect();
        Self { spec, values }
    }

    pub fn integral(&self) -> f64 {
        self.spec.cell_volume() * self.values.iter().sum::<f64>()
    }

    pub fn norm_l1(&self) -> f64 {
        self.spec.cell_volume() * self.values.iter().map(|v| v.abs()).sum::<f64>()
    }

    pub fn norm_l2(&self) -> f64 {
        (self.spec.cell_volume() * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// `L^r` norm; `r = ∞` gives the maximum modulus.
    pub fn norm_lr(&self, r: f64) -> f64 {
        if r.is_infinite() {
            return self.norm_linf();
        }
        let m = self.norm_linf();
        if m == 0.0 {
            return 0.0;
        }
        // scaled to avoid overflow for large r
        let s: f64 = self.values.iter().map(|v| (v.abs() / m).powf(r)).sum();
        m * (self.spec.cell_volume() * s).powf(1.0 / r)
    }

    pub fn norm_linf(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn inner(&self, other: &GridField) -> f64 {
        self.spec.cell_volume() * self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridField {
        GridField { spec: self.spec, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> GridField {
        GridField {
            spec: self.spec,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

//! FFT-based operators on periodic grids.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::{GridField, GridSpec};

/// Multidimensional complex FFT over a [`GridSpec`], applied axis by axis.
pub struct FftN {
    spec: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftN {
    pub fn new(spec: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        Self { spec, forward: planner.plan_fft_forward(spec.n), inverse: planner.plan_fft_inverse(spec.n) }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    /// In-place transform. The inverse is normalised so that it undoes the
    /// forward transform.
    pub fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let (n, d) = (self.spec.n, self.spec.d);
        assert_eq!(data.len(), self.spec.len());
        let fft = if inverse { &self.inverse } else { &self.forward };
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        let mut buf = Vec::new();
        for axis in 0..d {
            let stride = n.pow((d - 1 - axis) as u32);
            if stride == 1 {
                fft.process_with_scratch(data, &mut scratch);
                continue;
            }
            buf.resize(n * stride, Complex64::default());
            for block in data.chunks_mut(n * stride) {
                for i in 0..n {
                    for j in 0..stride {
                        buf[j * n + i] = block[i * stride + j];
                    }
                }
                fft.process_with_scratch(&mut buf, &mut scratch);
                for i in 0..n {
                    for j in 0..stride {
                        block[i * stride + j] = buf[j * n + i];
                    }
                }
            }
        }
        if inverse {
            let s = 1.0 / self.spec.len() as f64;
            data.iter_mut().for_each(|z| *z *= s);
        }
    }

    pub fn forward_real(&self, x: &[f64]) -> Vec<Complex64> {
        let mut z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut z, false);
        z
    }

    /// Transforms two real fields with one complex FFT.
    pub fn forward_real_pair(&self, x: &[f64], y: &[f64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut z: Vec<Complex64> = x.iter().zip(y).map(|(&a, &b)| Complex64::new(a, b)).collect();
        self.transform(&mut z, false);
        let len = z.len();
        let mut a = vec![Complex64::default(); len];
        let mut b = vec![Complex64::default(); len];
        for k in 0..len {
            let zc = z[self.negate(k)].conj();
            a[k] = 0.5 * (z[k] + zc);
            b[k] = Complex64::new(0.0, -0.5) * (z[k] - zc);
        }
        (a, b)
    }

    /// Real part of the inverse transform. The spectrum must be Hermitian.
    pub fn inverse_real(&self, x: &[Complex64]) -> Vec<f64> {
        let mut z = x.to_vec();
        self.transform(&mut z, true);
        z.iter().map(|c| c.re).collect()
    }

    /// Inverse of two Hermitian spectra with one complex FFT.
    pub fn inverse_real_pair(&self, x: &[Complex64], y: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let mut z: Vec<Complex64> = x.iter().zip(y).map(|(&a, &b)| a + Complex64::i() * b).collect();
        self.transform(&mut z, true);
        (z.iter().map(|c| c.re).collect(), z.iter().map(|c| c.im).collect())
    }

    /// Flat index of the mode `-m` given the flat index of `m`.
    fn negate(&self, mut idx: usize) -> usize {
        let n = self.spec.n;
        let mut out = 0;
        let mut mul = 1;
        for _ in 0..self.spec.d {
            let i = idx % n;
            idx /= n;
            out += ((n - i) % n) * mul;
            mul *= n;
        }
        out
    }
}

/// Per-mode tables shared by the spectral operators.
pub struct Wavenumbers {
    /// `ξ_k` per axis, flattened: `xi[k * len + idx]`.
    pub xi: Vec<Vec<f64>>,
    pub abs: Vec<f64>,
    /// 2/3-rule dealiasing mask: all axis modes satisfy `3|m| < n`.
    pub mask: Vec<bool>,
}

impl Wavenumbers {
    pub fn new(spec: GridSpec) -> Self {
        let (n, d, len) = (spec.n, spec.d, spec.len());
        let mut xi = vec![vec![0.0; len]; d];
        let mut abs = vec![0.0; len];
        let mut mask = vec![true; len];
        for idx in 0..len {
            let mut rem = idx;
            let mut s2 = 0.0;
            for k in (0..d).rev() {
                let i = rem % n;
                rem /= n;
                let w = spec.wavenumber(i);
                xi[k][idx] = w;
                s2 += w * w;
                if 3 * spec.mode(i).unsigned_abs() as usize >= n {
                    mask[idx] = false;
                }
            }
            abs[idx] = s2.sqrt();
        }
        Self { xi, abs, mask }
    }
}

/// `F^{-1}[(|ξ|^α + ε|ξ|²) F u]`.
pub fn apply_symbol(field: &GridField, alpha: f64, eps_visc: f64) -> GridField {
    let fft = FftN::new(field.spec);
    let wn = Wavenumbers::new(field.spec);
    let mut z = fft.forward_real(&field.values);
    for (c, &k) in z.iter_mut().zip(&wn.abs) {
        *c *= k.powf(alpha) + eps_visc * k * k;
    }
    GridField { spec: field.spec, values: fft.inverse_real(&z) }
}

/// Dealiased spectral gradient, one field per axis.
pub fn gradient_spectral(field: &GridField) -> Vec<GridField> {
    let fft = FftN::new(field.spec);
    let wn = Wavenumbers::new(field.spec);
    let z = fft.forward_real(&field.values);
    (0..field.spec.d)
        .map(|k| {
            let dz: Vec<Complex64> = z
                .iter()
                .enumerate()
                .map(|(i, &c)| if wn.mask[i] { Complex64::new(0.0, wn.xi[k][i]) * c } else { Complex64::default() })
                .collect();
            GridField { spec: field.spec, values: fft.inverse_real(&dz) }
        })
        .collect()
}

/// `‖∇u‖₂` by Parseval over all modes.
pub fn gradient_l2(field: &GridField) -> f64 {
    let fft = FftN::new(field.spec);
    let wn = Wavenumbers::new(field.spec);
    let z = fft.forward_real(&field.values);
    gradient_l2_spectral(&z, &wn, field.spec)
}

pub(crate) fn gradient_l2_spectral(z: &[Complex64], wn: &Wavenumbers, spec: GridSpec) -> f64 {
    let s: f64 = z.iter().zip(&wn.abs).map(|(c, k)| k * k * c.norm_sqr()).sum();
    (spec.cell_volume() * s / spec.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn spec() -> GridSpec {
        GridSpec::new(3, 16, 2.0).unwrap()
    }

    fn random_smooth(seed: u64) -> GridField {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let c: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        GridField::from_fn(spec(), |x| {
            let k = PI / 2.0;
            c[0] + c[1] * (k * x[0]).sin() + c[2] * (2.0 * k * x[1]).cos() + c[3] * (k * (x[0] + x[2])).sin()
                + c[4] * (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp()
                + c[5] * (3.0 * k * x[2]).cos()
        })
    }

    #[test]
    fn round_trip_and_pairs() {
        let f = random_smooth(1);
        let g = random_smooth(2);
        let fft = FftN::new(f.spec);
        let (a, b) = fft.forward_real_pair(&f.values, &g.values);
        let a1 = fft.forward_real(&f.values);
        for (x, y) in a.iter().zip(&a1) {
            assert!((x - y).norm() < 1e-10);
        }
        let (x, y) = fft.inverse_real_pair(&a, &b);
        for i in 0..x.len() {
            assert!((x[i] - f.values[i]).abs() < 1e-12 && (y[i] - g.values[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn symbol_on_modes() {
        let s = spec();
        let c = GridField::from_fn(s, |_| 1.5);
        assert!(apply_symbol(&c, 0.5, 0.1).norm_linf() < 1e-12);
        let k = PI / s.half_width * 2.0;
        let f = GridField::from_fn(s, |x| (k * x[1]).cos());
        let g = apply_symbol(&f, 0.5, 0.1);
        let lam = k.powf(0.5) + 0.1 * k * k;
        for (a, b) in g.values.iter().zip(&f.values) {
            assert!((a - lam * b).abs() < 1e-11);
        }
    }

    #[test]
    fn symbol_self_adjoint_and_positive() {
        let u = random_smooth(3);
        let v = random_smooth(4);
        let au = apply_symbol(&u, 0.7, 1e-2);
        let av = apply_symbol(&v, 0.7, 1e-2);
        assert!((au.inner(&v) - u.inner(&av)).abs() < 1e-12 * au.norm_l2() * v.norm_l2());
        assert!(au.inner(&u) >= 0.0);
    }

    #[test]
    fn gradient_of_resolved_mode() {
        let s = spec();
        let k = PI / s.half_width;
        let f = GridField::from_fn(s, |x| (k * x[0]).sin());
        let g = gradient_spectral(&f);
        for i in 0..s.len() {
            let mut x = [0.0; 3];
            s.point(i, &mut x);
            assert!((g[0].values[i] - k * (k * x[0]).cos()).abs() < 1e-13);
            assert!(g[1].values[i].abs() < 1e-13 && g[2].values[i].abs() < 1e-13);
        }
        assert!((gradient_l2(&f) - k * f.norm_l2()).abs() < 1e-12);
        let c = GridField::from_fn(s, |_| 3.0);
        assert!(gradient_spectral(&c).iter().all(|f| f.norm_linf() < 1e-12));
        let r = random_smooth(5);
        assert!(gradient_spectral(&r)[0].integral().abs() < 1e-12);
    }
}

//! Uniform periodic grids on a box `[-L/2, L/2)^n` and a discrete Fourier
//! transform calibrated to the continuous transform
//! `f̂(ξ) = ∫ f(x) e^{-2πi x·ξ} dx`.
//!
//! Layout: values are row-major by axis (axis 0 varies slowest). Spatial
//! sample `idx` sits at `x = -L/2 + idx·Δx` per axis; frequency sample `i`
//! sits at `ξ = (i - N/2)/L` per axis, so the zero frequency is at the
//! centre index `N/2`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 3;

/// A point in at most [`MAX_DIM`] dimensions; only the first `dim` slots are used.
pub type Point = [f64; MAX_DIM];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    samples: usize,
    side: f64,
}

impl GridSpec {
    pub fn new(dim: usize, samples: usize, side: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if samples < 8 || !samples.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "samples per axis {samples} must be a power of two >= 8"
            )));
        }
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::InvalidGrid(format!("side length {side} must be positive")));
        }
        Ok(Self { dim, samples, side })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    /// Δx = L/N.
    pub fn spacing(&self) -> f64 {
        self.side / self.samples as f64
    }

    /// Δξ = 1/L.
    pub fn freq_spacing(&self) -> f64 {
        1.0 / self.side
    }

    /// Total number of grid points, Nⁿ.
    pub fn len(&self) -> usize {
        self.samples.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self, domain: Domain) -> f64 {
        let h = match domain {
            Domain::Space => self.spacing(),
            Domain::Frequency => self.freq_spacing(),
        };
        h.powi(self.dim as i32)
    }

    /// Largest |ξ| represented on the frequency grid (a corner).
    pub fn max_frequency(&self) -> f64 {
        (self.dim as f64).sqrt() * self.samples as f64 / (2.0 * self.side)
    }

    /// Per-axis indices of a flat index.
    pub fn unravel(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0usize; MAX_DIM];
        for a in (0..self.dim).rev() {
            idx[a] = flat % self.samples;
            flat /= self.samples;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx[..self.dim]
            .iter()
            .fold(0usize, |acc, &i| acc * self.samples + i)
    }

    /// Spatial coordinates of a flat index.
    pub fn point(&self, flat: usize) -> Point {
        let idx = self.unravel(flat);
        let h = self.spacing();
        let mut p = [0.0; MAX_DIM];
        for a in 0..self.dim {
            p[a] = -0.5 * self.side + idx[a] as f64 * h;
        }
        p
    }

    /// Signed integer frequency indices `k` (ξ = k/L) of a flat index.
    pub fn wavenumber(&self, flat: usize) -> [i64; MAX_DIM] {
        let idx = self.unravel(flat);
        let half = (self.samples / 2) as i64;
        let mut k = [0i64; MAX_DIM];
        for a in 0..self.dim {
            k[a] = idx[a] as i64 - half;
        }
        k
    }

    /// Frequency coordinates of a flat index.
    pub fn frequency(&self, flat: usize) -> Point {
        let k = self.wavenumber(flat);
        let mut xi = [0.0; MAX_DIM];
        for a in 0..self.dim {
            xi[a] = k[a] as f64 / self.side;
        }
        xi
    }
}

/// Whether a [`GridFunction`] holds spatial or frequency samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Space,
    Frequency,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    domain: Domain,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn from_values(spec: GridSpec, domain: Domain, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                spec.len(),
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            let p = spec.point(i);
            return Err(Error::NonFinite {
                point: p[..spec.dim()].to_vec(),
                value: values[i].norm(),
            });
        }
        Ok(Self { spec, domain, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            spec,
            domain: Domain::Space,
            values: vec![Complex64::new(0.0, 0.0); spec.len()],
        }
    }

    pub(crate) fn from_real_unchecked(spec: GridSpec, values: Vec<f64>) -> Self {
        Self {
            spec,
            domain: Domain::Space,
            values: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Pointwise moduli.
    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            spec: self.spec,
            domain: self.domain,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Pointwise modulus as a real-valued grid function.
    pub fn abs(&self) -> Self {
        Self {
            spec: self.spec,
            domain: self.domain,
            values: self.values.iter().map(|v| Complex64::new(v.norm(), 0.0)).collect(),
        }
    }

    /// Value at the grid point with per-axis indices `idx`.
    pub fn at(&self, idx: &[usize]) -> Complex64 {
        self.values[self.spec.ravel(idx)]
    }
}

/// Samples `formula` at the spatial grid points.
pub fn sample<F, T>(spec: &GridSpec, formula: F) -> Result<GridFunction>
where
    F: Fn(&[f64]) -> T,
    T: Into<Complex64>,
{
    let dim = spec.dim();
    let mut values = Vec::with_capacity(spec.len());
    for flat in 0..spec.len() {
        let p = spec.point(flat);
        let v: Complex64 = formula(&p[..dim]).into();
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite {
                point: p[..dim].to_vec(),
                value: if v.re.is_finite() { v.im } else { v.re },
            });
        }
        values.push(v);
    }
    Ok(GridFunction {
        spec: *spec,
        domain: Domain::Space,
        values,
    })
}

/// Samples `formula` at the frequency grid points.
pub fn sample_frequency<F, T>(spec: &GridSpec, formula: F) -> Result<GridFunction>
where
    F: Fn(&[f64]) -> T,
    T: Into<Complex64>,
{
    let dim = spec.dim();
    let values = (0..spec.len())
        .map(|flat| {
            let xi = spec.frequency(flat);
            formula(&xi[..dim]).into()
        })
        .collect();
    GridFunction::from_values(*spec, Domain::Frequency, values)
}

type PlanKey = (usize, bool);
type PlanCache = Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>;

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<PlanCache> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry((len, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

/// Unnormalised multi-dimensional DFT over every axis of a row-major cube
/// of side `n`.
pub(crate) fn fft_in_place(data: &mut [Complex64], dim: usize, n: usize, inverse: bool) {
    debug_assert_eq!(data.len(), n.pow(dim as u32));
    let fft = plan(n, inverse);
    let lines = data.len() / n;
    let mut buf = vec![Complex64::new(0.0, 0.0); data.len()];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        if stride == 1 {
            fft.process(data);
            continue;
        }
        // gather each line along `axis` into contiguous storage
        let block = stride * n;
        for line in 0..lines {
            let outer = line / stride;
            let inner = line % stride;
            let base = outer * block + inner;
            for i in 0..n {
                buf[line * n + i] = data[base + i * stride];
            }
        }
        fft.process(&mut buf);
        for line in 0..lines {
            let outer = line / stride;
            let inner = line % stride;
            let base = outer * block + inner;
            for i in 0..n {
                data[base + i * stride] = buf[line * n + i];
            }
        }
    }
}

/// Flat DFT-order index and sign `(-1)^{Σk}` for each centred frequency index.
fn shift_table(spec: &GridSpec) -> Vec<(usize, f64)> {
    let n = spec.samples() as i64;
    (0..spec.len())
        .map(|flat| {
            let k = spec.wavenumber(flat);
            let mut q = 0usize;
            let mut parity = 0i64;
            for &ka in &k[..spec.dim()] {
                q = q * spec.samples() + ka.rem_euclid(n) as usize;
                parity += ka;
            }
            let sign = if parity.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            (q, sign)
        })
        .collect()
}

/// Approximates `f̂(ξ) = ∫ f(x) e^{-2πi x·ξ} dx` on the centred frequency grid.
pub fn forward_ft(f: &GridFunction) -> GridFunction {
    let spec = f.spec;
    let mut data = f.values.clone();
    fft_in_place(&mut data, spec.dim(), spec.samples(), false);
    let scale = spec.cell_volume(Domain::Space);
    let values = shift_table(&spec)
        .into_iter()
        .map(|(q, sign)| data[q] * (sign * scale))
        .collect();
    GridFunction {
        spec,
        domain: Domain::Frequency,
        values,
    }
}

/// Exact inverse of [`forward_ft`]: `f(x) = Σ_k F(ξ_k) e^{2πi x·ξ_k} Δξⁿ`.
pub fn inverse_ft(big_f: &GridFunction) -> GridFunction {
    let spec = big_f.spec;
    let mut data = vec![Complex64::new(0.0, 0.0); spec.len()];
    for ((q, sign), v) in shift_table(&spec).into_iter().zip(&big_f.values) {
        data[q] = v * sign;
    }
    fft_in_place(&mut data, spec.dim(), spec.samples(), true);
    let scale = spec.cell_volume(Domain::Frequency);
    for v in &mut data {
        *v *= scale;
    }
    GridFunction {
        spec,
        domain: Domain::Space,
        values: data,
    }
}

/// Riemann-sum Lᵖ norm `(Σ|f|ᵖ Δⁿ)^{1/p}` with the cell volume of the
/// function's domain.
pub fn norm_lp(f: &GridFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::ExponentBelowOne(p));
    }
    let vol = f.spec.cell_volume(f.domain);
    let max = f.max_abs();
    if max == 0.0 {
        return Ok(0.0);
    }
    // factor out the max to keep |f|^p in range
    let s: f64 = f.values.iter().map(|v| (v.norm() / max).powf(p)).sum();
    Ok(max * (s * vol).powf(1.0 / p))
}

/// Multilinear interpolation of spatial samples at `x`, wrapping periodically.
pub fn sample_at(f: &GridFunction, x: &[f64]) -> Complex64 {
    let spec = &f.spec;
    let dim = spec.dim();
    let n = spec.samples();
    let h = spec.spacing();
    let mut base = [0usize; MAX_DIM];
    let mut frac = [0.0; MAX_DIM];
    for a in 0..dim {
        let u = (x[a] + 0.5 * spec.side()) / h;
        let fl = u.floor();
        frac[a] = u - fl;
        base[a] = (fl as i64).rem_euclid(n as i64) as usize;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for corner in 0..(1usize << dim) {
        let mut w = 1.0;
        let mut idx = [0usize; MAX_DIM];
        for a in 0..dim {
            if corner >> a & 1 == 1 {
                w *= frac[a];
                idx[a] = (base[a] + 1) % n;
            } else {
                w *= 1.0 - frac[a];
                idx[a] = base[a];
            }
        }
        if w != 0.0 {
            acc += f.values[spec.ravel(&idx)] * w;
        }
    }
    acc
}

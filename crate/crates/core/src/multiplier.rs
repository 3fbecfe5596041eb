//! Multiplier operators `(M_t f)^ = f̂·m(t·)` with `m = σ̂`, their maximal
//! function over a geometric grid of dilations, the dyadic pieces
//! `m_j = φ_j m`, the Hardy–Littlewood maximal function, and numerical
//! checks of the piecewise L² and pointwise domination estimates.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exponents::smooth_ramp;
use crate::fit::linear_fit;
use crate::grid::{fft_in_place, forward_ft, inverse_ft, norm_lp, sample_at, Domain, GridFunction, GridSpec, MAX_DIM};
use crate::measures::{ft, AtomicMeasure, MeasureSpec};

/// Geometric grid `t_i = t_min·2^{i/q}` covering `[t_min, t_max]`; the last
/// point is `t_max` itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_min: f64,
    t_max: f64,
    per_octave: u32,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self { t_min: 1.0 / 64.0, t_max: 4.0, per_octave: 8 }
    }
}

impl TimeGrid {
    pub fn new(t_min: f64, t_max: f64, per_octave: u32) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min && t_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("time grid [{t_min}, {t_max}]")));
        }
        if per_octave < 4 {
            return Err(Error::InvalidParameter(format!("{per_octave} points per octave, need >= 4")));
        }
        Ok(Self { t_min, t_max, per_octave })
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn per_octave(&self) -> u32 {
        self.per_octave
    }

    /// Same range with twice the density; its points contain these.
    pub fn refined(&self) -> Self {
        Self { per_octave: 2 * self.per_octave, ..*self }
    }

    pub fn points(&self) -> Vec<f64> {
        let q = self.per_octave as f64;
        let mut out = Vec::new();
        let mut i = 0u32;
        loop {
            // i/q is correctly rounded, so doubling q reproduces every point
            let t = self.t_min * 2f64.powf(i as f64 / q);
            if t >= self.t_max {
                break;
            }
            out.push(t);
            i += 1;
        }
        out.push(self.t_max);
        out
    }
}

/// Radial profile of the cutoff: 1 on `[0, 1]`, 0 on `[2, ∞)`, C^∞ glue
/// `g(2 − s)/(g(2 − s) + g(s − 1))` with `g(u) = e^{-1/u}` between.
pub fn psi(s: f64) -> f64 {
    1.0 - smooth_ramp(s - 1.0)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `φ₀(ξ) = ψ(|ξ|)`.
pub fn cutoff_phi0(xi: &[f64]) -> f64 {
    psi(norm(xi))
}

fn phi_radial(rho: f64, j: u32) -> f64 {
    if j == 0 {
        return psi(rho);
    }
    psi(rho * 2f64.powi(-(j as i32))) - psi(rho * 2f64.powi(1 - j as i32))
}

/// `φ_j(ξ) = φ₀(2^{-j}ξ) − φ₀(2^{1−j}ξ)`, supported in
/// `2^{j−1} ≤ |ξ| ≤ 2^{j+1}`; `j = 0` gives `φ₀`.
pub fn phi_j(xi: &[f64], j: u32) -> f64 {
    phi_radial(norm(xi), j)
}

/// Precomputed frequency layout: radial symbols are evaluated once per
/// distinct `|k|²` on the grid.
struct SymbolPlan {
    spec: GridSpec,
    slot: Vec<u32>,
    rho: Vec<f64>,
}

impl SymbolPlan {
    fn new(spec: &GridSpec) -> Self {
        let dim = spec.dim();
        let max_s = dim * (spec.samples() / 2).pow(2);
        let mut present = vec![false; max_s + 1];
        let sums: Vec<usize> = (0..spec.len())
            .map(|i| {
                let k = spec.wavenumber(i);
                k[..dim].iter().map(|&v| (v * v) as usize).sum()
            })
            .collect();
        for &s in &sums {
            present[s] = true;
        }
        let mut index = vec![u32::MAX; max_s + 1];
        let mut rho = Vec::new();
        for (s, &p) in present.iter().enumerate() {
            if p {
                index[s] = rho.len() as u32;
                rho.push((s as f64).sqrt() / spec.side());
            }
        }
        let slot = sums.iter().map(|&s| index[s]).collect();
        Self { spec: *spec, slot, rho }
    }

    /// `[φ_j(tξ)]·m(tξ)` on the frequency grid.
    fn symbol(&self, measure: &MeasureSpec, t: f64, piece: Option<u32>) -> Vec<Complex64> {
        if measure.is_radial() {
            let table: Vec<Complex64> = self
                .rho
                .iter()
                .map(|&r| {
                    let cut = piece.map_or(1.0, |j| phi_radial(t * r, j));
                    if cut == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        measure.radial_profile(t * r).expect("radial") * cut
                    }
                })
                .collect();
            self.slot.iter().map(|&s| table[s as usize]).collect()
        } else {
            let dim = self.spec.dim();
            (0..self.spec.len())
                .map(|i| {
                    let xi = self.spec.frequency(i);
                    let txi: Vec<f64> = xi[..dim].iter().map(|v| v * t).collect();
                    let cut = piece.map_or(1.0, |j| phi_j(&txi, j));
                    if cut == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        ft(measure, &txi) * cut
                    }
                })
                .collect()
        }
    }
}

fn is_identity(measure: &MeasureSpec, piece: Option<u32>) -> bool {
    piece.is_none() && matches!(measure, MeasureSpec::PointMass { location } if location.iter().all(|&v| v == 0.0))
}

fn check_inputs(f: &GridFunction, measure: &MeasureSpec) -> Result<()> {
    if f.domain() != Domain::Space {
        return Err(Error::InvalidParameter("expected spatial samples".into()));
    }
    if measure.dim() != f.spec().dim() {
        return Err(Error::InvalidMeasure(format!(
            "measure lives in dimension {}, grid in {}",
            measure.dim(),
            f.spec().dim()
        )));
    }
    Ok(())
}

fn check_dilation(spec: &GridSpec, measure: &MeasureSpec, t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("dilation t = {t} must be positive")));
    }
    let radius = measure.support_radius();
    let limit = spec.side() / 4.0;
    if t * radius > limit {
        return Err(Error::Aliasing { t, radius, limit });
    }
    Ok(())
}

fn apply_hat(fhat: &GridFunction, plan: &SymbolPlan, measure: &MeasureSpec, t: f64, piece: Option<u32>) -> GridFunction {
    let sym = plan.symbol(measure, t, piece);
    let values: Vec<Complex64> = fhat.values().iter().zip(&sym).map(|(a, b)| a * b).collect();
    let product = GridFunction::from_values(*fhat.spec(), Domain::Frequency, values).expect("finite symbol");
    inverse_ft(&product)
}

/// `M_t f = F^{-1}(f̂·[φ_j(t·)]·m(t·))`, with the dyadic cutoff applied when
/// `piece = Some(j)`.
///
/// Requires `t·(support radius) ≤ L/4` so the convolution stays inside the
/// periodic box.
pub fn apply_multiplier(f: &GridFunction, measure: &MeasureSpec, t: f64, piece: Option<u32>) -> Result<GridFunction> {
    check_inputs(f, measure)?;
    check_dilation(f.spec(), measure, t)?;
    if is_identity(measure, piece) {
        return Ok(f.clone());
    }
    let plan = SymbolPlan::new(f.spec());
    Ok(apply_hat(&forward_ft(f), &plan, measure, t, piece))
}

/// `M_t f(x) = Σ w_i f(x − t y_i)` by interpolating the samples of `f`
/// (periodic wrap outside the box).
pub fn direct_average(f: &GridFunction, sigma: &AtomicMeasure, t: f64, x: &[f64]) -> Complex64 {
    let dim = f.spec().dim();
    let mut y = [0.0; MAX_DIM];
    sigma
        .points()
        .iter()
        .zip(sigma.weights())
        .map(|(p, &w)| {
            for a in 0..dim {
                y[a] = x[a] - t * p[a];
            }
            sample_at(f, &y[..dim]) * w
        })
        .sum()
}

/// [`direct_average`] at many points.
pub fn direct_average_many(f: &GridFunction, sigma: &AtomicMeasure, t: f64, xs: &[Vec<f64>]) -> Vec<Complex64> {
    xs.par_iter().map(|x| direct_average(f, sigma, t, x)).collect()
}

fn elementwise_max(mut a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    for (x, y) in a.iter_mut().zip(b) {
        if y > *x {
            *x = y;
        }
    }
    a
}

fn maximal_from_hat(fhat: &GridFunction, plan: &SymbolPlan, measure: &MeasureSpec, tg: &TimeGrid, piece: Option<u32>) -> Vec<f64> {
    let len = fhat.spec().len();
    tg.points()
        .par_iter()
        .map(|&t| apply_hat(fhat, plan, measure, t, piece).moduli())
        .reduce(|| vec![0.0; len], elementwise_max)
}

fn real_function(spec: &GridSpec, values: Vec<f64>) -> GridFunction {
    GridFunction::from_real_unchecked(*spec, values)
}

/// `sup_t |M_t f|` over the time grid (pointwise, real and nonnegative).
pub fn maximal_multiplier(f: &GridFunction, measure: &MeasureSpec, tg: &TimeGrid, piece: Option<u32>) -> Result<GridFunction> {
    check_inputs(f, measure)?;
    check_dilation(f.spec(), measure, tg.t_max())?;
    if is_identity(measure, piece) {
        return Ok(f.abs());
    }
    let plan = SymbolPlan::new(f.spec());
    let values = maximal_from_hat(&forward_ft(f), &plan, measure, tg, piece);
    Ok(real_function(f.spec(), values))
}

/// Dyadic radii `2^k` within `[Δx, L/4]`.
pub fn default_radii(spec: &GridSpec) -> Vec<f64> {
    let lo = spec.spacing().log2().ceil() as i32;
    let hi = (spec.side() / 4.0).log2().floor() as i32;
    (lo..=hi).map(|k| 2f64.powi(k)).collect()
}

/// Centred Hardy–Littlewood maximal function over the given radii.
///
/// Each average is the sum of `|f|` over the grid points within distance
/// `r` divided by their count, computed by a zero-padded FFT convolution
/// (no periodic wrap; `f` vanishes outside the box). The radius-0 term
/// `|f(x)|` is always included; radii below `Δx` are skipped.
pub fn hl_maximal(f: &GridFunction, radii: &[f64]) -> Result<GridFunction> {
    let spec = f.spec();
    let dim = spec.dim();
    let n = spec.samples();
    let h = spec.spacing();
    if let Some(&r) = radii.iter().find(|&&r| !(r > 0.0) || r > spec.side() / 4.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!("radius {r} outside (0, L/4]")));
    }
    let moduli = f.moduli();
    let big = 2 * n;
    let big_len = big.pow(dim as u32);
    let big_index = |idx: &[usize]| idx[..dim].iter().fold(0usize, |acc, &i| acc * big + i);
    let mut padded = vec![Complex64::new(0.0, 0.0); big_len];
    for (i, &m) in moduli.iter().enumerate() {
        padded[big_index(&spec.unravel(i))] = Complex64::new(m, 0.0);
    }
    fft_in_place(&mut padded, dim, big, false);

    let usable: Vec<f64> = radii.iter().copied().filter(|&r| r >= h).collect();
    let averages: Vec<Vec<f64>> = usable
        .par_iter()
        .map(|&r| {
            let reach = (r / h).floor() as i64;
            let mut kernel = vec![Complex64::new(0.0, 0.0); big_len];
            let mut count = 0usize;
            let side = (2 * reach + 1) as usize;
            for flat in 0..side.pow(dim as u32) {
                let mut rest = flat;
                let mut off = [0i64; MAX_DIM];
                for a in (0..dim).rev() {
                    off[a] = (rest % side) as i64 - reach;
                    rest /= side;
                }
                let d2: f64 = off[..dim].iter().map(|&o| (o as f64 * h).powi(2)).sum();
                if d2 <= r * r * (1.0 + 1e-12) {
                    let mut idx = [0usize; MAX_DIM];
                    for a in 0..dim {
                        idx[a] = off[a].rem_euclid(big as i64) as usize;
                    }
                    kernel[big_index(&idx)] += Complex64::new(1.0, 0.0);
                    count += 1;
                }
            }
            fft_in_place(&mut kernel, dim, big, false);
            for (k, p) in kernel.iter_mut().zip(&padded) {
                *k *= p;
            }
            fft_in_place(&mut kernel, dim, big, true);
            let scale = 1.0 / (big_len as f64 * count as f64);
            (0..spec.len())
                .map(|i| (kernel[big_index(&spec.unravel(i))].re * scale).max(0.0))
                .collect()
        })
        .collect();
    let best = averages.into_iter().fold(moduli, elementwise_max);
    Ok(real_function(spec, best))
}

/// Per-piece L² ratios `‖M_j f‖₂/‖f‖₂` and their fitted log₂-slope in `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PieceRatios {
    pub ratios: Vec<(u32, f64)>,
    pub slope: f64,
}

fn fit_log2(ratios: &[(u32, f64)]) -> Result<f64> {
    let usable: Vec<(f64, f64)> = ratios
        .iter()
        .filter(|r| r.1 > 0.0 && r.1.is_finite())
        .map(|&(j, v)| (j as f64, v.log2()))
        .collect();
    if usable.len() < 2 {
        return Err(Error::Sampling("fewer than two nonzero pieces".into()));
    }
    let xs: Vec<f64> = usable.iter().map(|u| u.0).collect();
    let ys: Vec<f64> = usable.iter().map(|u| u.1).collect();
    Ok(linear_fit(&xs, &ys).slope)
}

fn check_pieces(spec: &GridSpec, tg: &TimeGrid, js: &RangeInclusive<u32>) -> Result<()> {
    let reach = tg.t_max() * spec.max_frequency();
    for j in js.clone() {
        if 2f64.powi(j as i32 - 1) >= reach {
            return Err(Error::BeyondNyquist { j, reach });
        }
    }
    Ok(())
}

/// `‖M_j f‖₂/‖f‖₂` for `j` in `js`.
pub fn check_31(f: &GridFunction, measure: &MeasureSpec, js: RangeInclusive<u32>, tg: &TimeGrid) -> Result<PieceRatios> {
    check_inputs(f, measure)?;
    check_dilation(f.spec(), measure, tg.t_max())?;
    check_pieces(f.spec(), tg, &js)?;
    let base = norm_lp(f, 2.0)?;
    if base == 0.0 {
        return Err(Error::InvalidParameter("f vanishes".into()));
    }
    let plan = SymbolPlan::new(f.spec());
    let fhat = forward_ft(f);
    let mut ratios = Vec::new();
    for j in js {
        let mj = real_function(f.spec(), maximal_from_hat(&fhat, &plan, measure, tg, Some(j)));
        ratios.push((j, norm_lp(&mj, 2.0)? / base));
    }
    let slope = fit_log2(&ratios)?;
    Ok(PieceRatios { ratios, slope })
}

/// Normalized domination ratios `sup_x M_j f(x)/(2^{j(n−β)} Mf(x))` over
/// points with `Mf(x) > 1e-8`.
pub fn check_33(
    f: &GridFunction,
    measure: &MeasureSpec,
    beta: f64,
    js: RangeInclusive<u32>,
    tg: &TimeGrid,
) -> Result<PieceRatios> {
    check_inputs(f, measure)?;
    check_dilation(f.spec(), measure, tg.t_max())?;
    check_pieces(f.spec(), tg, &js)?;
    check_nonnegative(f)?;
    let spec = f.spec();
    let hl = hl_maximal(f, &default_radii(spec))?.moduli();
    let plan = SymbolPlan::new(spec);
    let fhat = forward_ft(f);
    let nf = spec.dim() as f64;
    let mut ratios = Vec::new();
    for j in js {
        let mj = maximal_from_hat(&fhat, &plan, measure, tg, Some(j));
        let scale = 2f64.powf(j as f64 * (nf - beta));
        let sup = mj
            .iter()
            .zip(&hl)
            .filter(|(_, &m)| m > 1e-8)
            .map(|(&a, &m)| a / (scale * m))
            .fold(0.0, f64::max);
        ratios.push((j, sup));
    }
    let slope = fit_log2(&ratios)?;
    Ok(PieceRatios { ratios, slope })
}

fn check_nonnegative(f: &GridFunction) -> Result<()> {
    let bad = f.values().iter().any(|v| v.re < 0.0 || v.im.abs() > 1e-12 * v.re.abs().max(1.0));
    if bad || f.max_abs() == 0.0 {
        return Err(Error::InvalidParameter("f must be nonnegative and nontrivial".into()));
    }
    Ok(())
}

/// `max_x (M_m f − Σ_{j=0}^{J} M_j f)(x) / max M_m f` with `J` large enough
/// that the pieces cover every sampled `|tξ|`; nonpositive up to
/// round-off by the triangle inequality.
pub fn decomposition_excess(f: &GridFunction, measure: &MeasureSpec, tg: &TimeGrid) -> Result<f64> {
    check_inputs(f, measure)?;
    check_dilation(f.spec(), measure, tg.t_max())?;
    let reach = tg.t_max() * f.spec().max_frequency();
    let top = reach.log2().ceil() as u32 + 1;
    let plan = SymbolPlan::new(f.spec());
    let fhat = forward_ft(f);
    let whole = maximal_from_hat(&fhat, &plan, measure, tg, None);
    let mut sum = vec![0.0; whole.len()];
    for j in 0..=top {
        let mj = maximal_from_hat(&fhat, &plan, measure, tg, Some(j));
        for (s, v) in sum.iter_mut().zip(mj) {
            *s += v;
        }
    }
    let peak = whole.iter().cloned().fold(0.0, f64::max);
    let excess = whole.iter().zip(&sum).map(|(w, s)| w - s).fold(f64::NEG_INFINITY, f64::max);
    Ok(if peak > 0.0 { excess / peak } else { 0.0 })
}

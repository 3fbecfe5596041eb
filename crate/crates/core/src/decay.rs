//! Decay diagnostics for multipliers `m = σ̂`: the dilation square
//! functions `(∫₁² |m(tξ)|² dt)^{1/2}` and `(∫₁² |∇m(tξ)|² dt)^{1/2}`, and
//! power-law fits `C(1 + |ξ|)^{-α̂}`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::measures::{directions, ft, ft_gradient, MeasureSpec};

/// Minimum Simpson sample count.
const MIN_SAMPLES: usize = 65;
/// Samples per unit of `|ξ|·diam`, i.e. per oscillation of `t ↦ m(tξ)`.
const SAMPLES_PER_OSCILLATION: f64 = 16.0;
/// Minimum per-octave sample count in envelope mode.
const MIN_OCTAVE_SAMPLES: usize = 64;
/// Directions probed per magnitude for non-radial multipliers in n ≥ 2.
pub const DEFAULT_DIRECTIONS: usize = 8;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Simpson sample count for `t ∈ [1, 2]` at frequency `ξ`.
pub fn quadrature_samples(spec: &MeasureSpec, xi: &[f64]) -> usize {
    let want = (SAMPLES_PER_OSCILLATION * (1.0 + norm(xi) * spec.diameter_bound())).ceil() as usize;
    let odd = if want.is_multiple_of(2) { want + 1 } else { want };
    odd.max(MIN_SAMPLES)
}

/// Composite Simpson rule for `∫₁² g(t) dt` on `samples` (odd) nodes.
fn simpson<G: Fn(f64) -> f64>(g: G, samples: usize) -> f64 {
    let samples = if samples.is_multiple_of(2) { samples + 1 } else { samples };
    let intervals = samples - 1;
    let h = 1.0 / intervals as f64;
    let mut sum = g(1.0) + g(2.0);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * g(1.0 + i as f64 * h);
    }
    sum * h / 3.0
}

fn dilate(xi: &[f64], t: f64) -> Vec<f64> {
    xi.iter().map(|v| v * t).collect()
}

/// `(∫₁² |m(tξ)|² dt)^{1/2}` with an oscillation-aware sample count.
pub fn square_function(spec: &MeasureSpec, xi: &[f64]) -> f64 {
    square_function_with(spec, xi, quadrature_samples(spec, xi))
}

/// [`square_function`] with an explicit Simpson sample count.
pub fn square_function_with(spec: &MeasureSpec, xi: &[f64], samples: usize) -> f64 {
    simpson(|t| ft(spec, &dilate(xi, t)).norm_sqr(), samples).max(0.0).sqrt()
}

/// `(∫₁² |∇m(tξ)|² dt)^{1/2}`.
pub fn square_function_grad(spec: &MeasureSpec, xi: &[f64]) -> f64 {
    square_function_grad_with(spec, xi, quadrature_samples(spec, xi))
}

pub fn square_function_grad_with(spec: &MeasureSpec, xi: &[f64], samples: usize) -> f64 {
    let g = |t: f64| -> f64 {
        ft_gradient(spec, &dilate(xi, t))
            .iter()
            .map(|c| c.norm_sqr())
            .sum()
    };
    simpson(g, samples).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitMode {
    /// Least squares through the values at the given magnitudes.
    Regression,
    /// Least squares through per-octave maxima; robust to zeros of
    /// oscillating multipliers.
    Envelope,
}

impl std::fmt::Display for FitMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FitMode::Regression => "regression",
            FitMode::Envelope => "envelope",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub mode: FitMode,
    pub dim: usize,
    /// Number of directions per magnitude (ignored for `dim = 1`, which
    /// always probes `±1`).
    pub directions: usize,
    /// Envelope samples per unit `|ξ|`; set from the support diameter.
    pub density: f64,
}

impl FitOptions {
    /// Options matched to a measure: one direction for radial multipliers,
    /// [`DEFAULT_DIRECTIONS`] otherwise, envelope density `16·diam`.
    pub fn for_measure(spec: &MeasureSpec, mode: FitMode) -> Self {
        Self {
            mode,
            dim: spec.dim(),
            directions: if spec.is_radial() { 1 } else { DEFAULT_DIRECTIONS },
            density: SAMPLES_PER_OSCILLATION * spec.diameter_bound(),
        }
    }
}

/// Fitted bound `C(1 + |ξ|)^{-α̂}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub alpha: f64,
    pub c: f64,
    /// Largest deviation in log space.
    pub residual: f64,
    pub xi_range: (f64, f64),
    pub mode: FitMode,
    /// `(|ξ|, value)` pairs entering the fit.
    pub points: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
}

fn probe_directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    let count = if dim == 1 { 2 } else { count.max(1) };
    directions(dim, count)
        .into_iter()
        .take(count)
        .map(|d| d[..dim].to_vec())
        .collect()
}

/// Fits a power law to `sampler` over the dyadic `magnitudes`.
///
/// Needs at least 6 magnitudes spanning at least 5 octaves. In envelope
/// mode each consecutive pair of magnitudes bounds an octave sampled at
/// `max(64, density·width)` points per direction; the octave maximum and
/// its location enter the fit. Octaves (or magnitudes) where the sampler
/// vanishes are dropped with a warning.
pub fn fit_decay<F>(sampler: F, magnitudes: &[f64], opts: &FitOptions) -> Result<DecayFit>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if magnitudes.len() < 6 {
        return Err(Error::Sampling(format!("need >= 6 magnitudes, got {}", magnitudes.len())));
    }
    if magnitudes.windows(2).any(|w| !(w[1] > w[0])) || !(magnitudes[0] > 0.0) {
        return Err(Error::Sampling("magnitudes must be positive and increasing".into()));
    }
    let octaves = (magnitudes[magnitudes.len() - 1] / magnitudes[0]).log2();
    if octaves < 5.0 - 1e-9 {
        return Err(Error::Sampling(format!("magnitudes span {octaves:.2} octaves, need >= 5")));
    }
    let dirs = probe_directions(opts.dim, opts.directions);
    let sup_over_directions = |rho: f64| -> f64 {
        dirs.iter()
            .map(|d| sampler(&d.iter().map(|c| c * rho).collect::<Vec<_>>()))
            .fold(0.0, f64::max)
    };
    let mut warnings = Vec::new();
    let raw: Vec<(f64, f64)> = match opts.mode {
        FitMode::Regression => magnitudes
            .par_iter()
            .map(|&rho| (rho, sup_over_directions(rho)))
            .collect(),
        FitMode::Envelope => {
            let octaves: Vec<(f64, f64)> = magnitudes.windows(2).map(|w| (w[0], w[1])).collect();
            octaves
                .par_iter()
                .map(|&(a, b)| {
                    let count = ((opts.density * (b - a)).ceil() as usize).max(MIN_OCTAVE_SAMPLES);
                    let mut best = (a, 0.0);
                    for i in 0..=count {
                        let rho = a + (b - a) * i as f64 / count as f64;
                        let v = sup_over_directions(rho);
                        if v > best.1 {
                            best = (rho, v);
                        }
                    }
                    best
                })
                .collect()
        }
    };
    let mut points = Vec::with_capacity(raw.len());
    for (rho, v) in raw {
        if v > 0.0 && v.is_finite() {
            points.push((rho, v));
        } else {
            warnings.push(format!("dropped |xi| = {rho}: sampler vanished"));
        }
    }
    if points.len() < 2 {
        return Err(Error::Sampling("fewer than two usable samples".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| (1.0 + p.0).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let line = linear_fit(&xs, &ys);
    Ok(DecayFit {
        alpha: -line.slope,
        c: line.intercept.exp(),
        residual: line.max_residual,
        xi_range: (magnitudes[0], magnitudes[magnitudes.len() - 1]),
        mode: opts.mode,
        points,
        warnings,
    })
}

/// Dyadic magnitudes `2^lo, …, 2^hi`.
pub fn dyadic_magnitudes(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 2f64.powi(k)).collect()
}

/// Envelope fit of `|σ̂(ξ)|`.
pub fn pointwise_decay(spec: &MeasureSpec, magnitudes: &[f64]) -> Result<DecayFit> {
    fit_decay(|xi| ft(spec, xi).norm(), magnitudes, &FitOptions::for_measure(spec, FitMode::Envelope))
}

/// Regression fit of the square function.
pub fn square_function_decay(spec: &MeasureSpec, magnitudes: &[f64]) -> Result<DecayFit> {
    fit_decay(|xi| square_function(spec, xi), magnitudes, &FitOptions::for_measure(spec, FitMode::Regression))
}

/// Regression fit of the gradient square function.
pub fn square_function_grad_decay(spec: &MeasureSpec, magnitudes: &[f64]) -> Result<DecayFit> {
    fit_decay(
        |xi| square_function_grad(spec, xi),
        magnitudes,
        &FitOptions::for_measure(spec, FitMode::Regression),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn square_function_examples() {
        let circle = MeasureSpec::sphere(2, 1.0).unwrap();
        assert!((square_function(&circle, &[0.0, 0.0]) - 1.0).abs() < 1e-14);
        let pm = MeasureSpec::point_mass(vec![1.0]).unwrap();
        assert!((square_function(&pm, &[10.0]) - 1.0).abs() < 1e-12);
        assert!((square_function_grad(&pm, &[10.0]) - 2.0 * PI).abs() < 1e-12);
        assert!(square_function_grad(&circle, &[0.0, 0.0]).is_finite());

        let xi = [64.0, 0.0];
        let n = quadrature_samples(&circle, &xi);
        let coarse = square_function(&circle, &xi);
        let fine = square_function_with(&circle, &xi, 10 * n + 1);
        assert!((coarse - fine).abs() < 2e-3, "{coarse} vs {fine}");
        let g = square_function_grad(&circle, &xi);
        let gf = square_function_grad_with(&circle, &xi, 10 * n + 1);
        assert!((g - gf).abs() < 2e-3 * gf.max(1.0));
    }

    #[test]
    fn quadrature_doubling_is_stable() {
        let specs = [
            MeasureSpec::sphere(2, 1.0).unwrap(),
            MeasureSpec::ball(2, 1.0).unwrap(),
            MeasureSpec::cantor(4).unwrap(),
            MeasureSpec::cantor_radial(4, 2, 0.5, 8).unwrap(),
        ];
        for s in &specs {
            for rho in [3.0, 37.0, 200.0] {
                let xi: Vec<f64> = (0..s.dim()).map(|a| if a == 0 { rho } else { 0.0 }).collect();
                let n = quadrature_samples(s, &xi);
                let a = square_function_with(s, &xi, n);
                let b = square_function_with(s, &xi, 2 * n - 1);
                assert!((a - b).abs() < 1e-3 * b, "{s:?} rho={rho}: {a} vs {b}");
                let sup = (0..=4 * n)
                    .map(|i| ft(s, &dilate(&xi, 1.0 + i as f64 / (4 * n) as f64)).norm())
                    .fold(0.0, f64::max);
                assert!(a <= sup + 1e-6);
            }
        }
    }

    #[test]
    fn exact_power_law() {
        let mags = dyadic_magnitudes(2, 9);
        let opts = FitOptions { mode: FitMode::Regression, dim: 2, directions: 8, density: 16.0 };
        let fit = fit_decay(|xi| (1.0 + norm(xi)).powf(-0.75), &mags, &opts).unwrap();
        assert!((fit.alpha - 0.75).abs() < 1e-6);
        assert!((fit.c - 1.0).abs() < 1e-6);
        let env = FitOptions { mode: FitMode::Envelope, ..opts };
        let fit = fit_decay(|xi| (1.0 + norm(xi)).powf(-0.75), &mags, &env).unwrap();
        assert!((fit.alpha - 0.75).abs() < 1e-6);
        assert!(fit_decay(|_| 1.0, &mags[..5], &opts).is_err());
        assert!(fit_decay(|_| 1.0, &dyadic_magnitudes(2, 6), &opts).is_err());
    }

    #[test]
    fn vanishing_octaves_are_dropped() {
        let mags = dyadic_magnitudes(0, 7);
        let opts = FitOptions { mode: FitMode::Regression, dim: 1, directions: 1, density: 16.0 };
        let fit = fit_decay(|xi| if xi[0].abs() == 8.0 { 0.0 } else { 1.0 / (1.0 + xi[0].abs()) }, &mags, &opts).unwrap();
        assert_eq!(fit.warnings.len(), 1);
        assert!((fit.alpha - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circle_pointwise_decay() {
        let circle = MeasureSpec::sphere(2, 1.0).unwrap();
        let fit = pointwise_decay(&circle, &dyadic_magnitudes(2, 9)).unwrap();
        assert!((fit.alpha - 0.5).abs() < 0.05, "{fit:?}");
    }

    #[test]
    fn disk_pointwise_decay() {
        let disk = MeasureSpec::ball(2, 1.0).unwrap();
        let fit = pointwise_decay(&disk, &dyadic_magnitudes(2, 9)).unwrap();
        assert!((fit.alpha - 1.5).abs() < 0.1, "{fit:?}");
    }

    #[test]
    fn cantor_radial_square_function_gain() {
        let cr = MeasureSpec::cantor_radial(4, 2, 0.5, 10).unwrap();
        let mags = dyadic_magnitudes(2, 10);
        let sq = square_function_decay(&cr, &mags).unwrap();
        let env = pointwise_decay(&cr, &mags).unwrap();
        assert!((sq.alpha - 0.75).abs() < 0.1, "{sq:?}");
        assert!((env.alpha - 0.5).abs() < 0.1, "{env:?}");
        assert!(sq.alpha - env.alpha >= 0.15);
    }
}

//! Compactly supported Borel measures σ, their Fourier transforms
//! `m(ξ) = σ̂(ξ)`, gradients, atomic discretizations, and local dimension
//! estimates.

mod bessel;

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

pub use bessel::{bessel_j, bessel_j0, bessel_j1};

use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::grid::{Point, MAX_DIM};
use crate::syntax::Descriptor;

/// Radius of the ball that must contain every supported measure.
pub const MAX_SUPPORT_RADIUS: f64 = 2.0;

/// Default atomization level of the radial measure inside [`RadialMeasure`].
pub const DEFAULT_RADIAL_LEVEL: u32 = 10;

/// Default radial offset of the `cantor-radial` preset.
pub const DEFAULT_RADIAL_OFFSET: f64 = 0.5;

/// Symbolic description of a measure.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    /// Unit mass at `location`.
    PointMass { location: Vec<f64> },
    /// Surface measure on the sphere of `radius` in ℝ^`dim`.
    SphereSurface { dim: usize, radius: f64, normalized: bool },
    /// Lebesgue measure on the ball of `radius` in ℝ^`dim`.
    BallVolume { dim: usize, radius: f64, normalized: bool },
    /// Cantor measure of numbers `offset + Σ d_k base^{-k}`, `d_k ∈ {0, 1}`.
    CantorLine { base: u32, offset: f64 },
    /// `σ = ∫ ν_r dμ(r)` for a radial probability measure μ.
    RadialCompose(RadialMeasure),
}

/// Rotationally invariant measure built from a radial measure on `[0, 2]`.
///
/// The radial measure is atomized once at construction (`level`); both the
/// Fourier transform and [`atomize`] use these atoms, so the two describe
/// the same measure.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMeasure {
    radial: Box<MeasureSpec>,
    dim: usize,
    level: u32,
    radii: Vec<f64>,
    weights: Vec<f64>,
}

impl RadialMeasure {
    pub fn new(radial: MeasureSpec, dim: usize, level: u32) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidMeasure(format!("ambient dimension {dim}")));
        }
        if radial.dim() != 1 {
            return Err(Error::InvalidMeasure("radial measure must live on the line".into()));
        }
        let atoms = atomize(&radial, level)?;
        let radii: Vec<f64> = atoms.points.iter().map(|p| p[0]).collect();
        if radii.iter().any(|&r| !(0.0..=MAX_SUPPORT_RADIUS).contains(&r)) {
            return Err(Error::InvalidMeasure("radial support must lie in [0, 2]".into()));
        }
        Ok(Self {
            radial: Box::new(radial),
            dim,
            level,
            radii,
            weights: atoms.weights,
        })
    }

    pub fn radial(&self) -> &MeasureSpec {
        &self.radial
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl MeasureSpec {
    pub fn point_mass(location: Vec<f64>) -> Result<Self> {
        let s = Self::PointMass { location };
        s.validate()?;
        Ok(s)
    }

    pub fn delta(dim: usize) -> Result<Self> {
        Self::point_mass(vec![0.0; dim])
    }

    pub fn sphere(dim: usize, radius: f64) -> Result<Self> {
        let s = Self::SphereSurface { dim, radius, normalized: true };
        s.validate()?;
        Ok(s)
    }

    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        let s = Self::BallVolume { dim, radius, normalized: true };
        s.validate()?;
        Ok(s)
    }

    pub fn cantor(base: u32) -> Result<Self> {
        Self::cantor_shifted(base, 0.0)
    }

    pub fn cantor_shifted(base: u32, offset: f64) -> Result<Self> {
        let s = Self::CantorLine { base, offset };
        s.validate()?;
        Ok(s)
    }

    /// Rotationally invariant measure over the radii of a base-`base`
    /// Cantor measure shifted by `offset`.
    pub fn cantor_radial(base: u32, dim: usize, offset: f64, level: u32) -> Result<Self> {
        let radial = Self::cantor_shifted(base, offset)?;
        Ok(Self::RadialCompose(RadialMeasure::new(radial, dim, level)?))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMeasure(msg));
        match self {
            Self::PointMass { location } => {
                if !(1..=MAX_DIM).contains(&location.len()) {
                    return bad(format!("point mass in dimension {}", location.len()));
                }
                if location.iter().any(|v| !v.is_finite()) {
                    return bad("non-finite location".into());
                }
            }
            Self::SphereSurface { dim, radius, .. } | Self::BallVolume { dim, radius, .. } => {
                if !(1..=MAX_DIM).contains(dim) {
                    return bad(format!("dimension {dim} not in 1..=3"));
                }
                if !(*radius > 0.0) {
                    return bad(format!("radius {radius} must be positive"));
                }
            }
            Self::CantorLine { base, offset } => {
                if *base < 3 {
                    return bad(format!("Cantor base {base} must be >= 3"));
                }
                if !offset.is_finite() {
                    return bad("non-finite offset".into());
                }
            }
            Self::RadialCompose(_) => {}
        }
        let r = self.support_radius();
        if r > MAX_SUPPORT_RADIUS + 1e-12 {
            return bad(format!("support radius {r} exceeds {MAX_SUPPORT_RADIUS}"));
        }
        Ok(())
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        match self {
            Self::PointMass { location } => location.len(),
            Self::SphereSurface { dim, .. } | Self::BallVolume { dim, .. } => *dim,
            Self::CantorLine { .. } => 1,
            Self::RadialCompose(rm) => rm.dim,
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            Self::SphereSurface { dim, radius, normalized } if !normalized => {
                sphere_area(*dim, *radius)
            }
            Self::BallVolume { dim, radius, normalized } if !normalized => ball_volume(*dim, *radius),
            _ => 1.0,
        }
    }

    /// `sup |y|` over the support.
    pub fn support_radius(&self) -> f64 {
        match self {
            Self::PointMass { location } => norm(location),
            Self::SphereSurface { radius, .. } | Self::BallVolume { radius, .. } => *radius,
            Self::CantorLine { base, offset } => {
                let top = offset + 1.0 / (*base as f64 - 1.0);
                offset.abs().max(top.abs())
            }
            Self::RadialCompose(rm) => rm.radii.iter().cloned().fold(0.0, f64::max),
        }
    }

    /// Diameter of the smallest origin-centred ball holding the support;
    /// sets the oscillation rate of `t ↦ m(tξ)`.
    pub fn diameter_bound(&self) -> f64 {
        2.0 * self.support_radius()
    }

    /// True when σ̂ depends on |ξ| only.
    pub fn is_radial(&self) -> bool {
        match self {
            Self::PointMass { location } => location.iter().all(|&v| v == 0.0),
            Self::SphereSurface { .. } | Self::BallVolume { .. } | Self::RadialCompose(_) => true,
            Self::CantorLine { .. } => false,
        }
    }

    /// σ̂ as a function of ρ = |ξ| for radial measures.
    pub fn radial_profile(&self, rho: f64) -> Option<Complex64> {
        let mass = self.total_mass();
        let v = match self {
            Self::PointMass { .. } if self.is_radial() => 1.0,
            Self::SphereSurface { dim, radius, .. } => sphere_profile(*dim, *radius, rho),
            Self::BallVolume { dim, radius, .. } => ball_profile(*dim, *radius, rho),
            Self::RadialCompose(rm) => rm
                .radii
                .iter()
                .zip(&rm.weights)
                .map(|(&r, &w)| w * sphere_profile(rm.dim, r, rho))
                .sum(),
            _ => return None,
        };
        Some(Complex64::new(mass * v, 0.0))
    }

    /// d/dρ of [`Self::radial_profile`], where available in closed form.
    fn radial_derivative(&self, rho: f64) -> Option<f64> {
        let mass = self.total_mass();
        let v = match self {
            Self::PointMass { .. } if self.is_radial() => 0.0,
            Self::SphereSurface { dim, radius, .. } => sphere_derivative(*dim, *radius, rho),
            Self::BallVolume { dim: 2, radius, .. } => {
                let z = 2.0 * PI * radius * rho;
                if z == 0.0 {
                    0.0
                } else {
                    2.0 * PI * radius * (-2.0 * bessel_j(2, z) / z)
                }
            }
            Self::RadialCompose(rm) => rm
                .radii
                .iter()
                .zip(&rm.weights)
                .map(|(&r, &w)| w * sphere_derivative(rm.dim, r, rho))
                .sum(),
            _ => return None,
        };
        Some(mass * v)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sphere_area(dim: usize, r: f64) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI * r,
        _ => 4.0 * PI * r * r,
    }
}

fn ball_volume(dim: usize, r: f64) -> f64 {
    match dim {
        1 => 2.0 * r,
        2 => PI * r * r,
        _ => 4.0 / 3.0 * PI * r.powi(3),
    }
}

/// Normalized sphere transform at |ξ| = ρ.
fn sphere_profile(dim: usize, r: f64, rho: f64) -> f64 {
    let z = 2.0 * PI * r * rho;
    match dim {
        1 => z.cos(),
        2 => bessel_j0(z),
        _ => sinc(z),
    }
}

fn sphere_derivative(dim: usize, r: f64, rho: f64) -> f64 {
    let k = 2.0 * PI * r;
    let z = k * rho;
    match dim {
        1 => -k * z.sin(),
        2 => -k * bessel_j1(z),
        _ => {
            if z.abs() < 1e-3 {
                k * (-z / 3.0 + z.powi(3) / 30.0)
            } else {
                k * (z * z.cos() - z.sin()) / (z * z)
            }
        }
    }
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// Normalized ball transform at |ξ| = ρ.
fn ball_profile(dim: usize, r: f64, rho: f64) -> f64 {
    let z = 2.0 * PI * r * rho;
    match dim {
        1 => sinc(z),
        2 => {
            if z == 0.0 {
                1.0
            } else {
                2.0 * bessel_j1(z) / z
            }
        }
        _ => {
            if z.abs() < 1e-2 {
                let z2 = z * z;
                1.0 - z2 / 10.0 + z2 * z2 / 280.0
            } else {
                3.0 * (z.sin() - z * z.cos()) / z.powi(3)
            }
        }
    }
}

/// Number of Cantor factors kept: the smallest K with π|ξ|m^{-K} < 1e-7.
fn cantor_depth(base: u32, xi: f64) -> u32 {
    let m = base as f64;
    let mut k = 1u32;
    let mut s = PI * xi.abs() / m;
    while s >= 1e-7 && k < 200 {
        s /= m;
        k += 1;
    }
    k
}

/// Total phase shift of the Cantor measure: its centre of mass.
fn cantor_centre(base: u32, offset: f64) -> f64 {
    offset + 0.5 / (base as f64 - 1.0)
}

fn cantor_ft(base: u32, offset: f64, xi: f64) -> Complex64 {
    // (1 + e^{-2πiξ/m^k})/2 = e^{-iπξ/m^k} cos(πξ/m^k); the phases sum to
    // πξ/(m-1) in closed form, only the cosine product is truncated
    let m = base as f64;
    let depth = cantor_depth(base, xi);
    let mut prod = 1.0;
    let mut scale = 1.0 / m;
    for _ in 0..depth {
        prod *= (PI * xi * scale).cos();
        scale /= m;
    }
    Complex64::from_polar(1.0, -2.0 * PI * cantor_centre(base, offset) * xi) * prod
}

fn cantor_ft_derivative(base: u32, offset: f64, xi: f64) -> Complex64 {
    let m = base as f64;
    let depth = cantor_depth(base, xi) as usize;
    let mut args = Vec::with_capacity(depth);
    let mut scale = 1.0 / m;
    for _ in 0..depth {
        args.push((PI * xi * scale, PI * scale));
        scale /= m;
    }
    let cos: Vec<f64> = args.iter().map(|(a, _)| a.cos()).collect();
    // prefix/suffix products avoid dividing by vanishing factors
    let mut prefix = vec![1.0; depth + 1];
    for k in 0..depth {
        prefix[k + 1] = prefix[k] * cos[k];
    }
    let mut suffix = vec![1.0; depth + 1];
    for k in (0..depth).rev() {
        suffix[k] = suffix[k + 1] * cos[k];
    }
    let prod = prefix[depth];
    let dprod: f64 = (0..depth)
        .map(|k| -args[k].1 * args[k].0.sin() * prefix[k] * suffix[k + 1])
        .sum();
    let c = cantor_centre(base, offset);
    let phase = Complex64::from_polar(1.0, -2.0 * PI * c * xi);
    phase * (Complex64::new(0.0, -2.0 * PI * c) * prod + dprod)
}

/// Fourier transform `σ̂(ξ) = ∫ e^{-2πi y·ξ} dσ(y)`.
pub fn ft(spec: &MeasureSpec, xi: &[f64]) -> Complex64 {
    match spec {
        MeasureSpec::PointMass { location } => {
            let phase: f64 = location.iter().zip(xi).map(|(a, b)| a * b).sum();
            Complex64::from_polar(1.0, -2.0 * PI * phase)
        }
        MeasureSpec::CantorLine { base, offset } => cantor_ft(*base, *offset, xi[0]),
        _ => spec
            .radial_profile(norm(&xi[..spec.dim()]))
            .expect("radial measure"),
    }
}

/// Gradient of σ̂ at ξ: analytic where a closed form exists, otherwise
/// central differences with step `1e-5·(1 + |ξ|)`.
pub fn ft_gradient(spec: &MeasureSpec, xi: &[f64]) -> Vec<Complex64> {
    let dim = spec.dim();
    let xi = &xi[..dim];
    match spec {
        MeasureSpec::PointMass { location } => {
            let v = ft(spec, xi);
            location
                .iter()
                .map(|&x0| Complex64::new(0.0, -2.0 * PI * x0) * v)
                .collect()
        }
        MeasureSpec::CantorLine { base, offset } => vec![cantor_ft_derivative(*base, *offset, xi[0])],
        _ => {
            let rho = norm(xi);
            match spec.radial_derivative(rho) {
                Some(_) if rho == 0.0 => vec![Complex64::new(0.0, 0.0); dim],
                Some(d) => xi.iter().map(|&x| Complex64::new(d * x / rho, 0.0)).collect(),
                None => finite_difference_gradient(spec, xi),
            }
        }
    }
}

pub(crate) fn finite_difference_gradient(spec: &MeasureSpec, xi: &[f64]) -> Vec<Complex64> {
    let h = 1e-5 * (1.0 + norm(xi));
    (0..xi.len())
        .map(|a| {
            let mut plus = xi.to_vec();
            let mut minus = xi.to_vec();
            plus[a] += h;
            minus[a] -= h;
            (ft(spec, &plus) - ft(spec, &minus)) / (2.0 * h)
        })
        .collect()
}

/// Weighted atoms approximating a measure.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    dim: usize,
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl AtomicMeasure {
    pub fn new(dim: usize, points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() || points.is_empty() {
            return Err(Error::InvalidMeasure("atoms and weights must pair up".into()));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidMeasure("atom weights must be positive".into()));
        }
        Ok(Self { dim, points, weights })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ w_i e^{-2πi y_i·ξ}`.
    pub fn ft(&self, xi: &[f64]) -> Complex64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, &w)| {
                let phase: f64 = (0..self.dim).map(|a| p[a] * xi[a]).sum();
                Complex64::from_polar(w, -2.0 * PI * phase)
            })
            .sum()
    }
}

fn point_from(v: &[f64]) -> Point {
    let mut p = [0.0; MAX_DIM];
    p[..v.len()].copy_from_slice(v);
    p
}

/// Unit directions: `count` equispaced angles in the plane, a Fibonacci
/// lattice on S², or `±1` on the line.
pub(crate) fn directions(dim: usize, count: usize) -> Vec<Point> {
    match dim {
        1 => vec![point_from(&[1.0]), point_from(&[-1.0])],
        2 => (0..count)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / count as f64;
                point_from(&[a.cos(), a.sin()])
            })
            .collect(),
        _ => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
                    let rr = (1.0 - z * z).max(0.0).sqrt();
                    let a = golden * i as f64;
                    point_from(&[rr * a.cos(), rr * a.sin(), z])
                })
                .collect()
        }
    }
}

/// Discretizes a measure into weighted atoms at resolution `level`.
///
/// * spheres: `2^level` equispaced angles (a Fibonacci lattice on S²; the
///   two points `±r` on the line),
/// * balls: cell centres of a cubic lattice with `2^⌈level/n⌉` cells per axis,
/// * Cantor line: the `2^level` points `offset + Σ_{k≤level} d_k m^{-k}`,
/// * radial compositions: the stored radial atoms times `2^level` directions.
pub fn atomize(spec: &MeasureSpec, level: u32) -> Result<AtomicMeasure> {
    if !(1..=24).contains(&level) {
        return Err(Error::InvalidMeasure(format!("atomization level {level} not in 1..=24")));
    }
    let mass = spec.total_mass();
    let dim = spec.dim();
    match spec {
        MeasureSpec::PointMass { location } => {
            AtomicMeasure::new(dim, vec![point_from(location)], vec![1.0])
        }
        MeasureSpec::SphereSurface { radius, .. } => {
            let dirs = directions(dim, 1usize << level);
            let w = mass / dirs.len() as f64;
            let points = dirs
                .into_iter()
                .map(|d| d.map(|c| c * radius))
                .collect::<Vec<_>>();
            let count = points.len();
            AtomicMeasure::new(dim, points, vec![w; count])
        }
        MeasureSpec::BallVolume { radius, .. } => {
            let per_axis = 1usize << level.div_ceil(dim as u32);
            let h = 2.0 * radius / per_axis as f64;
            let mut points = Vec::new();
            let total = per_axis.pow(dim as u32);
            for flat in 0..total {
                let mut rest = flat;
                let mut p = [0.0; MAX_DIM];
                for a in (0..dim).rev() {
                    p[a] = -radius + (rest % per_axis) as f64 * h + 0.5 * h;
                    rest /= per_axis;
                }
                if norm(&p[..dim]) <= *radius {
                    points.push(p);
                }
            }
            let w = mass / points.len() as f64;
            let count = points.len();
            AtomicMeasure::new(dim, points, vec![w; count])
        }
        MeasureSpec::CantorLine { base, offset } => {
            let m = *base as f64;
            let count = 1usize << level;
            let points = (0..count)
                .map(|i| {
                    let mut x = *offset;
                    let mut scale = 1.0;
                    for k in 0..level {
                        scale /= m;
                        if i >> (level - 1 - k) & 1 == 1 {
                            x += scale;
                        }
                    }
                    point_from(&[x])
                })
                .collect();
            AtomicMeasure::new(1, points, vec![1.0 / count as f64; count])
        }
        MeasureSpec::RadialCompose(rm) => {
            let dirs = directions(dim, 1usize << level);
            let mut points = Vec::with_capacity(rm.radii.len() * dirs.len());
            let mut weights = Vec::with_capacity(points.capacity());
            for (&r, &w) in rm.radii.iter().zip(&rm.weights) {
                if r == 0.0 {
                    points.push([0.0; MAX_DIM]);
                    weights.push(w);
                    continue;
                }
                for d in &dirs {
                    points.push(d.map(|c| c * r));
                    weights.push(w / dirs.len() as f64);
                }
            }
            AtomicMeasure::new(dim, points, weights)
        }
    }
}

/// Fitted local dimension `σ(B(x, R)) ≈ C_β R^β`.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionFit {
    pub beta: f64,
    pub c_beta: f64,
    pub radii: (f64, f64),
    pub residual: f64,
    pub samples: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
}

const MAX_CENTRES: usize = 4096;

/// Estimates β from `R ↦ sup_x σ(B(x, R))` by least squares in log-log.
///
/// Centres are atoms (a strided subset beyond 4096 atoms). Any ball
/// `B(x, R)` meeting the support contains an atom centre `y` with
/// `B(x, R) ⊂ B(y, 2R)`, so the atom-centred sup at `2R` dominates the
/// true sup at `R` and the fitted slope is unaffected.
pub fn beta_dimension_estimate(sigma: &AtomicMeasure, radii: &[f64]) -> Result<DimensionFit> {
    if radii.len() < 4 {
        return Err(Error::Sampling(format!("need >= 4 radii, got {}", radii.len())));
    }
    if radii.iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
        return Err(Error::Sampling("radii must lie in (0, 1]".into()));
    }
    let lo = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = radii.iter().cloned().fold(0.0, f64::max);
    let octaves = (hi / lo).log2();
    if octaves < 3.0 - 1e-9 {
        return Err(Error::Sampling(format!("radii span {octaves:.2} octaves, need >= 3")));
    }
    let mut warnings = Vec::new();
    if sigma.len() == 1 {
        warnings.push("single-atom measure: beta = 0".to_string());
        return Ok(DimensionFit {
            beta: 0.0,
            c_beta: sigma.total_mass(),
            radii: (lo, hi),
            residual: 0.0,
            samples: radii.iter().map(|&r| (r, sigma.total_mass())).collect(),
            warnings,
        });
    }
    if (sigma.len() as f64) < 2f64.powf(octaves) {
        return Err(Error::Sampling(format!(
            "{} atoms cannot resolve {octaves:.1} octaves",
            sigma.len()
        )));
    }
    let stride = sigma.len().div_ceil(MAX_CENTRES);
    let centres: Vec<usize> = (0..sigma.len()).step_by(stride).collect();
    let samples: Vec<(f64, f64)> = radii.iter().map(|&r| (r, max_ball_mass(sigma, &centres, r))).collect();
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let line = linear_fit(&xs, &ys);
    Ok(DimensionFit {
        beta: line.slope,
        c_beta: line.intercept.exp(),
        radii: (lo, hi),
        residual: line.max_residual,
        samples,
        warnings,
    })
}

fn max_ball_mass(sigma: &AtomicMeasure, centres: &[usize], r: f64) -> f64 {
    let dim = sigma.dim;
    let cell = |p: &Point| -> [i64; MAX_DIM] {
        let mut c = [0i64; MAX_DIM];
        for a in 0..dim {
            c[a] = (p[a] / r).floor() as i64;
        }
        c
    };
    let mut buckets: HashMap<[i64; MAX_DIM], Vec<usize>> = HashMap::new();
    for (i, p) in sigma.points.iter().enumerate() {
        buckets.entry(cell(p)).or_default().push(i);
    }
    let r2 = r * r;
    let neighbours = 3usize.pow(dim as u32);
    centres
        .iter()
        .map(|&ci| {
            let x = &sigma.points[ci];
            let base = cell(x);
            let mut mass = 0.0;
            for nb in 0..neighbours {
                let mut key = base;
                let mut rest = nb;
                for k in key.iter_mut().take(dim) {
                    *k += (rest % 3) as i64 - 1;
                    rest /= 3;
                }
                if let Some(list) = buckets.get(&key) {
                    for &j in list {
                        let y = &sigma.points[j];
                        let d2: f64 = (0..dim).map(|a| (x[a] - y[a]).powi(2)).sum();
                        if d2 <= r2 {
                            mass += sigma.weights[j];
                        }
                    }
                }
            }
            mass
        })
        .fold(0.0, f64::max)
}

/// Parses the measure mini-syntax: `delta`, `circle:r=1`, `sphere3:r=1`,
/// `disk:r=1`, `cantor:m=4[,offset=0]`,
/// `cantor-radial:m=4,n=2[,offset=0.5,level=10]`. `delta` lives in the
/// ambient dimension `dim`.
pub fn parse_measure(text: &str, dim: usize) -> Result<MeasureSpec> {
    let d = Descriptor::parse(text)?;
    if !d.positional().is_empty() {
        return Err(Error::Parse(format!("unexpected positional arguments in `{text}`")));
    }
    let integer = |key: &str, v: f64| -> Result<u32> {
        if v.fract() != 0.0 || v < 0.0 {
            return Err(Error::Parse(format!("`{key}` must be a non-negative integer")));
        }
        Ok(v as u32)
    };
    let spec = match d.name {
        "delta" => MeasureSpec::delta(dim)?,
        "circle" => MeasureSpec::sphere(2, d.number_or("r", 1.0)?)?,
        "sphere3" => MeasureSpec::sphere(3, d.number_or("r", 1.0)?)?,
        "disk" => MeasureSpec::ball(2, d.number_or("r", 1.0)?)?,
        "cantor" => {
            let m = integer("m", d.required("m")?)?;
            MeasureSpec::cantor_shifted(m, d.number_or("offset", 0.0)?)?
        }
        "cantor-radial" => {
            let m = integer("m", d.required("m")?)?;
            let n = integer("n", d.number_or("n", dim as f64)?)? as usize;
            let offset = d.number_or("offset", DEFAULT_RADIAL_OFFSET)?;
            let level = integer("level", d.number_or("level", DEFAULT_RADIAL_LEVEL as f64)?)?;
            MeasureSpec::cantor_radial(m, n, offset, level)?
        }
        other => return Err(Error::Parse(format!("unknown measure `{other}`"))),
    };
    d.finish()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn atomize_examples() {
        let pm = atomize(&MeasureSpec::delta(2).unwrap(), 4).unwrap();
        assert_eq!(pm.len(), 1);
        assert_eq!(pm.weights(), &[1.0]);

        let c = atomize(&MeasureSpec::cantor(4).unwrap(), 2).unwrap();
        let pts: Vec<f64> = c.points().iter().map(|p| p[0]).collect();
        assert_eq!(pts, vec![0.0, 1.0 / 16.0, 0.25, 5.0 / 16.0]);
        assert_eq!(c.weights(), &[0.25; 4]);

        let s = atomize(&MeasureSpec::sphere(2, 1.0).unwrap(), 3).unwrap();
        assert_eq!(s.len(), 8);
        assert!((s.total_mass() - 1.0).abs() < 1e-12);
        for p in s.points() {
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-15);
        }
        assert!(atomize(&MeasureSpec::sphere(2, 1.0).unwrap(), 0).is_err());
    }

    #[test]
    fn transforms_at_origin_are_total_mass() {
        let specs = [
            MeasureSpec::delta(2).unwrap(),
            MeasureSpec::point_mass(vec![0.3, -0.2]).unwrap(),
            MeasureSpec::sphere(1, 1.0).unwrap(),
            MeasureSpec::sphere(2, 1.0).unwrap(),
            MeasureSpec::sphere(3, 0.5).unwrap(),
            MeasureSpec::ball(1, 1.0).unwrap(),
            MeasureSpec::ball(2, 1.0).unwrap(),
            MeasureSpec::ball(3, 1.0).unwrap(),
            MeasureSpec::cantor(4).unwrap(),
            MeasureSpec::cantor_radial(4, 2, 0.5, 8).unwrap(),
        ];
        for s in &specs {
            let v = ft(s, &[0.0; 3]);
            assert!(close(v, Complex64::new(1.0, 0.0), 1e-14), "{s:?}: {v}");
        }
    }

    #[test]
    fn closed_form_values() {
        let s3 = MeasureSpec::sphere(3, 1.0).unwrap();
        assert!(ft(&s3, &[0.5, 0.0, 0.0]).norm() < 1e-15);
        let cantor = MeasureSpec::cantor(4).unwrap();
        let v = ft(&cantor, &[1.0]).norm();
        // oracle: the cosine product carried to 40 factors
        let oracle: f64 = (1..=40).map(|k| (PI / 4f64.powi(k)).cos()).product();
        assert!((v - oracle).abs() < 1e-12);
        assert!((v - 0.69263).abs() < 1e-5);
        let circle = MeasureSpec::sphere(2, 1.0).unwrap();
        assert!(close(ft(&circle, &[0.3, 0.4]), Complex64::new(bessel_j0(PI), 0.0), 1e-15));
    }

    #[test]
    fn cantor_scaling_identity() {
        let cantor = MeasureSpec::cantor(4).unwrap();
        for &xi in &[0.1, 0.37, 1.0, 2.5, 13.3] {
            let lhs = ft(&cantor, &[4.0 * xi]);
            let factor = (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, -2.0 * PI * xi)) / 2.0;
            let rhs = factor * ft(&cantor, &[xi]);
            assert!(close(lhs, rhs, 1e-10), "xi={xi}");
        }
        let at_one = ft(&cantor, &[1.0]).norm();
        for k in 0..=8 {
            assert!((ft(&cantor, &[4f64.powi(k)]).norm() - at_one).abs() < 1e-10);
        }
    }

    #[test]
    fn hermitian_symmetry() {
        let specs = [
            MeasureSpec::point_mass(vec![0.7]).unwrap(),
            MeasureSpec::cantor_shifted(3, 0.25).unwrap(),
            MeasureSpec::sphere(2, 1.0).unwrap(),
        ];
        for s in &specs {
            for &x in &[0.3, 1.7, 9.1] {
                let xi = vec![x; s.dim()];
                let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
                assert!(close(ft(s, &neg), ft(s, &xi).conj(), 1e-12));
            }
        }
    }

    #[test]
    fn atomic_transform_converges() {
        let circle = MeasureSpec::sphere(2, 1.0).unwrap();
        let atoms = atomize(&circle, 10).unwrap();
        for &rho in &[1.0, 7.5, 40.0, 64.0] {
            let xi = [rho * 0.6, rho * 0.8];
            assert!((ft(&circle, &xi) - atoms.ft(&xi)).norm() < 1e-3, "rho={rho}");
        }
        let cr = MeasureSpec::cantor_radial(4, 2, 0.5, 8).unwrap();
        let atoms = atomize(&cr, 10).unwrap();
        for &rho in &[3.0, 20.0, 64.0] {
            let xi = [0.0, rho];
            assert!((ft(&cr, &xi) - atoms.ft(&xi)).norm() < 1e-3, "rho={rho}");
        }
        let cantor = MeasureSpec::cantor(3).unwrap();
        let atoms = atomize(&cantor, 16).unwrap();
        for &x in &[1.0, 10.0, 64.0] {
            assert!((ft(&cantor, &[x]) - atoms.ft(&[x])).norm() < 1e-3);
        }
    }

    #[test]
    fn gradient_examples() {
        let circle = MeasureSpec::sphere(2, 1.0).unwrap();
        let g = ft_gradient(&circle, &[1.0, 0.0]);
        assert!(close(g[0], Complex64::new(-2.0 * PI * bessel_j1(2.0 * PI), 0.0), 1e-14));
        assert!(g[1].norm() < 1e-15);
        let fd = finite_difference_gradient(&circle, &[1.0, 0.0]);
        assert!((fd[0] - g[0]).norm() < 1e-6 * g[0].norm());

        let x0 = vec![0.4, -0.1];
        let pm = MeasureSpec::point_mass(x0.clone()).unwrap();
        let xi = [2.0, 3.0];
        let g = ft_gradient(&pm, &xi);
        let v = ft(&pm, &xi);
        for a in 0..2 {
            assert!(close(g[a], Complex64::new(0.0, -2.0 * PI * x0[a]) * v, 1e-14));
        }
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let specs = [
            MeasureSpec::sphere(2, 1.0).unwrap(),
            MeasureSpec::sphere(3, 0.7).unwrap(),
            MeasureSpec::sphere(1, 1.3).unwrap(),
            MeasureSpec::ball(2, 1.0).unwrap(),
            MeasureSpec::cantor(4).unwrap(),
            MeasureSpec::cantor_shifted(5, 0.5).unwrap(),
            MeasureSpec::cantor_radial(4, 2, 0.5, 6).unwrap(),
        ];
        for s in &specs {
            for _ in 0..100 {
                let xi: Vec<f64> = (0..s.dim()).map(|_| rng.gen_range(-20.0..20.0)).collect();
                let g = ft_gradient(s, &xi);
                let fd = finite_difference_gradient(s, &xi);
                // relative to |∇m|, floored so zeros of the gradient do not demand absolute 1e-12
                let scale = g.iter().map(|v| v.norm()).fold(1e-2, f64::max);
                for a in 0..s.dim() {
                    assert!(
                        (g[a] - fd[a]).norm() < 1e-6 * scale,
                        "{s:?} xi={xi:?}: {} vs {}",
                        g[a],
                        fd[a]
                    );
                }
            }
        }
    }

    #[test]
    fn dimension_estimates() {
        let radii: Vec<f64> = (0..7).map(|k| 2f64.powi(-k)).collect();
        let pm = atomize(&MeasureSpec::delta(2).unwrap(), 4).unwrap();
        let fit = beta_dimension_estimate(&pm, &radii).unwrap();
        assert_eq!(fit.beta, 0.0);
        assert!(!fit.warnings.is_empty());

        let circle = atomize(&MeasureSpec::sphere(2, 1.0).unwrap(), 12).unwrap();
        let fit = beta_dimension_estimate(&circle, &radii).unwrap();
        assert!((fit.beta - 1.0).abs() < 0.1, "{fit:?}");

        let disk = atomize(&MeasureSpec::ball(2, 1.0).unwrap(), 16).unwrap();
        let r4: Vec<f64> = (0..5).map(|k| 2f64.powi(-k)).collect();
        let fit = beta_dimension_estimate(&disk, &r4).unwrap();
        assert!((fit.beta - 2.0).abs() < 0.15, "{fit:?}");

        assert!(beta_dimension_estimate(&circle, &radii[..3]).is_err());
        assert!(beta_dimension_estimate(&circle, &[0.5, 0.4, 0.3, 0.25]).is_err());
    }

    #[test]
    fn cantor_radial_dimension() {
        let cr = MeasureSpec::cantor_radial(4, 2, DEFAULT_RADIAL_OFFSET, 8).unwrap();
        let atoms = atomize(&cr, 11).unwrap();
        let radii: Vec<f64> = (2..8).map(|k| 2f64.powi(-k)).collect();
        let fit = beta_dimension_estimate(&atoms, &radii).unwrap();
        assert!((fit.beta - 1.5).abs() < 0.15, "{fit:?}");
    }

    #[test]
    fn parse_presets() {
        assert_eq!(parse_measure("delta", 2).unwrap(), MeasureSpec::delta(2).unwrap());
        assert_eq!(parse_measure("circle:r=1", 2).unwrap(), MeasureSpec::sphere(2, 1.0).unwrap());
        assert_eq!(parse_measure("sphere3:r=0.5", 3).unwrap(), MeasureSpec::sphere(3, 0.5).unwrap());
        assert_eq!(parse_measure("disk:r=1", 2).unwrap(), MeasureSpec::ball(2, 1.0).unwrap());
        assert_eq!(parse_measure("cantor:m=4", 1).unwrap(), MeasureSpec::cantor(4).unwrap());
        let cr = parse_measure("cantor-radial:m=4,n=2", 2).unwrap();
        assert_eq!(cr, MeasureSpec::cantor_radial(4, 2, 0.5, DEFAULT_RADIAL_LEVEL).unwrap());
        assert!(parse_measure("cantor:m=2", 1).is_err());
        assert!(parse_measure("circle:r=3", 2).is_err());
        assert!(parse_measure("circle:radius=1", 2).is_err());
        assert!(parse_measure("torus", 2).is_err());
    }
}

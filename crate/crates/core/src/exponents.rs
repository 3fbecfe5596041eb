//! Variable exponents `p(·)`: closed-form families and tabulated fields,
//! log-Hölder diagnostics, the interpolation map `p ↦ p̃`, and the
//! admissible-range calculators for maximal multiplier bounds.
//!
//! Throughout, `D = 2n + 2α − 2β − 1` for decay rate `α` and local
//! dimension `β` of the measure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, RangeSide, Result};
use crate::grid::{GridSpec, Point, MAX_DIM};
use crate::syntax::{parse_f64, Descriptor};

/// Default finiteness threshold on the log-Hölder constants.
pub const DEFAULT_LOG_HOLDER_THRESHOLD: f64 = 1e3;

/// How an exponent is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum ExponentRule {
    Constant(f64),
    /// `from` for `x₀ < center − width/2`, `to` beyond `center + width/2`,
    /// with a C^∞ transition between. `width = 0` is a hard step taking
    /// the value `to` from `center` on.
    SmoothStep { from: f64, to: f64, center: f64, width: f64 },
    /// `p_inf + amplitude / log(e + |x|)`.
    Radial { p_inf: f64, amplitude: f64 },
    /// Samples on the nodes of a grid, multilinear in between and clamped
    /// outside the box.
    Tabulated { spec: GridSpec, values: Vec<f64> },
    /// `2θp/(2 − (1 − θ)p)` applied to another field.
    Tilde { base: Box<ExponentField>, theta: f64 },
}

/// A variable exponent with cached `p₋ = inf p` and `p₊ = sup p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentField {
    rule: ExponentRule,
    lower: f64,
    upper: f64,
}

/// `u ↦ g(u)/(g(u) + g(1 − u))`, `g(u) = e^{-1/u}` for `u > 0`: a C^∞ ramp
/// from 0 (at `u ≤ 0`) to 1 (at `u ≥ 1`), symmetric about `u = 1/2`.
pub(crate) fn smooth_ramp(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / u).exp();
    let b = (-1.0 / (1.0 - u)).exp();
    a / (a + b)
}

fn tilde_value(p: f64, theta: f64) -> f64 {
    2.0 * theta * p / (2.0 - (1.0 - theta) * p)
}

fn check_bounds(lower: f64, upper: f64) -> Result<()> {
    if !(lower >= 1.0) {
        return Err(Error::ExponentBelowOne(lower));
    }
    if !upper.is_finite() {
        return Err(Error::InvalidExponent(format!("p+ = {upper} is not finite")));
    }
    Ok(())
}

impl ExponentField {
    pub fn constant(c: f64) -> Result<Self> {
        check_bounds(c, c)?;
        Ok(Self { rule: ExponentRule::Constant(c), lower: c, upper: c })
    }

    /// Step from `from` to `to` along the first coordinate, centred at `center`.
    pub fn smooth_step(from: f64, to: f64, center: f64, width: f64) -> Result<Self> {
        if !(width >= 0.0) || !width.is_finite() || !center.is_finite() {
            return Err(Error::InvalidExponent(format!("step width {width} at {center}")));
        }
        let (lower, upper) = (from.min(to), from.max(to));
        check_bounds(lower, upper)?;
        Ok(Self {
            rule: ExponentRule::SmoothStep { from, to, center, width },
            lower,
            upper,
        })
    }

    pub fn radial(p_inf: f64, amplitude: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(Error::InvalidExponent("non-finite amplitude".into()));
        }
        let at_zero = p_inf + amplitude;
        let (lower, upper) = (p_inf.min(at_zero), p_inf.max(at_zero));
        check_bounds(lower, upper)?;
        Ok(Self { rule: ExponentRule::Radial { p_inf, amplitude }, lower, upper })
    }

    pub fn tabulated(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidExponent(format!(
                "{} values for a grid of {} points",
                values.len(),
                spec.len()
            )));
        }
        let lower = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let upper = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidExponent("non-finite sample".into()));
        }
        check_bounds(lower, upper)?;
        Ok(Self { rule: ExponentRule::Tabulated { spec, values }, lower, upper })
    }

    /// Samples this field on the nodes of `spec`.
    pub fn tabulate(&self, spec: &GridSpec) -> Result<Self> {
        Self::tabulated(*spec, self.sample(spec))
    }

    pub fn rule(&self) -> &ExponentRule {
        &self.rule
    }

    /// `(p₋, p₊)`: analytic for closed-form families, sample extremes for
    /// tabulated fields (the box of the grid being the domain).
    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn is_constant(&self) -> bool {
        self.lower == self.upper
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match &self.rule {
            ExponentRule::Constant(c) => *c,
            ExponentRule::SmoothStep { from, to, center, width } => {
                let s = x.first().copied().unwrap_or(0.0);
                let ramp = if *width == 0.0 {
                    if s >= *center {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    smooth_ramp((s - center) / width + 0.5)
                };
                from + (to - from) * ramp
            }
            ExponentRule::Radial { p_inf, amplitude } => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                p_inf + amplitude / (std::f64::consts::E + r).ln()
            }
            ExponentRule::Tabulated { spec, values } => interpolate_clamped(spec, values, x),
            ExponentRule::Tilde { base, theta } => tilde_value(base.eval(x), *theta),
        }
    }

    /// Values at the spatial nodes of `spec`, in grid order.
    pub fn sample(&self, spec: &GridSpec) -> Vec<f64> {
        if let ExponentRule::Tabulated { spec: own, values } = &self.rule {
            if own == spec {
                return values.clone();
            }
        }
        let dim = spec.dim();
        (0..spec.len()).map(|i| self.eval(&spec.point(i)[..dim])).collect()
    }

    /// A point where `p` reaches (or approaches) `p₊`.
    fn argmax(&self) -> Vec<f64> {
        match &self.rule {
            ExponentRule::Constant(_) => vec![0.0],
            ExponentRule::SmoothStep { from, to, center, width } => {
                let far = center + width + 1.0;
                vec![if to >= from { far } else { center - width - 1.0 }]
            }
            ExponentRule::Radial { amplitude, .. } => {
                vec![if *amplitude >= 0.0 { 0.0 } else { f64::INFINITY }]
            }
            ExponentRule::Tabulated { spec, values } => {
                let i = values.iter().cloned().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, v)| {
                    if v > b.1 {
                        (i, v)
                    } else {
                        b
                    }
                });
                spec.point(i.0)[..spec.dim()].to_vec()
            }
            ExponentRule::Tilde { base, .. } => base.argmax(),
        }
    }

    /// Points where the field changes fastest (probed densely by the
    /// log-Hölder estimator).
    fn critical_points(&self) -> Vec<f64> {
        match &self.rule {
            ExponentRule::Constant(_) | ExponentRule::Tabulated { .. } => Vec::new(),
            ExponentRule::SmoothStep { center, width, .. } => {
                vec![*center, center - width / 2.0, center + width / 2.0]
            }
            ExponentRule::Radial { .. } => vec![0.0],
            ExponentRule::Tilde { base, .. } => base.critical_points(),
        }
    }

    /// The limit at infinity, where the family has one; the step family
    /// reports the midpoint of its two ends.
    fn p_infinity(&self) -> f64 {
        match &self.rule {
            ExponentRule::Constant(c) => *c,
            ExponentRule::SmoothStep { from, to, .. } => 0.5 * (from + to),
            ExponentRule::Radial { p_inf, .. } => *p_inf,
            ExponentRule::Tabulated { spec, values } => {
                let (sum, count) = boundary_nodes(spec)
                    .map(|i| values[i])
                    .fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
                sum / count as f64
            }
            ExponentRule::Tilde { base, theta } => tilde_value(base.p_infinity(), *theta),
        }
    }
}

fn boundary_nodes(spec: &GridSpec) -> impl Iterator<Item = usize> + '_ {
    let n = spec.samples();
    let dim = spec.dim();
    (0..spec.len()).filter(move |&i| {
        let idx = spec.unravel(i);
        idx[..dim].iter().any(|&k| k == 0 || k == n - 1)
    })
}

fn interpolate_clamped(spec: &GridSpec, values: &[f64], x: &[f64]) -> f64 {
    let dim = spec.dim();
    let n = spec.samples();
    let h = spec.spacing();
    let mut base = [0usize; MAX_DIM];
    let mut frac = [0.0; MAX_DIM];
    for a in 0..dim {
        let u = ((x.get(a).copied().unwrap_or(0.0) + 0.5 * spec.side()) / h).clamp(0.0, (n - 1) as f64);
        let fl = u.floor().min((n - 2) as f64);
        base[a] = fl as usize;
        frac[a] = u - fl;
    }
    let mut acc = 0.0;
    for corner in 0..(1usize << dim) {
        let mut w = 1.0;
        let mut idx = [0usize; MAX_DIM];
        for a in 0..dim {
            if corner >> a & 1 == 1 {
                w *= frac[a];
                idx[a] = base[a] + 1;
            } else {
                w *= 1.0 - frac[a];
                idx[a] = base[a];
            }
        }
        if w != 0.0 {
            acc += w * values[spec.ravel(&idx)];
        }
    }
    acc
}

/// Parses `const:2`, `step:1.8,2.2[,x0=0][,w=1]` or `radial:pinf=2,A=0.5`.
pub fn parse_exponent(text: &str) -> Result<ExponentField> {
    let d = Descriptor::parse(text)?;
    let pos = d.positional();
    let field = match d.name {
        "const" => {
            if pos.len() != 1 {
                return Err(Error::Parse("`const` takes one value".into()));
            }
            ExponentField::constant(parse_f64("const", pos[0])?)?
        }
        "step" => {
            if pos.len() != 2 {
                return Err(Error::Parse("`step` takes two end values".into()));
            }
            ExponentField::smooth_step(
                parse_f64("step", pos[0])?,
                parse_f64("step", pos[1])?,
                d.number_or("x0", 0.0)?,
                d.number_or("w", 1.0)?,
            )?
        }
        "radial" => {
            if !pos.is_empty() {
                return Err(Error::Parse("`radial` takes named arguments only".into()));
            }
            ExponentField::radial(d.required("pinf")?, d.required("A")?)?
        }
        other => return Err(Error::Parse(format!("unknown exponent family `{other}`"))),
    };
    d.finish()?;
    Ok(field)
}

/// Sampled log-Hölder moduli.
#[derive(Debug, Clone, PartialEq)]
pub struct LogHolderReport {
    /// `max |p(x) − p(y)|·log(e + 1/|x − y|)` over pairs with `|x − y| < 1/2`.
    pub c1: f64,
    /// `max |p(x) − p_∞|·log(e + |x|)` over far samples.
    pub c2: f64,
    pub p_inf: f64,
    pub pairs: usize,
    pub far_samples: usize,
    /// The finest sampled scale still sees at least half the coarse-scale
    /// oscillation: the field jumps and `c1` grows without bound as the
    /// resolution is refined.
    pub discontinuous: bool,
    /// `c2` comes from a bounded box only (tabulated fields).
    pub decay_lower_bound_only: bool,
}

impl LogHolderReport {
    pub fn is_log_holder(&self, threshold: f64) -> bool {
        !self.discontinuous && self.c1.is_finite() && self.c2.is_finite() && self.c1 <= threshold && self.c2 <= threshold
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogHolderOptions {
    pub pairs: usize,
    pub dim: usize,
    pub seed: u64,
}

impl Default for LogHolderOptions {
    fn default() -> Self {
        Self { pairs: 4096, dim: 1, seed: 0x5eed }
    }
}

const FINE_SCALE: f64 = 1.0 / (1u64 << 30) as f64;
const COARSE_SCALE: f64 = 0.25;
const SAMPLE_HALF_WIDTH: f64 = 8.0;
const FAR_RADIUS: f64 = 1e6;

/// Estimates the local and decay log-Hölder constants by sampling.
///
/// Closed-form fields are probed with seeded random pairs: half uniform in
/// a box of half-width 8, half anchored near the family's critical points,
/// with distances log-uniform in `[2^-40, 1/2)`. Tabulated fields are
/// probed on grid nodes only, so their finest scale is the grid spacing.
pub fn log_holder_estimate(p: &ExponentField, opts: &LogHolderOptions) -> Result<LogHolderReport> {
    if opts.pairs < 1000 {
        return Err(Error::Sampling(format!("pair budget {} below 1000", opts.pairs)));
    }
    if let ExponentRule::Tabulated { spec, values } = &p.rule {
        return Ok(log_holder_tabulated(spec, values, opts));
    }
    let dim = opts.dim.clamp(1, MAX_DIM);
    let p_inf = p.p_infinity();
    if p.is_constant() {
        return Ok(LogHolderReport {
            c1: 0.0,
            c2: 0.0,
            p_inf,
            pairs: 0,
            far_samples: 0,
            discontinuous: false,
            decay_lower_bound_only: false,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let critical = p.critical_points();
    let (mut c1, mut fine_osc, mut coarse_osc) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..opts.pairs {
        let mut x = [0.0; MAX_DIM];
        for v in x.iter_mut().take(dim) {
            *v = rng.gen_range(-SAMPLE_HALF_WIDTH..SAMPLE_HALF_WIDTH);
        }
        if k % 2 == 1 && !critical.is_empty() {
            // anchor within a log-uniform distance of a critical point
            let c = critical[rng.gen_range(0..critical.len())];
            let d: f64 = 2f64.powf(rng.gen_range(-40.0..-1.0));
            x[0] = c + if rng.gen_bool(0.5) { d } else { -d };
            if dim > 1 && matches!(p.rule, ExponentRule::Radial { .. }) {
                let scale = d / (dim as f64).sqrt();
                for v in x.iter_mut().take(dim) {
                    *v = scale * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                }
            }
        }
        let dist = 2f64.powf(rng.gen_range(-40.0..-1.0));
        let mut dir = [0.0; MAX_DIM];
        let mut norm = 0.0;
        while norm < 1e-12 {
            for v in dir.iter_mut().take(dim) {
                *v = rng.gen_range(-1.0..1.0);
            }
            norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        }
        let mut y: Point = x;
        for a in 0..dim {
            y[a] += dist * dir[a] / norm;
        }
        let diff = (p.eval(&x[..dim]) - p.eval(&y[..dim])).abs();
        c1 = c1.max(diff * (std::f64::consts::E + 1.0 / dist).ln());
        if dist < FINE_SCALE {
            fine_osc = fine_osc.max(diff);
        } else if dist >= COARSE_SCALE {
            coarse_osc = coarse_osc.max(diff);
        }
    }
    let far_samples = opts.pairs / 2;
    let mut c2 = 0.0f64;
    for _ in 0..far_samples {
        let r = FAR_RADIUS.powf(rng.gen_range(0.0..1.0));
        let mut x = [0.0; MAX_DIM];
        let mut norm = 0.0;
        while norm < 1e-12 {
            for v in x.iter_mut().take(dim) {
                *v = rng.gen_range(-1.0..1.0);
            }
            norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        }
        for v in x.iter_mut().take(dim) {
            *v *= r / norm;
        }
        c2 = c2.max((p.eval(&x[..dim]) - p_inf).abs() * (std::f64::consts::E + r).ln());
    }
    Ok(LogHolderReport {
        c1,
        c2,
        p_inf,
        pairs: opts.pairs,
        far_samples,
        discontinuous: coarse_osc > 0.0 && fine_osc >= 0.5 * coarse_osc,
        decay_lower_bound_only: false,
    })
}

fn log_holder_tabulated(spec: &GridSpec, values: &[f64], opts: &LogHolderOptions) -> LogHolderReport {
    let dim = spec.dim();
    let n = spec.samples();
    let h = spec.spacing();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let max_offset = ((0.5 / h).ceil() as usize).max(1);
    let (mut c1, mut fine_osc, mut coarse_osc) = (0.0f64, 0.0f64, 0.0f64);
    let coarse_offset = ((COARSE_SCALE / h).round() as usize).max(1);
    let mut pairs = 0;
    // every nearest-neighbour pair along each axis, then random longer pairs
    for i in 0..spec.len() {
        let idx = spec.unravel(i);
        for a in 0..dim {
            if idx[a] + 1 < n {
                let mut j = idx;
                j[a] += 1;
                let diff = (values[i] - values[spec.ravel(&j)]).abs();
                fine_osc = fine_osc.max(diff);
                c1 = c1.max(diff * (std::f64::consts::E + 1.0 / h).ln());
                pairs += 1;
            }
        }
    }
    for _ in 0..opts.pairs {
        let i = rng.gen_range(0..spec.len());
        let a = rng.gen_range(0..dim);
        let k = if rng.gen_bool(0.5) { coarse_offset } else { rng.gen_range(1..=max_offset) };
        let mut j = spec.unravel(i);
        if j[a] + k >= n {
            continue;
        }
        j[a] += k;
        let dist = k as f64 * h;
        if dist >= 0.5 {
            continue;
        }
        let diff = (values[i] - values[spec.ravel(&j)]).abs();
        c1 = c1.max(diff * (std::f64::consts::E + 1.0 / dist).ln());
        if k == coarse_offset {
            coarse_osc = coarse_osc.max(diff);
        }
        pairs += 1;
    }
    let (sum, count) = boundary_nodes(spec).fold((0.0, 0usize), |(s, c), i| (s + values[i], c + 1));
    let p_inf = sum / count as f64;
    let mut c2 = 0.0f64;
    for (i, v) in values.iter().enumerate() {
        let x = spec.point(i);
        let r = x[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
        c2 = c2.max((v - p_inf).abs() * (std::f64::consts::E + r).ln());
    }
    LogHolderReport {
        c1,
        c2,
        p_inf,
        pairs,
        far_samples: spec.len(),
        discontinuous: coarse_osc > 0.0 && fine_osc >= 0.5 * coarse_osc,
        decay_lower_bound_only: true,
    }
}

/// Verdict of the sufficient condition `p ∈ P_log`, `1 < p₋ ≤ p₊ < ∞`
/// for boundedness of the Hardy–Littlewood maximal operator.
#[derive(Debug, Clone, PartialEq)]
pub struct InBVerdict {
    pub holds: bool,
    pub reasons: Vec<String>,
    pub report: LogHolderReport,
}

pub fn in_b_sufficient(p: &ExponentField, opts: &LogHolderOptions, threshold: f64) -> Result<InBVerdict> {
    let report = log_holder_estimate(p, opts)?;
    let mut reasons = Vec::new();
    if !(p.lower() > 1.0) {
        reasons.push("p- > 1 fails".to_string());
    }
    if !p.upper().is_finite() {
        reasons.push("p+ < inf fails".to_string());
    }
    if report.discontinuous {
        reasons.push("not locally log-Holder: oscillation persists at the finest scale".to_string());
    }
    if !(report.c1 <= threshold) {
        reasons.push(format!("c1 = {} exceeds {threshold}", report.c1));
    }
    if !(report.c2 <= threshold) {
        reasons.push(format!("c2 = {} exceeds {threshold}", report.c2));
    }
    Ok(InBVerdict { holds: reasons.is_empty(), reasons, report })
}

/// `p̃ = 2θp/(2 − (1 − θ)p)`, so that `1/p = (1 − θ)/2 + θ/p̃`.
///
/// Requires `p₊ < 2/(1 − θ)`; the result must again be an exponent
/// (`p̃₋ ≥ 1`, i.e. `p₋ ≥ 2/(1 + θ)`).
pub fn tilde_exponent(p: &ExponentField, theta: f64) -> Result<ExponentField> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidExponent(format!("theta = {theta} not in (0, 1)")));
    }
    let bound = 2.0 / (1.0 - theta);
    if !(2.0 - (1.0 - theta) * p.upper() > 0.0) {
        return Err(Error::TildePrecondition { point: p.argmax(), p: p.upper(), bound });
    }
    // increasing in p, so the bounds map directly
    let lower = tilde_value(p.lower(), theta);
    let upper = tilde_value(p.upper(), theta);
    check_bounds(lower, upper)?;
    Ok(ExponentField {
        rule: ExponentRule::Tilde { base: Box::new(p.clone()), theta },
        lower,
        upper,
    })
}

fn check_params(n: u32, alpha: f64, beta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Hypothesis("dimension n must be positive".into()));
    }
    let nf = n as f64;
    if !(alpha > 0.5) || !alpha.is_finite() {
        return Err(Error::Hypothesis(format!("alpha = {alpha} must exceed 1/2")));
    }
    if !(0.0..=nf).contains(&beta) {
        return Err(Error::Hypothesis(format!("beta = {beta} not in [0, {n}]")));
    }
    Ok(nf)
}

fn check_exponent_pair(p_lo: f64, p_hi: f64) -> Result<()> {
    if !(p_lo >= 1.0) {
        return Err(Error::ExponentBelowOne(p_lo));
    }
    if !(p_hi >= p_lo) || !p_hi.is_finite() {
        return Err(Error::Hypothesis(format!("need p- <= p+ < inf, got ({p_lo}, {p_hi})")));
    }
    Ok(())
}

/// Largest admissible interpolation parameter, `(2α − 1)/(2α − 1 + 2n − 2β)`
/// (an open bound).
pub fn theta_bound_thm21(n: u32, alpha: f64, beta: f64) -> Result<f64> {
    let nf = check_params(n, alpha, beta)?;
    Ok((2.0 * alpha - 1.0) / ((2.0 * alpha - 1.0) + (2.0 * nf - 2.0 * beta)))
}

/// Outcome of a range check `lower < p₋ ≤ p₊ < upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeVerdict {
    pub admissible: bool,
    pub lower: f64,
    pub upper: f64,
    /// `(p₋ − lower, upper − p₊)`.
    pub margins: (f64, f64),
}

impl RangeVerdict {
    fn new(lower: f64, upper: f64, p_lo: f64, p_hi: f64) -> Self {
        Self {
            admissible: lower < p_lo && p_hi < upper,
            lower,
            upper,
            margins: (p_lo - lower, upper - p_hi),
        }
    }
}

fn d_value(nf: f64, alpha: f64, beta: f64) -> f64 {
    ((2.0 * nf + 2.0 * alpha) - 2.0 * beta) - 1.0
}

fn lower_bound(nf: f64, alpha: f64, beta: f64) -> f64 {
    if beta == nf {
        return 0.0;
    }
    d_value(nf, alpha, beta) / (((nf + 2.0 * alpha) - beta) - 1.0)
}

/// Range with bounds `D/(n + 2α − β − 1)` and `D/(n − β)`.
pub fn range_thm22(n: u32, alpha: f64, beta: f64, p_lo: f64, p_hi: f64) -> Result<RangeVerdict> {
    let nf = check_params(n, alpha, beta)?;
    check_exponent_pair(p_lo, p_hi)?;
    let upper = if beta == nf { f64::INFINITY } else { d_value(nf, alpha, beta) / (nf - beta) };
    Ok(RangeVerdict::new(lower_bound(nf, alpha, beta), upper, p_lo, p_hi))
}

/// Range with the same lower bound and the upper bound
/// `((n + 2α − β − 1)/(n − β))·p₋`, which scales with `p₋`.
pub fn range_thm23(n: u32, alpha: f64, beta: f64, p_lo: f64, p_hi: f64) -> Result<RangeVerdict> {
    let nf = check_params(n, alpha, beta)?;
    check_exponent_pair(p_lo, p_hi)?;
    let upper = if beta == nf {
        f64::INFINITY
    } else {
        ((((nf + 2.0 * alpha) - beta) - 1.0) / (nf - beta)) * p_lo
    };
    Ok(RangeVerdict::new(lower_bound(nf, alpha, beta), upper, p_lo, p_hi))
}

/// Range for a multiplier with pointwise decay `(1 + |ξ|)^{-a}`, `a > 1/2`,
/// and no dimension assumption: `(2n + 2a − 1)/(n + 2a − 1)` and
/// `((n + 2a − 1)/n)·p₋`. The decay exponent plays the role of `α`.
pub fn range_cor24(n: u32, a: f64, p_lo: f64, p_hi: f64) -> Result<RangeVerdict> {
    let nf = check_params(n, a, 0.0)?;
    check_exponent_pair(p_lo, p_hi)?;
    let lower = ((2.0 * nf + 2.0 * a) - 1.0) / ((nf + 2.0 * a) - 1.0);
    let upper = (((nf + 2.0 * a) - 1.0) / nf) * p_lo;
    Ok(RangeVerdict::new(lower, upper, p_lo, p_hi))
}

/// Range for the rotationally invariant measure over an `α_d`-dimensional
/// radial measure: `(n − α_d)/(n − 1)` and `((n − 1)/(1 − α_d))·p₋`.
pub fn range_cor25(n: u32, alpha_dim: f64, p_lo: f64, p_hi: f64) -> Result<RangeVerdict> {
    if n < 2 {
        return Err(Error::Hypothesis(format!("n = {n} must be at least 2")));
    }
    if !(0.0..1.0).contains(&alpha_dim) {
        return Err(Error::Hypothesis(format!("radial dimension {alpha_dim} not in [0, 1)")));
    }
    check_exponent_pair(p_lo, p_hi)?;
    let nf = n as f64;
    let lower = (nf - alpha_dim) / (nf - 1.0);
    let upper = ((nf - 1.0) / (1.0 - alpha_dim)) * p_lo;
    Ok(RangeVerdict::new(lower, upper, p_lo, p_hi))
}

/// Result of the constructive interpolation step.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma31 {
    pub theta: f64,
    pub tilde: ExponentField,
    pub delta: f64,
    pub theta0: f64,
}

/// Writes `1/p = 1/2 + r` and builds `θ = (2α − 1)/D − θ₀` with `θ₀ = δ`,
/// `δ` half the smallest margin of `r` inside
/// `((n − β)/D − 1/2, (n + 2α − β − 1)/D − 1/2)`, and returns
/// `p̃ = tilde_exponent(p, θ)` together with the checks
/// `1 < p̃₋ ≤ p̃₊ < ∞` and `|r(x)/θ| < 1/2`.
pub fn lemma31_construct(p: &ExponentField, n: u32, alpha: f64, beta: f64) -> Result<Lemma31> {
    let nf = check_params(n, alpha, beta)?;
    let d = d_value(nf, alpha, beta);
    let lower_r = (nf - beta) / d - 0.5;
    let upper_r = (((nf + 2.0 * alpha) - beta) - 1.0) / d - 0.5;
    // r is decreasing in p
    let r_max = 1.0 / p.lower() - 0.5;
    let r_min = 1.0 / p.upper() - 0.5;
    let upper_margin = upper_r - r_max;
    let lower_margin = r_min - lower_r;
    if !(upper_margin > 0.0) {
        let verdict = range_thm22(n, alpha, beta, p.lower(), p.upper())?;
        return Err(Error::RangeViolation {
            side: RangeSide::Lower,
            detail: format!("p- = {} must exceed {}", p.lower(), verdict.lower),
        });
    }
    if !(lower_margin > 0.0) {
        let verdict = range_thm22(n, alpha, beta, p.lower(), p.upper())?;
        return Err(Error::RangeViolation {
            side: RangeSide::Upper,
            detail: format!("p+ = {} must stay below {}", p.upper(), verdict.upper),
        });
    }
    let delta = 0.5 * upper_margin.min(lower_margin);
    let theta0 = delta;
    let theta = (2.0 * alpha - 1.0) / d - theta0;
    let tilde = tilde_exponent(p, theta)?;
    let (tl, tu) = tilde.bounds();
    if !(1.0 < tl && tl <= tu && tu.is_finite()) {
        return Err(Error::Hypothesis(format!("p~ bounds ({tl}, {tu}) outside (1, inf)")));
    }
    if !(r_max / theta < 0.5 && r_min / theta > -0.5) {
        return Err(Error::Hypothesis(format!(
            "r/theta escapes (-1/2, 1/2): [{}, {}]",
            r_min / theta,
            r_max / theta
        )));
    }
    Ok(Lemma31 { theta, tilde, delta, theta0 })
}

/// Geometric bound `Σ_j ρ^j` with `ρ = 2^{(1/2 − α)(1 − θ) + (n − β)θ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesBound {
    pub ratio: f64,
    pub converges: bool,
    /// `1/(1 − ρ)` when convergent.
    pub sum: Option<f64>,
}

impl SeriesBound {
    /// The bound on the `j`-th term.
    pub fn term(&self, j: u32) -> f64 {
        self.ratio.powi(j as i32)
    }
}

pub fn interp_bound_series(n: u32, alpha: f64, beta: f64, theta: f64) -> Result<SeriesBound> {
    let nf = check_params(n, alpha, beta)?;
    let theta_max = theta_bound_thm21(n, alpha, beta)?;
    let converges = theta < theta_max;
    let ratio = if theta == theta_max {
        1.0
    } else {
        2f64.powf((0.5 - alpha) * (1.0 - theta) + (nf - beta) * theta)
    };
    Ok(SeriesBound {
        ratio,
        converges,
        sum: converges.then(|| 1.0 / (1.0 - ratio)),
    })
}

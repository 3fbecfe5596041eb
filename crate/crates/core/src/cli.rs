//! Scenario runner behind the `maxmul` binary.
//!
//! A config is a flat list of `key=value` lines (`#` starts a comment).
//! Every scenario writes one CSV table whose rows repeat the inputs they
//! depend on. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decay::{dyadic_magnitudes, pointwise_decay, square_function, square_function_decay, square_function_grad_decay};
use crate::error::Error;
use crate::exponents::{
    interp_bound_series, lemma31_construct, parse_exponent, range_cor24, range_cor25, range_thm22, range_thm23,
    theta_bound_thm21, tilde_exponent, ExponentField, RangeVerdict,
};
use crate::grid::{forward_ft, inverse_ft, norm_lp, sample, sample_at, GridFunction, GridSpec};
use crate::measures::{atomize, ft, parse_measure, MeasureSpec};
use crate::multiplier::{
    apply_multiplier, check_31, check_33, default_radii, direct_average_many, hl_maximal, maximal_multiplier,
    phi_j, TimeGrid,
};
use crate::syntax::{parse_f64, Descriptor};
use crate::varlp::{luxemburg_norm, modular};

/// Exit status for a config problem.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status when `verify` finds a failing invariant.
pub const EXIT_INVARIANT: i32 = 3;
/// Exit status for a numerical error inside a scenario.
pub const EXIT_NUMERIC: i32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Norm,
    DecayFit,
    RangeTable,
    DyadicL2,
    Domination,
    MaximalRatio,
    Verify,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::Norm,
        Scenario::DecayFit,
        Scenario::RangeTable,
        Scenario::DyadicL2,
        Scenario::Domination,
        Scenario::MaximalRatio,
        Scenario::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Norm => "norm",
            Scenario::DecayFit => "decay-fit",
            Scenario::RangeTable => "range-table",
            Scenario::DyadicL2 => "dyadic-l2",
            Scenario::Domination => "domination",
            Scenario::MaximalRatio => "maximal-ratio",
            Scenario::Verify => "verify",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    fn defaults(self) -> &'static [(&'static str, &'static str)] {
        match self {
            Scenario::Norm => &[
                ("dim", "1"),
                ("samples", "64"),
                ("side", "4"),
                ("function", "steps:2,1"),
                ("exponent", "step:2,4,x0=0.5,w=0"),
            ],
            Scenario::DecayFit => &[("measure", "circle:r=1"), ("xi_min", "4"), ("xi_max", "512")],
            Scenario::RangeTable => &[("dim", "2"), ("alpha", "0.75"), ("beta", "1.5"), ("exponent", "const:2")],
            Scenario::DyadicL2 => &[
                ("dim", "2"),
                ("samples", "512"),
                ("side", "16"),
                ("measure", "disk:r=1"),
                ("function", "gauss:w=0.125"),
                ("j_min", "1"),
                ("j_max", "7"),
            ],
            Scenario::Domination => &[
                ("dim", "2"),
                ("samples", "512"),
                ("side", "16"),
                ("measure", "circle:r=1"),
                ("function", "gauss:w=1"),
                ("beta", "1"),
                ("j_min", "1"),
                ("j_max", "7"),
            ],
            Scenario::MaximalRatio => &[
                ("dim", "2"),
                ("samples", "128"),
                ("side", "16"),
                ("measure", "circle:r=1"),
                ("exponent", "const:2"),
                ("functions", "gauss:w=1;gauss:w=0.5;ball:r=1;ball:r=0.5"),
            ],
            Scenario::Verify => &[],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Every key any scenario understands.
pub const KNOWN_KEYS: &[&str] = &[
    "scenario",
    "dim",
    "samples",
    "side",
    "measure",
    "exponent",
    "function",
    "functions",
    "tol",
    "t_min",
    "t_max",
    "per_octave",
    "xi_min",
    "xi_max",
    "j_min",
    "j_max",
    "alpha",
    "beta",
    "alpha_dim",
    "seed",
    "threads",
    "out",
];

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) | CliError::Io(_) => EXIT_NUMERIC,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config_err<E: fmt::Display>(key: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Config(format!("`{key}`: {e}"))
}

/// Flat `key=value` configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioConfig {
    values: BTreeMap<String, String>,
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = Self::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key=value, got `{line}`", no + 1)))?;
            cfg.set(k.trim(), v.trim())
                .map_err(|e| CliError::Config(format!("line {}: {e}", no + 1)))?;
        }
        Ok(cfg)
    }

    /// Sets (or overrides) one key.
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::Config(format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> CliResult<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override `{pair}` is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn output_path(&self) -> Option<&str> {
        self.get("out")
    }

    pub fn threads(&self) -> CliResult<Option<usize>> {
        match self.get("threads") {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(config_err("threads")),
        }
    }
}

/// A config resolved against a scenario's defaults.
struct Resolved<'a> {
    cfg: &'a ScenarioConfig,
    scenario: Scenario,
}

impl<'a> Resolved<'a> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.cfg.get(key).or_else(|| {
            self.scenario
                .defaults()
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
        })
    }

    fn text(&self, key: &str) -> CliResult<&str> {
        self.raw(key)
            .ok_or_else(|| CliError::Config(format!("scenario `{}` needs `{key}`", self.scenario)))
    }

    fn number(&self, key: &str) -> CliResult<f64> {
        parse_f64(key, self.text(key)?).map_err(config_err(key))
    }

    fn number_or(&self, key: &str, default: f64) -> CliResult<f64> {
        match self.raw(key) {
            Some(_) => self.number(key),
            None => Ok(default),
        }
    }

    fn integer(&self, key: &str) -> CliResult<u32> {
        self.text(key)?.parse().map_err(config_err(key))
    }

    fn integer_or(&self, key: &str, default: u32) -> CliResult<u32> {
        match self.raw(key) {
            Some(_) => self.integer(key),
            None => Ok(default),
        }
    }

    fn list(&self, key: &str) -> CliResult<Vec<f64>> {
        self.text(key)?
            .split(',')
            .map(|v| parse_f64(key, v).map_err(config_err(key)))
            .collect()
    }

    fn grid(&self) -> CliResult<GridSpec> {
        GridSpec::new(self.integer("dim")? as usize, self.integer("samples")? as usize, self.number("side")?)
            .map_err(config_err("grid"))
    }

    fn measure(&self, dim: usize) -> CliResult<MeasureSpec> {
        parse_measure(self.text("measure")?, dim).map_err(config_err("measure"))
    }

    fn exponent(&self) -> CliResult<ExponentField> {
        parse_exponent(self.text("exponent")?).map_err(config_err("exponent"))
    }

    fn time_grid(&self) -> CliResult<TimeGrid> {
        let d = TimeGrid::default();
        TimeGrid::new(
            self.number_or("t_min", d.t_min())?,
            self.number_or("t_max", d.t_max())?,
            self.integer_or("per_octave", d.per_octave())?,
        )
        .map_err(config_err("time grid"))
    }

    fn j_range(&self) -> CliResult<(u32, u32)> {
        let (lo, hi) = (self.integer("j_min")?, self.integer("j_max")?);
        if lo == 0 || hi < lo {
            return Err(CliError::Config(format!("j range {lo}..={hi} must satisfy 1 <= j_min <= j_max")));
        }
        Ok((lo, hi))
    }

    fn dyadic(&self, key: &str) -> CliResult<i32> {
        let v = self.number(key)?;
        let k = v.log2();
        if !(v > 0.0) || k.fract() != 0.0 {
            return Err(CliError::Config(format!("`{key}` = {v} must be a power of two")));
        }
        Ok(k as i32)
    }
}

/// Test functions: `gauss:w=1[,c=0]` (`e^{-π|x − c e₁|²/w²}`),
/// `ball:r=1[,v=1]` (value `v` on `|x| ≤ r`), and `steps:v1,v2,…[,at=0,width=0.5]`
/// (value `v_i` on `[at + (i−1)·width, at + i·width)` along the first axis).
pub fn parse_test_function(text: &str, spec: &GridSpec) -> crate::Result<GridFunction> {
    let d = Descriptor::parse(text)?;
    let norm2 = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
    let f = match d.name {
        "gauss" => {
            let w = d.number_or("w", 1.0)?;
            let c = d.number_or("c", 0.0)?;
            if !(w > 0.0) {
                return Err(Error::Parse(format!("gauss width {w} must be positive")));
            }
            sample(spec, |x: &[f64]| {
                let mut y = x.to_vec();
                y[0] -= c;
                (-PI * norm2(&y) / (w * w)).exp()
            })?
        }
        "ball" => {
            let r = d.number_or("r", 1.0)?;
            let v = d.number_or("v", 1.0)?;
            sample(spec, |x: &[f64]| if norm2(x) <= r * r { v } else { 0.0 })?
        }
        "steps" => {
            let values: Vec<f64> = d
                .positional()
                .iter()
                .map(|v| parse_f64("steps", v))
                .collect::<crate::Result<_>>()?;
            if values.is_empty() {
                return Err(Error::Parse("`steps` needs at least one value".into()));
            }
            let at = d.number_or("at", 0.0)?;
            let width = d.number_or("width", 0.5)?;
            if !(width > 0.0) {
                return Err(Error::Parse("`steps` width must be positive".into()));
            }
            sample(spec, |x: &[f64]| {
                let u = (x[0] - at) / width;
                if u >= 0.0 && (u.floor() as usize) < values.len() {
                    values[u.floor() as usize]
                } else {
                    0.0
                }
            })?
        }
        other => return Err(Error::Parse(format!("unknown test function `{other}`"))),
    };
    if d.name != "steps" && !d.positional().is_empty() {
        return Err(Error::Parse(format!("`{}` takes named arguments only", d.name)));
    }
    d.finish()?;
    Ok(f)
}

/// Output of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub csv: String,
    /// Set by `verify` when an invariant fails.
    pub failed: bool,
}

/// Runs a scenario on the configured number of threads (all cores when
/// `threads` is absent).
pub fn run(scenario: Scenario, cfg: &ScenarioConfig) -> CliResult<Report> {
    if let Some(name) = cfg.get("scenario") {
        if name != scenario.name() {
            return Err(CliError::Config(format!("config is for `{name}`, not `{scenario}`")));
        }
    }
    match cfg.threads()? {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("threads: {e}")))?;
            pool.install(|| run_inner(scenario, cfg))
        }
        None => run_inner(scenario, cfg),
    }
}

fn run_inner(scenario: Scenario, cfg: &ScenarioConfig) -> CliResult<Report> {
    let r = Resolved { cfg, scenario };
    let csv = match scenario {
        Scenario::Norm => norm_scenario(&r)?,
        Scenario::DecayFit => decay_scenario(&r)?,
        Scenario::RangeTable => range_scenario(&r)?,
        Scenario::DyadicL2 => dyadic_scenario(&r)?,
        Scenario::Domination => domination_scenario(&r)?,
        Scenario::MaximalRatio => maximal_ratio_scenario(&r)?,
        Scenario::Verify => {
            let seed = r.integer_or("seed", 7)? as u64;
            let checks = verify_checks(seed);
            let failed = checks.iter().any(|c| !c.passed);
            let mut out = String::from("check,status,value,threshold\n");
            for c in &checks {
                let status = if c.passed { "pass" } else { "fail" };
                writeln!(out, "{},{status},{},{}", c.name, c.value, c.threshold).unwrap();
            }
            return Ok(Report { csv: out, failed });
        }
    };
    Ok(Report { csv, failed: false })
}

fn norm_scenario(r: &Resolved) -> CliResult<String> {
    let spec = r.grid()?;
    let function = r.text("function")?;
    let f = parse_test_function(function, &spec).map_err(config_err("function"))?;
    let p = r.exponent()?;
    let tol = r.number_or("tol", crate::varlp::DEFAULT_REL_TOL)?;
    let lambda = luxemburg_norm(&f, &p, tol)?;
    let rho = if lambda > 0.0 { modular(&f, &p, lambda)?.value() } else { 0.0 };
    Ok(format!(
        "function,exponent,dim,samples,side,tol,p_minus,p_plus,norm,modular_at_norm\n\"{function}\",\"{}\",{},{},{},{tol},{},{},{lambda},{rho}\n",
        r.text("exponent")?,
        spec.dim(),
        spec.samples(),
        spec.side(),
        p.lower(),
        p.upper(),
    ))
}

fn decay_scenario(r: &Resolved) -> CliResult<String> {
    let text = r.text("measure")?;
    let implied = match text.split(':').next() {
        Some("cantor") => 1,
        Some("sphere3") => 3,
        _ => 2,
    };
    let dim = r.integer_or("dim", implied)? as usize;
    let measure = r.measure(dim)?;
    let (lo, hi) = (r.dyadic("xi_min")?, r.dyadic("xi_max")?);
    let mags = dyadic_magnitudes(lo, hi);
    let mut out = String::from("kind,mode,alpha_hat,c,residual,xi_min,xi_max,measure\n");
    let rows = [
        ("pointwise", pointwise_decay(&measure, &mags)?),
        ("square", square_function_decay(&measure, &mags)?),
        ("square_grad", square_function_grad_decay(&measure, &mags)?),
    ];
    for (kind, fit) in rows {
        writeln!(
            out,
            "{kind},{},{},{},{},{},{},\"{text}\"",
            fit.mode, fit.alpha, fit.c, fit.residual, fit.xi_range.0, fit.xi_range.1
        )
        .unwrap();
    }
    Ok(out)
}

fn verdict_row(out: &mut String, name: &str, v: &RangeVerdict, params: &str) {
    let word = if v.admissible { "admissible" } else { "inadmissible" };
    writeln!(out, "{name},{word},{},{},{},{},{params}", v.lower, v.upper, v.margins.0, v.margins.1).unwrap();
}

fn range_scenario(r: &Resolved) -> CliResult<String> {
    let n = r.integer("dim")?;
    let p = r.exponent()?;
    let (pl, pu) = p.bounds();
    let mut out = String::from("range,verdict,lower,upper,margin_lower,margin_upper,n,alpha,beta,alpha_dim,p_minus,p_plus\n");
    for &alpha in &r.list("alpha")? {
        for &beta in &r.list("beta")? {
            let params = |ad: &str| format!("{n},{alpha},{beta},{ad},{pl},{pu}");
            verdict_row(&mut out, "thm22", &range_thm22(n, alpha, beta, pl, pu)?, &params(""));
            verdict_row(&mut out, "thm23", &range_thm23(n, alpha, beta, pl, pu)?, &params(""));
            if beta == 0.0 {
                verdict_row(&mut out, "cor24", &range_cor24(n, alpha, pl, pu)?, &params(""));
            }
        }
    }
    if n >= 2 {
        let dims = match r.raw("alpha_dim") {
            Some(_) => r.list("alpha_dim")?,
            None => Vec::new(),
        };
        for ad in dims {
            let v = range_cor25(n, ad, pl, pu)?;
            let nf = n as f64;
            let params = format!("{n},{},{},{ad},{pl},{pu}", (nf - 1.0 + ad) / 2.0, nf - 1.0 + ad);
            verdict_row(&mut out, "cor25", &v, &params);
        }
    }
    Ok(out)
}

fn function_and_measure(r: &Resolved) -> CliResult<(GridSpec, GridFunction, MeasureSpec)> {
    let spec = r.grid()?;
    let f = parse_test_function(r.text("function")?, &spec).map_err(config_err("function"))?;
    let m = r.measure(spec.dim())?;
    Ok((spec, f, m))
}

fn piece_rows(out: &mut String, ratios: &[(u32, f64)], slope: f64, params: &str) {
    for (j, v) in ratios {
        writeln!(out, "ratio,{j},{v},{params}").unwrap();
    }
    writeln!(out, "slope,,{slope},{params}").unwrap();
}

fn time_params(tg: &TimeGrid) -> String {
    format!("{},{},{}", tg.t_min(), tg.t_max(), tg.per_octave())
}

fn dyadic_scenario(r: &Resolved) -> CliResult<String> {
    let (spec, f, m) = function_and_measure(r)?;
    let tg = r.time_grid()?;
    let (lo, hi) = r.j_range()?;
    let res = check_31(&f, &m, lo..=hi, &tg)?;
    let mut out = String::from("kind,j,value,measure,function,dim,samples,side,t_min,t_max,per_octave\n");
    let params = format!(
        "\"{}\",\"{}\",{},{},{},{}",
        r.text("measure")?,
        r.text("function")?,
        spec.dim(),
        spec.samples(),
        spec.side(),
        time_params(&tg)
    );
    piece_rows(&mut out, &res.ratios, res.slope, &params);
    Ok(out)
}

fn domination_scenario(r: &Resolved) -> CliResult<String> {
    let (spec, f, m) = function_and_measure(r)?;
    let tg = r.time_grid()?;
    let (lo, hi) = r.j_range()?;
    let beta = r.number("beta")?;
    let res = check_33(&f, &m, beta, lo..=hi, &tg)?;
    let mut out = String::from("kind,j,value,measure,function,beta,dim,samples,side,t_min,t_max,per_octave\n");
    let params = format!(
        "\"{}\",\"{}\",{beta},{},{},{},{}",
        r.text("measure")?,
        r.text("function")?,
        spec.dim(),
        spec.samples(),
        spec.side(),
        time_params(&tg)
    );
    piece_rows(&mut out, &res.ratios, res.slope, &params);
    Ok(out)
}

fn maximal_ratio_scenario(r: &Resolved) -> CliResult<String> {
    let spec = r.grid()?;
    let m = r.measure(spec.dim())?;
    let p = r.exponent()?;
    let tg = r.time_grid()?;
    let tol = r.number_or("tol", 1e-10)?;
    let mut out =
        String::from("function,norm_f,norm_maximal,ratio,measure,exponent,dim,samples,side,t_min,t_max,per_octave\n");
    for text in r.text("functions")?.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let f = parse_test_function(text, &spec).map_err(config_err("functions"))?;
        let mf = maximal_multiplier(&f, &m, &tg, None)?;
        let a = luxemburg_norm(&f, &p, tol)?;
        let b = luxemburg_norm(&mf, &p, tol)?;
        writeln!(
            out,
            "\"{text}\",{a},{b},{},\"{}\",\"{}\",{},{},{},{}",
            b / a,
            r.text("measure")?,
            r.text("exponent")?,
            spec.dim(),
            spec.samples(),
            spec.side(),
            time_params(&tg)
        )
        .unwrap();
    }
    Ok(out)
}

/// One row of the `verify` table.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

fn below(name: &'static str, value: f64, threshold: f64) -> Check {
    Check { name, passed: value < threshold, value, threshold }
}

fn flag(name: &'static str, ok: bool) -> Check {
    Check { name, passed: ok, value: if ok { 1.0 } else { 0.0 }, threshold: 1.0 }
}

fn gauss(x: &[f64]) -> f64 {
    (-PI * x.iter().map(|v| v * v).sum::<f64>()).exp()
}

fn max_diff(a: &GridFunction, b: &GridFunction) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// The invariant suite at desk scale, deterministic in `seed`.
pub fn verify_checks(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    checks.extend(grid_checks(&mut rng));
    checks.extend(exponent_checks(&mut rng));
    checks.extend(varlp_checks(&mut rng));
    checks.extend(measure_checks());
    checks.extend(operator_checks());
    checks
}

fn grid_checks(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let spec = GridSpec::new(1, 256, 16.0).unwrap();
    let f = sample(&spec, gauss).unwrap();
    let fhat = forward_ft(&f);
    let fixed = (0..spec.len())
        .map(|i| (fhat.values()[i].re - gauss(&spec.frequency(i)[..1])).abs().max(fhat.values()[i].im.abs()))
        .fold(0.0, f64::max);

    let spec2 = GridSpec::new(2, 64, 8.0).unwrap();
    let centres: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0)))
        .collect();
    let g = sample(&spec2, |x: &[f64]| {
        centres
            .iter()
            .map(|&(a, b, w)| (-PI * ((x[0] - a).powi(2) + (x[1] - b).powi(2)) * w).exp())
            .sum::<f64>()
    })
    .unwrap();
    let ghat = forward_ft(&g);
    let round = max_diff(&inverse_ft(&ghat), &g);
    let parseval = (norm_lp(&g, 2.0).unwrap() - norm_lp(&ghat, 2.0).unwrap()).abs() / norm_lp(&g, 2.0).unwrap();
    vec![
        below("gaussian_fixed_point", fixed, 1e-6),
        below("fft_round_trip", round, 1e-12),
        below("parseval", parseval, 1e-10),
    ]
}

fn random_field(rng: &mut ChaCha8Rng) -> ExponentField {
    match rng.gen_range(0..3) {
        0 => ExponentField::constant(rng.gen_range(1.2..4.0)).unwrap(),
        1 => ExponentField::smooth_step(
            rng.gen_range(1.2..4.0),
            rng.gen_range(1.2..4.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.0..2.0),
        )
        .unwrap(),
        _ => ExponentField::radial(rng.gen_range(1.2..3.0), rng.gen_range(0.0..1.0)).unwrap(),
    }
}

fn exponent_checks(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut identity = 0.0f64;
    let mut lemma_ok = true;
    let mut lemma_cases = 0;
    let mut series_ok = true;
    while lemma_cases < 100 {
        let p = random_field(rng);
        let theta = rng.gen_range(0.05..0.95);
        if let Ok(t) = tilde_exponent(&p, theta) {
            for _ in 0..8 {
                let x = [rng.gen_range(-4.0..4.0)];
                let lhs = 1.0 / p.eval(&x);
                let rhs = (1.0 - theta) / 2.0 + theta / t.eval(&x);
                identity = identity.max((lhs - rhs).abs());
            }
        }
        let n = rng.gen_range(1..=3u32);
        let alpha = rng.gen_range(0.55..3.0);
        let beta = rng.gen_range(0.0..=1.0) * n as f64;
        let tm = theta_bound_thm21(n, alpha, beta).unwrap();
        let s = interp_bound_series(n, alpha, beta, theta).unwrap();
        series_ok &= s.converges == (theta < tm) && (s.converges == (s.ratio < 1.0) || theta == tm);
        if range_thm22(n, alpha, beta, p.lower(), p.upper()).unwrap().admissible {
            lemma_cases += 1;
            match lemma31_construct(&p, n, alpha, beta) {
                Ok(l) => {
                    let (a, b) = l.tilde.bounds();
                    lemma_ok &= 1.0 < a && a <= b && b.is_finite();
                    for x in [-3.0, 0.0, 0.5, 10.0] {
                        lemma_ok &= ((1.0 / p.eval(&[x]) - 0.5) / l.theta).abs() < 0.5;
                    }
                }
                Err(_) => lemma_ok = false,
            }
        }
    }
    let mut cross_ok = true;
    for n in 1..=5u32 {
        for a in [0.625, 0.75, 1.0, 1.5, 2.25] {
            for p in [1.125, 1.5, 2.0, 3.25, 6.0] {
                cross_ok &= range_cor24(n, a, p, p + 0.5).unwrap() == range_thm23(n, a, 0.0, p, p + 0.5).unwrap();
                if n >= 2 {
                    let ad = a - 0.5;
                    if (0.0..1.0).contains(&ad) && !(n == 2 && ad == 0.0) {
                        let nf = n as f64;
                        cross_ok &= range_cor25(n, ad, p, p + 0.5).unwrap()
                            == range_thm23(n, (nf - 1.0 + ad) / 2.0, nf - 1.0 + ad, p, p + 0.5).unwrap();
                    }
                }
            }
        }
    }
    let strict = {
        let v = range_thm22(2, 0.75, 1.5, 2.0, 2.0).unwrap();
        !range_thm22(2, 0.75, 1.5, v.lower, 2.0).unwrap().admissible
            && !range_thm22(2, 0.75, 1.5, 2.0, v.upper).unwrap().admissible
            && range_thm22(2, 0.75, 1.5, 1.5f64.next_up(), 3f64.next_down()).unwrap().admissible
    };
    vec![
        below("tilde_identity", identity, 1e-14),
        flag("lemma31_postconditions", lemma_ok),
        flag("series_iff_theta_bound", series_ok),
        flag("range_cross_identities", cross_ok),
        flag("range_strictness", strict),
    ]
}

fn varlp_checks(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let spec = GridSpec::new(1, 64, 4.0).unwrap();
    let f = parse_test_function("steps:2,1", &spec).unwrap();
    let p = parse_exponent("step:2,4,x0=0.5,w=0").unwrap();
    let lambda = luxemburg_norm(&f, &p, 1e-12).unwrap();
    let closed = (6f64.sqrt() - 2.0).powf(-0.5);
    let mut classical = 0.0f64;
    let mut homogeneity = 0.0f64;
    for _ in 0..10 {
        let vals: Vec<Complex64> = (0..spec.len()).map(|_| Complex64::new(rng.gen_range(-3.0..3.0), 0.0)).collect();
        let g = GridFunction::from_values(spec, crate::grid::Domain::Space, vals).unwrap();
        let q = rng.gen_range(1.0..6.0);
        let a = luxemburg_norm(&g, &ExponentField::constant(q).unwrap(), 1e-12).unwrap();
        let b = norm_lp(&g, q).unwrap();
        classical = classical.max((a - b).abs() / b);
        let c = 100.0;
        let h = luxemburg_norm(&g.scaled(Complex64::new(c, 0.0)), &p, 1e-12).unwrap();
        let base = luxemburg_norm(&g, &p, 1e-12).unwrap();
        homogeneity = homogeneity.max((h - c * base).abs() / (c * base));
    }
    vec![
        below("luxemburg_two_step", (lambda - closed).abs(), 1e-9),
        below("luxemburg_classical", classical, 1e-8),
        below("luxemburg_homogeneity", homogeneity, 1e-10),
    ]
}

fn measure_checks() -> Vec<Check> {
    let specs = [
        MeasureSpec::delta(2).unwrap(),
        MeasureSpec::sphere(1, 1.0).unwrap(),
        MeasureSpec::sphere(2, 1.0).unwrap(),
        MeasureSpec::sphere(3, 1.0).unwrap(),
        MeasureSpec::ball(2, 1.0).unwrap(),
        MeasureSpec::cantor(4).unwrap(),
        MeasureSpec::cantor_radial(4, 2, 0.5, 8).unwrap(),
    ];
    let mut mass = 0.0f64;
    let mut hermitian = 0.0f64;
    for s in &specs {
        mass = mass.max((ft(s, &[0.0; 3]) - Complex64::new(1.0, 0.0)).norm());
        let xi: Vec<f64> = (0..s.dim()).map(|a| 1.3 + a as f64).collect();
        let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
        hermitian = hermitian.max((ft(s, &neg) - ft(s, &xi).conj()).norm());
    }
    let cantor = MeasureSpec::cantor(4).unwrap();
    let mut scaling = 0.0f64;
    for xi in [0.3, 1.0, 7.7] {
        let lhs = ft(&cantor, &[4.0 * xi]);
        let rhs = (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, -2.0 * PI * xi)) / 2.0 * ft(&cantor, &[xi]);
        scaling = scaling.max((lhs - rhs).norm());
    }
    let at_one = ft(&cantor, &[1.0]).norm();
    let non_decay = (0..=8)
        .map(|k| (ft(&cantor, &[4f64.powi(k)]).norm() - at_one).abs())
        .fold(0.0, f64::max);
    let circle = MeasureSpec::sphere(2, 1.0).unwrap();
    let env = pointwise_decay(&circle, &dyadic_magnitudes(2, 9)).unwrap();
    let xi = [40.0, 0.0];
    let sup = (0..=2000)
        .map(|i| ft(&circle, &[xi[0] * (1.0 + i as f64 / 2000.0), 0.0]).norm())
        .fold(0.0, f64::max);
    vec![
        below("ft_origin_mass", mass, 1e-14),
        below("ft_hermitian", hermitian, 1e-12),
        below("cantor_scaling", scaling, 1e-10),
        below("cantor_non_decay", non_decay, 1e-6),
        below("circle_envelope_rate", (env.alpha - 0.5).abs(), 0.05),
        flag("square_function_below_sup", square_function(&circle, &xi) <= sup + 1e-6),
    ]
}

fn operator_checks() -> Vec<Check> {
    let spec = GridSpec::new(2, 64, 8.0).unwrap();
    let mut partition = true;
    for i in 0..spec.len() {
        let xi = spec.frequency(i);
        let s: f64 = (0..=5).map(|j| phi_j(&xi[..2], j)).sum();
        partition &= s == 1.0;
    }
    let f = sample(&spec, gauss).unwrap();
    let tg = TimeGrid::new(1.0 / 16.0, 2.0, 4).unwrap();
    let delta = maximal_multiplier(&f, &MeasureSpec::delta(2).unwrap(), &tg, None).unwrap();
    let circle = MeasureSpec::sphere(2, 1.0).unwrap();
    let mm = maximal_multiplier(&f, &circle, &tg, None).unwrap();
    let fine = maximal_multiplier(&f, &circle, &tg.refined(), None).unwrap();
    let a1 = apply_multiplier(&f, &circle, 1.0, None).unwrap();
    let dominates = mm
        .values()
        .iter()
        .zip(a1.values())
        .zip(fine.values())
        .all(|((m, a), r)| m.re >= a.norm() - 1e-15 && r.re >= m.re);

    let ospec = GridSpec::new(2, 256, 8.0).unwrap();
    let wide = sample(&ospec, |x: &[f64]| gauss(&[x[0] / 2.0, x[1] / 2.0])).unwrap();
    let atoms = atomize(&circle, 12).unwrap();
    let xs: Vec<Vec<f64>> = (0..ospec.len()).step_by(331).map(|i| ospec.point(i)[..2].to_vec()).collect();
    let mut oracle = 0.0f64;
    for t in [0.25, 1.0, 2.0] {
        let g = apply_multiplier(&wide, &circle, t, None).unwrap();
        let peak = g.max_abs();
        for (x, d) in xs.iter().zip(direct_average_many(&wide, &atoms, t, &xs)) {
            oracle = oracle.max((sample_at(&g, x) - d).norm() / peak);
        }
    }
    let radii = default_radii(&spec);
    let hl = hl_maximal(&f, &radii).unwrap();
    let hl_ok = hl.values().iter().zip(f.values()).all(|(m, v)| m.re >= v.norm());
    let dom = check_33(&f, &circle, 1.0, 1..=4, &tg).unwrap();
    vec![
        flag("partition_of_unity", partition),
        below("delta_maximal_identity", max_diff(&delta, &f.abs()), 1e-15),
        flag("maximal_dominates_and_refines", dominates),
        below("fourier_vs_atomic", oracle, 1e-3),
        flag("hl_dominates_f", hl_ok),
        below("domination_slope", dom.slope, 0.1),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let cfg = ScenarioConfig::parse("# comment\ndim = 2\nmeasure=circle:r=1 # trailing\n\n").unwrap();
        assert_eq!(cfg.get("dim"), Some("2"));
        assert_eq!(cfg.get("measure"), Some("circle:r=1"));
        match ScenarioConfig::parse("dim=2\nbogus=1") {
            Err(CliError::Config(m)) => assert!(m.contains("line 2") && m.contains("bogus")),
            other => panic!("{other:?}"),
        }
        assert!(ScenarioConfig::parse("dim").is_err());
        let mut cfg = ScenarioConfig::default();
        cfg.set_pair("alpha=1").unwrap();
        assert!(cfg.set_pair("nope=1").is_err());
        assert_eq!(CliError::Config(String::new()).exit_code(), EXIT_CONFIG);
    }

    #[test]
    fn range_table_row() {
        let cfg = ScenarioConfig::parse("dim=2\nalpha=0.75\nbeta=1.5\nexponent=const:2").unwrap();
        let out = run(Scenario::RangeTable, &cfg).unwrap().csv;
        assert!(out.lines().any(|l| l.starts_with("thm22,admissible,1.5,3,")), "{out}");
    }

    #[test]
    fn norm_default_is_two_step() {
        let out = run(Scenario::Norm, &ScenarioConfig::default()).unwrap().csv;
        let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
        let norm: f64 = row[row.len() - 2].parse().unwrap();
        assert!((norm - (6f64.sqrt() - 2.0).powf(-0.5)).abs() < 1e-9);
    }

    #[test]
    fn test_functions() {
        let spec = GridSpec::new(1, 64, 4.0).unwrap();
        let f = parse_test_function("steps:2,1", &spec).unwrap();
        assert_eq!(f.at(&[32]).re, 2.0);
        assert_eq!(f.at(&[40]).re, 1.0);
        assert_eq!(f.at(&[48]).re, 0.0);
        assert_eq!(parse_test_function("gauss:w=1", &spec).unwrap().at(&[32]).re, 1.0);
        assert!(parse_test_function("gauss:w=1,q=2", &spec).is_err());
        assert!(parse_test_function("ball:1", &spec).is_err());
        assert!(parse_test_function("wave", &spec).is_err());
    }

    #[test]
    fn bad_values_are_config_errors() {
        let mut cfg = ScenarioConfig::default();
        cfg.set("measure", "torus").unwrap();
        assert_eq!(run(Scenario::DecayFit, &cfg).unwrap_err().exit_code(), EXIT_CONFIG);
        let mut cfg = ScenarioConfig::default();
        cfg.set("scenario", "norm").unwrap();
        assert!(run(Scenario::Verify, &cfg).is_err());
    }

    #[test]
    fn verify_passes() {
        let checks = verify_checks(7);
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
    }
}

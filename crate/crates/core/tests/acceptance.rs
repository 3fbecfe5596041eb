//! Acceptance run: one line per criterion, wall-clock limits enforced.
//! Exits non-zero when any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use maxmul::cli::{run, Scenario, ScenarioConfig};
use maxmul::decay::{dyadic_magnitudes, pointwise_decay, square_function_decay};
use maxmul::exponents::{
    interp_bound_series, lemma31_construct, parse_exponent, range_cor24, range_cor25, range_thm22, range_thm23,
    theta_bound_thm21, tilde_exponent, ExponentField,
};
use maxmul::grid::{forward_ft, norm_lp, sample, sample_at, Domain, GridFunction, GridSpec};
use maxmul::measures::{atomize, ft, MeasureSpec};
use maxmul::multiplier::{apply_multiplier, check_31, check_33, direct_average_many, TimeGrid};
use maxmul::varlp::luxemburg_norm;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn gauss_w(w: f64) -> impl Fn(&[f64]) -> f64 {
    move |x: &[f64]| (-PI * x.iter().map(|v| v * v).sum::<f64>() / (w * w)).exp()
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn gaussian_fixed_point() -> Outcome {
    let spec = GridSpec::new(1, 256, 16.0).map_err(|e| e.to_string())?;
    let fhat = forward_ft(&sample(&spec, gauss_w(1.0)).unwrap());
    let err = (0..spec.len())
        .map(|i| (fhat.values()[i] - gauss_w(1.0)(&spec.frequency(i)[..1])).norm())
        .fold(0.0, f64::max);
    ensure(err < 1e-6, format!("max error {err:.3e}"))
}

fn luxemburg() -> Outcome {
    let spec = GridSpec::new(1, 64, 4.0).unwrap();
    let f = sample(&spec, |x: &[f64]| match x[0] {
        v if (0.0..0.5).contains(&v) => 2.0,
        v if (0.5..1.0).contains(&v) => 1.0,
        _ => 0.0,
    })
    .unwrap();
    let p = parse_exponent("step:2,4,x0=0.5,w=0").unwrap();
    let lambda = luxemburg_norm(&f, &p, 1e-12).unwrap();
    let closed = (6f64.sqrt() - 2.0).powf(-0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut classical = 0.0f64;
    let mut homog = 0.0f64;
    for _ in 0..50 {
        let vals = (0..spec.len())
            .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let g = GridFunction::from_values(spec, Domain::Space, vals).unwrap();
        let q = rng.gen_range(1.0..8.0);
        let a = luxemburg_norm(&g, &ExponentField::constant(q).unwrap(), 1e-12).unwrap();
        let b = norm_lp(&g, q).unwrap();
        classical = classical.max((a - b).abs() / b);
        let c = rng.gen_range(0.01..100.0);
        let base = luxemburg_norm(&g, &p, 1e-12).unwrap();
        let scaled = luxemburg_norm(&g.scaled(Complex64::new(-c, 0.0)), &p, 1e-12).unwrap();
        homog = homog.max((scaled - c * base).abs() / (c * base));
    }
    ensure(
        (lambda - closed).abs() < 1e-6 && classical < 1e-8 && homog < 1e-10,
        format!("lambda {lambda:.9} (closed form {closed:.9}), classical {classical:.1e}, homogeneity {homog:.1e}"),
    )
}

fn circle_decay() -> Outcome {
    let fit = pointwise_decay(&MeasureSpec::sphere(2, 1.0).unwrap(), &dyadic_magnitudes(2, 9)).unwrap();
    ensure((fit.alpha - 0.5).abs() <= 0.05, format!("envelope alpha {:.4}", fit.alpha))
}

fn fractal_gain() -> Outcome {
    let m = MeasureSpec::cantor_radial(4, 2, 0.5, 10).unwrap();
    let mags = dyadic_magnitudes(2, 10);
    let sq = square_function_decay(&m, &mags).unwrap();
    let env = pointwise_decay(&m, &mags).unwrap();
    let cantor = MeasureSpec::cantor(4).unwrap();
    let one = ft(&cantor, &[1.0]).norm();
    let drift = (0..=8)
        .map(|k| (ft(&cantor, &[4f64.powi(k)]).norm() - one).abs())
        .fold(0.0, f64::max);
    ensure(
        (sq.alpha - 0.75).abs() <= 0.1 && (env.alpha - 0.5).abs() <= 0.1 && drift < 1e-6,
        format!("square {:.4}, envelope {:.4}, |mu(1)| {one:.5}, drift {drift:.1e}", sq.alpha, env.alpha),
    )
}

fn ranges() -> Outcome {
    let mut checked = 0;
    for n in [2u32, 3, 4, 5, 6] {
        let nf = n as f64;
        for a in [0.625, 0.75, 1.0, 1.5, 2.25] {
            for p in [1.125, 1.5, 2.0, 3.25, 6.0] {
                let q = p + 0.25;
                if range_cor24(n, a, p, q).unwrap() != range_thm23(n, a, 0.0, p, q).unwrap() {
                    return Err(format!("cor24 differs at n={n}, a={a}, p={p}"));
                }
                let ad = [0.125, 0.25, 0.5, 0.75, 0.875][(a * 8.0) as usize % 5];
                let lhs = range_cor25(n, ad, p, q).unwrap();
                let rhs = range_thm23(n, (nf - 1.0 + ad) / 2.0, nf - 1.0 + ad, p, q).unwrap();
                if lhs != rhs {
                    return Err(format!("cor25 differs at n={n}, ad={ad}, p={p}"));
                }
                checked += 2;
            }
        }
    }
    for (n, alpha, beta) in [(2, 0.75, 1.5), (3, 1.0, 1.0), (1, 2.0, 0.5)] {
        let v = range_thm22(n, alpha, beta, 2.0, 2.0).unwrap();
        let inside = range_thm22(n, alpha, beta, v.lower.next_up(), v.upper.next_down()).unwrap();
        let low = range_thm22(n, alpha, beta, v.lower, v.upper.next_down()).unwrap();
        let high = range_thm22(n, alpha, beta, v.lower.next_up(), v.upper).unwrap();
        if !inside.admissible || low.admissible || high.admissible {
            return Err(format!("strictness fails at n={n}, alpha={alpha}, beta={beta}"));
        }
    }
    Ok(format!("{checked} identities exact, bounds strict"))
}

fn dyadic_l2() -> Outcome {
    let spec = GridSpec::new(2, 512, 16.0).unwrap();
    let f = sample(&spec, gauss_w(0.125)).unwrap();
    let r = check_31(&f, &MeasureSpec::ball(2, 1.0).unwrap(), 1..=7, &TimeGrid::default()).map_err(|e| e.to_string())?;
    let early = maxmul::fit::linear_fit(
        &r.ratios[..4].iter().map(|(j, _)| *j as f64).collect::<Vec<_>>(),
        &r.ratios[..4].iter().map(|(_, v)| v.log2()).collect::<Vec<_>>(),
    );
    ensure(r.slope <= -0.85, format!("slope {:.3} (j in 1..=4: {:.3})", r.slope, early.slope))
}

fn domination() -> Outcome {
    let spec = GridSpec::new(2, 512, 16.0).unwrap();
    let tg = TimeGrid::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for (mname, m, beta) in [
        ("circle", MeasureSpec::sphere(2, 1.0).unwrap(), 1.0),
        ("delta", MeasureSpec::delta(2).unwrap(), 0.0),
    ] {
        for (fname, f) in [
            ("gauss", sample(&spec, gauss_w(1.0)).unwrap()),
            ("indicator", sample(&spec, |x: &[f64]| if x[0] * x[0] + x[1] * x[1] <= 1.0 { 1.0 } else { 0.0 }).unwrap()),
        ] {
            let r = check_33(&f, &m, beta, 1..=7, &tg).map_err(|e| e.to_string())?;
            ok &= r.slope <= 0.1;
            parts.push(format!("{mname}/{fname} {:.2}", r.slope));
        }
    }
    ensure(ok, format!("slopes {}", parts.join(", ")))
}

fn oracle() -> Outcome {
    let spec = GridSpec::new(2, 256, 8.0).unwrap();
    let f = sample(&spec, gauss_w(2.0)).unwrap();
    let circle = MeasureSpec::sphere(2, 1.0).unwrap();
    let atoms = atomize(&circle, 12).unwrap();
    if atoms.len() != 4096 {
        return Err(format!("{} atoms", atoms.len()));
    }
    let xs: Vec<Vec<f64>> = (0..spec.len()).step_by(17).map(|i| spec.point(i)[..2].to_vec()).collect();
    let mut err = 0.0f64;
    for t in [0.25, 0.5, 1.0, 2.0] {
        let g = apply_multiplier(&f, &circle, t, None).unwrap();
        let peak = g.max_abs();
        for (x, d) in xs.iter().zip(direct_average_many(&f, &atoms, t, &xs)) {
            err = err.max((sample_at(&g, x) - d).norm() / peak);
        }
    }
    ensure(err < 1e-3, format!("max relative error {err:.2e} over {} points", xs.len()))
}

fn random_field(rng: &mut ChaCha8Rng) -> ExponentField {
    match rng.gen_range(0..3) {
        0 => ExponentField::constant(rng.gen_range(1.1..5.0)).unwrap(),
        1 => ExponentField::smooth_step(
            rng.gen_range(1.1..5.0),
            rng.gen_range(1.1..5.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.0..3.0),
        )
        .unwrap(),
        _ => ExponentField::radial(rng.gen_range(1.2..3.0), rng.gen_range(0.0..1.0)).unwrap(),
    }
}

fn interpolation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut identity = 0.0f64;
    for _ in 0..500 {
        let p = random_field(&mut rng);
        let theta = rng.gen_range(0.01..0.99);
        let Ok(t) = tilde_exponent(&p, theta) else { continue };
        let x = [rng.gen_range(-5.0..5.0)];
        identity = identity.max((1.0 / p.eval(&x) - ((1.0 - theta) / 2.0 + theta / t.eval(&x))).abs());
    }
    let mut lemma = 0;
    let mut tries = 0;
    while lemma < 100 {
        tries += 1;
        if tries > 100_000 {
            return Err(format!("only {lemma} admissible fields found"));
        }
        let p = random_field(&mut rng);
        let n = rng.gen_range(1..=4u32);
        let alpha = rng.gen_range(0.6..3.0);
        let beta = rng.gen_range(0.0..=1.0) * n as f64;
        if !range_thm22(n, alpha, beta, p.lower(), p.upper()).unwrap().admissible {
            continue;
        }
        let l = lemma31_construct(&p, n, alpha, beta).map_err(|e| e.to_string())?;
        let (tl, tu) = l.tilde.bounds();
        let tm = theta_bound_thm21(n, alpha, beta).unwrap();
        let within = [-4.0, -0.5, 0.0, 0.25, 3.0, 100.0]
            .iter()
            .all(|&x| ((1.0 / p.eval(&[x]) - 0.5) / l.theta).abs() < 0.5);
        if !(1.0 < tl && tl <= tu && tu.is_finite() && l.theta < tm && within) {
            return Err(format!("postcondition fails for n={n}, alpha={alpha}, beta={beta}"));
        }
        lemma += 1;
    }
    for _ in 0..1000 {
        let n = rng.gen_range(1..=4u32);
        let alpha = rng.gen_range(0.6..3.0);
        let beta = rng.gen_range(0.0..=1.0) * n as f64;
        let theta = rng.gen_range(0.0..1.0);
        let s = interp_bound_series(n, alpha, beta, theta).unwrap();
        if s.converges != (theta < theta_bound_thm21(n, alpha, beta).unwrap()) || s.converges != (s.ratio < 1.0) {
            return Err(format!("series mismatch at n={n}, alpha={alpha}, beta={beta}, theta={theta}"));
        }
    }
    ensure(identity < 1e-14, format!("identity {identity:.1e}, {lemma} lemma fields, 1000 series"))
}

fn scenario_configs() -> Vec<(Scenario, &'static str)> {
    vec![
        (Scenario::Norm, ""),
        (Scenario::DecayFit, "measure=cantor-radial:m=4\nxi_max=256"),
        (Scenario::RangeTable, "alpha=0.75,1,1.5\nbeta=0,1,1.5\nalpha_dim=0.25,0.5\nexponent=step:1.8,2.6"),
        (Scenario::DyadicL2, "samples=128\nside=8\nt_max=2\nj_max=4"),
        (Scenario::Domination, "samples=128\nside=8\nt_max=2\nj_max=4"),
        (Scenario::MaximalRatio, "samples=64\nside=16\nexponent=radial:pinf=2,A=0.5"),
        (Scenario::Verify, ""),
    ]
}

fn determinism() -> Outcome {
    let mut runs = 0;
    for (scenario, text) in scenario_configs() {
        let mut reference: Option<String> = None;
        for threads in ["1", "2", "4", "", ""] {
            let mut cfg = ScenarioConfig::parse(text).map_err(|e| e.to_string())?;
            if !threads.is_empty() {
                cfg.set("threads", threads).unwrap();
            }
            let csv = run(scenario, &cfg).map_err(|e| format!("{scenario}: {e}"))?.csv;
            runs += 1;
            match &reference {
                None => reference = Some(csv),
                Some(r) if *r != csv => return Err(format!("{scenario} differs with threads={threads:?}")),
                Some(_) => {}
            }
        }
    }
    let bin = env!("CARGO_BIN_EXE_maxmul");
    let outputs: Vec<Vec<u8>> = (0..3)
        .map(|_| std::process::Command::new(bin).arg("verify").output().map(|o| o.stdout))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(
        outputs.windows(2).all(|w| w[0] == w[1]) && !outputs[0].is_empty(),
        format!("{runs} in-process runs and 3 binary runs identical"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("gaussian fixed point", gaussian_fixed_point, 1),
        ("luxemburg norm", luxemburg, 5),
        ("circle pointwise decay", circle_decay, 5),
        ("fractal square-function gain", fractal_gain, 30),
        ("range calculators", ranges, 1),
        ("dyadic L2 decay", dyadic_l2, 60),
        ("pointwise domination", domination, 60),
        ("oracle equivalence", oracle, 10),
        ("interpolation arithmetic", interpolation, 2),
        ("determinism", determinism, 600),
    ];
    let mut failures = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(*limit);
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "[{}] {:>2}. {name}: {detail} ({:.2} s, limit {limit} s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of 10 criteria passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

//! The modular `ρ(f) = ∫ |f|^{p(x)} dx` and the Luxemburg norm
//! `‖f‖_{p(·)} = inf{λ > 0 : ρ(f/λ) ≤ 1}` on grid functions. The domain of
//! integration is the grid box; functions vanish outside it.

use crate::error::{Error, Result};
use crate::exponents::ExponentField;
use crate::grid::{norm_lp, GridFunction};

/// Iteration cap for both bracket expansion and bisection.
const MAX_ITERATIONS: usize = 200;

pub const DEFAULT_REL_TOL: f64 = 1e-12;

/// Value of the modular; overflow is reported as `Infinite` and compares
/// above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Modular {
    Finite(f64),
    Infinite,
}

impl Modular {
    pub fn value(self) -> f64 {
        match self {
            Modular::Finite(v) => v,
            Modular::Infinite => f64::INFINITY,
        }
    }

    fn at_most_one(self) -> bool {
        matches!(self, Modular::Finite(v) if v <= 1.0)
    }
}

/// Riemann sum `Σ (|f_i|/λ)^{p(x_i)} Δxⁿ`.
pub fn modular(f: &GridFunction, p: &ExponentField, lambda: f64) -> Result<Modular> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} must be positive")));
    }
    let exps = p.sample(f.spec());
    Ok(modular_sampled(&f.moduli(), &exps, f.spec().spacing().powi(f.spec().dim() as i32), lambda))
}

fn modular_sampled(moduli: &[f64], exps: &[f64], cell: f64, lambda: f64) -> Modular {
    let mut sum = 0.0;
    for (&m, &p) in moduli.iter().zip(exps) {
        if m == 0.0 {
            continue;
        }
        sum += (p * (m / lambda).ln()).exp();
    }
    let v = sum * cell;
    if v.is_finite() {
        Modular::Finite(v)
    } else {
        Modular::Infinite
    }
}

/// Luxemburg norm by bisection on λ.
///
/// Returns `λ*` with `ρ(f/λ*) ≤ 1 < ρ(f/(λ*(1 − tol)))`. The bracket
/// starts from the classical norms at `p₋` and `p₊` and is widened by
/// doubling if needed.
pub fn luxemburg_norm(f: &GridFunction, p: &ExponentField, rel_tol: f64) -> Result<f64> {
    if !(rel_tol > 1e-15 && rel_tol < 1e-3) {
        return Err(Error::InvalidParameter(format!("relative tolerance {rel_tol} not in (1e-15, 1e-3)")));
    }
    let moduli = f.moduli();
    if moduli.iter().all(|&m| m == 0.0) {
        return Ok(0.0);
    }
    let exps = p.sample(f.spec());
    let cell = f.spec().spacing().powi(f.spec().dim() as i32);
    let rho = |lambda: f64| modular_sampled(&moduli, &exps, cell, lambda);

    let a = norm_lp(f, p.lower())?;
    let b = norm_lp(f, p.upper())?;
    let mut lo = 0.5 * a.min(b);
    let mut hi = 2.0 * a.max(b);
    let mut expansions = 0;
    while !rho(hi).at_most_one() {
        hi *= 2.0;
        expansions += 1;
        if expansions > MAX_ITERATIONS {
            return Err(Error::Bracket(format!("no upper bracket up to {hi}")));
        }
    }
    while rho(lo).at_most_one() {
        lo *= 0.5;
        expansions += 1;
        if expansions > MAX_ITERATIONS || lo == 0.0 {
            return Err(Error::Bracket(format!("no lower bracket down to {lo}")));
        }
    }
    for _ in 0..MAX_ITERATIONS {
        if hi - lo <= rel_tol * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if rho(mid).at_most_one() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::parse_exponent;
    use crate::grid::{sample, GridSpec};
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn two_step() -> (GridFunction, ExponentField) {
        let spec = GridSpec::new(1, 64, 4.0).unwrap();
        let f = sample(&spec, |x: &[f64]| {
            if (0.0..0.5).contains(&x[0]) {
                2.0
            } else if (0.5..1.0).contains(&x[0]) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        (f, parse_exponent("step:2,4,x0=0.5,w=0").unwrap())
    }

    #[test]
    fn modular_examples() {
        let spec = GridSpec::new(1, 64, 4.0).unwrap();
        let ind = sample(&spec, |x: &[f64]| if (0.0..1.0).contains(&x[0]) { 1.0 } else { 0.0 }).unwrap();
        let p = parse_exponent("radial:pinf=2,A=0.5").unwrap();
        assert!((modular(&ind, &p, 1.0).unwrap().value() - 1.0).abs() < 1e-14);
        let zero = GridFunction::zeros(spec);
        assert_eq!(modular(&zero, &p, 0.3).unwrap(), Modular::Finite(0.0));
        let (f, p) = two_step();
        assert!((modular(&f, &p, 1.0).unwrap().value() - 2.5).abs() < 1e-14);
        assert!(modular(&f, &p, 0.0).is_err());
        let huge = sample(&spec, |_: &[f64]| 1e300).unwrap();
        let c = ExponentField::constant(4.0).unwrap();
        assert_eq!(modular(&huge, &c, 1.0).unwrap(), Modular::Infinite);
    }

    #[test]
    fn two_step_norm() {
        let (f, p) = two_step();
        let want = (6f64.sqrt() - 2.0).powf(-0.5);
        let got = luxemburg_norm(&f, &p, DEFAULT_REL_TOL).unwrap();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        assert!((got - 1.4915579).abs() < 1e-6);
        assert!(modular(&f, &p, got).unwrap().value() <= 1.0);
        assert!(modular(&f, &p, got * (1.0 - DEFAULT_REL_TOL)).unwrap().value() > 1.0);
        assert_eq!(luxemburg_norm(&GridFunction::zeros(*f.spec()), &p, 1e-9).unwrap(), 0.0);
        assert!(luxemburg_norm(&f, &p, 1e-2).is_err());
    }

    fn random_fn(vals: Vec<f64>) -> GridFunction {
        let spec = GridSpec::new(1, 64, 4.0).unwrap();
        GridFunction::from_values(
            spec,
            crate::grid::Domain::Space,
            vals.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        )
        .unwrap()
    }

    fn values() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0f64..5.0, 64).prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
    }

    fn exponent() -> impl Strategy<Value = ExponentField> {
        prop_oneof![
            (1.0f64..8.0).prop_map(|c| ExponentField::constant(c).unwrap()),
            (1.0f64..6.0, 1.0f64..6.0, 0.0f64..2.0).prop_map(|(a, b, w)| ExponentField::smooth_step(a, b, 0.0, w).unwrap()),
            (1.0f64..4.0, 0.0f64..2.0).prop_map(|(p, a)| ExponentField::radial(p, a).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn constant_exponent_matches_classical(v in values(), p in 1.0f64..8.0) {
            let f = random_fn(v);
            let lux = luxemburg_norm(&f, &ExponentField::constant(p).unwrap(), DEFAULT_REL_TOL).unwrap();
            let lp = norm_lp(&f, p).unwrap();
            prop_assert!((lux - lp).abs() <= 1e-8 * lp);
        }

        #[test]
        fn homogeneous(v in values(), p in exponent(), c in prop::sample::select(vec![0.1, 3.0, 100.0])) {
            let f = random_fn(v);
            let a = luxemburg_norm(&f, &p, DEFAULT_REL_TOL).unwrap();
            let b = luxemburg_norm(&f.scaled(Complex64::new(c, 0.0)), &p, DEFAULT_REL_TOL).unwrap();
            prop_assert!((b - c * a).abs() <= 1e-10 * c * a);
        }

        #[test]
        fn unit_ball_and_triangle(v in values(), w in values(), p in exponent()) {
            let f = random_fn(v.clone());
            let g = random_fn(w.clone());
            let nf = luxemburg_norm(&f, &p, DEFAULT_REL_TOL).unwrap();
            let ng = luxemburg_norm(&g, &p, DEFAULT_REL_TOL).unwrap();
            let m = modular(&f, &p, nf).unwrap().value();
            prop_assert!(m <= 1.0 && m > 1.0 - 1e-9);
            let sum = random_fn(v.iter().zip(&w).map(|(a, b)| a + b).collect());
            let ns = luxemburg_norm(&sum, &p, DEFAULT_REL_TOL).unwrap();
            prop_assert!(ns <= (nf + ng) * (1.0 + 1e-10));
        }

        #[test]
        fn monotone(v in values(), shrink in prop::collection::vec(0.0f64..1.0, 64), p in exponent()) {
            let f = random_fn(v.clone());
            let g = random_fn(v.iter().zip(&shrink).map(|(a, s)| a * s).collect());
            let nf = luxemburg_norm(&f, &p, DEFAULT_REL_TOL).unwrap();
            let ng = luxemburg_norm(&g, &p, DEFAULT_REL_TOL).unwrap();
            prop_assert!(ng <= nf * (1.0 + 1e-12));
        }
    }
}

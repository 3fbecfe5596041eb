//! Admissible exponent ranges, the interpolation exponent, and log-Hölder checks.

use maxmul::exponents::{
    in_b_sufficient, interp_bound_series, lemma31_construct, range_cor24, range_cor25, range_thm22, range_thm23,
    theta_bound_thm21, ExponentField, LogHolderOptions, DEFAULT_LOG_HOLDER_THRESHOLD,
};

fn main() -> maxmul::Result<()> {
    let (n, alpha, beta) = (2, 0.75, 1.5);
    let v = range_thm22(n, alpha, beta, 2.0, 2.0)?;
    println!("(n, alpha, beta) = ({n}, {alpha}, {beta}): p in ({}, {}), admissible {}", v.lower, v.upper, v.admissible);
    let v = range_thm23(n, alpha, beta, 2.0, 2.0)?;
    println!("with the p- dependent upper bound: ({}, {})", v.lower, v.upper);
    println!("disk (a = 1): {:?}", range_cor24(2, 1.0, 2.0, 2.0)?);
    println!("radial fractal, alpha_d = 1/2: {:?}", range_cor25(2, 0.5, 2.0, 2.0)?);

    let theta_max = theta_bound_thm21(n, alpha, beta)?;
    println!("theta_max = {theta_max}");
    for theta in [0.5 * theta_max, theta_max, 0.5 * (1.0 + theta_max)] {
        let s = interp_bound_series(n, alpha, beta, theta)?;
        println!("  theta {theta:.4}: ratio {:.4}, sum {:?}", s.ratio, s.sum);
    }

    let p = ExponentField::smooth_step(1.8, 2.6, 0.0, 1.0)?;
    let l = lemma31_construct(&p, n, alpha, beta)?;
    println!("lemma: theta {:.4}, delta {:.4}, p~ in [{:.4}, {:.4}]", l.theta, l.delta, l.tilde.lower(), l.tilde.upper());

    let radial = ExponentField::radial(2.0, 0.5)?;
    let verdict = in_b_sufficient(&radial, &LogHolderOptions::default(), DEFAULT_LOG_HOLDER_THRESHOLD)?;
    println!(
        "radial exponent: log-Hölder c1 {:.3}, c2 {:.3}, sufficient {}",
        verdict.report.c1, verdict.report.c2, verdict.holds
    );
    Ok(())
}

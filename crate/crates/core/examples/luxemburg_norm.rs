//! Luxemburg norms in L^{p(·)}.

use maxmul::exponents::{parse_exponent, ExponentField};
use maxmul::grid::{norm_lp, sample, GridSpec};
use maxmul::varlp::{luxemburg_norm, modular, DEFAULT_REL_TOL};

fn main() -> maxmul::Result<()> {
    // f = 2 on [0, ½), 1 on [½, 1); p = 2 then 4 past ½
    let spec = GridSpec::new(1, 64, 4.0)?;
    let f = sample(&spec, |x: &[f64]| match x[0] {
        v if (0.0..0.5).contains(&v) => 2.0,
        v if (0.5..1.0).contains(&v) => 1.0,
        _ => 0.0,
    })?;
    let p = parse_exponent("step:2,4,x0=0.5,w=0")?;
    let lambda = luxemburg_norm(&f, &p, DEFAULT_REL_TOL)?;
    println!("two-step norm     {lambda:.10}");
    println!("closed form       {:.10}", (6f64.sqrt() - 2.0).powf(-0.5));
    println!("modular at norm   {:.12}", modular(&f, &p, lambda)?.value());

    // constant exponents reduce to the usual L^q norm
    for q in [1.0, 1.5, 3.0, 7.0] {
        let a = luxemburg_norm(&f, &ExponentField::constant(q)?, DEFAULT_REL_TOL)?;
        println!("q = {q}: luxemburg {a:.10}  classical {:.10}", norm_lp(&f, q)?);
    }

    let smooth = ExponentField::smooth_step(1.5, 3.0, 0.0, 2.0)?;
    println!("smooth step [{}, {}]: {:.8}", smooth.lower(), smooth.upper(), luxemburg_norm(&f, &smooth, DEFAULT_REL_TOL)?);
    Ok(())
}

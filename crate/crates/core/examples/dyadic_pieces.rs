//! Littlewood–Paley pieces of the maximal operator: L² decay and pointwise domination.

use std::f64::consts::PI;

use maxmul::grid::{sample, GridSpec};
use maxmul::measures::MeasureSpec;
use maxmul::multiplier::{check_31, check_33, decomposition_excess, TimeGrid};

fn main() -> maxmul::Result<()> {
    let spec = GridSpec::new(2, 256, 16.0)?;
    let tg = TimeGrid::new(1.0 / 32.0, 2.0, 6)?;
    let narrow = sample(&spec, |x: &[f64]| (-64.0 * PI * (x[0] * x[0] + x[1] * x[1])).exp())?;
    let disk = MeasureSpec::ball(2, 1.0)?;
    let r = check_31(&narrow, &disk, 1..=5, &tg)?;
    println!("disk, |M_j f|_2 / |f|_2:");
    for (j, v) in &r.ratios {
        println!("  j = {j}: {v:.4e}");
    }
    println!("  log2 slope {:.3}", r.slope);

    let wide = sample(&spec, |x: &[f64]| (-PI * (x[0] * x[0] + x[1] * x[1])).exp())?;
    let circle = MeasureSpec::sphere(2, 1.0)?;
    let d = check_33(&wide, &circle, 1.0, 1..=5, &tg)?;
    println!("circle, sup M_j f / (2^j Mf): slope {:.3}", d.slope);
    println!("decomposition excess {:.2e}", decomposition_excess(&wide, &circle, &tg)?);
    Ok(())
}

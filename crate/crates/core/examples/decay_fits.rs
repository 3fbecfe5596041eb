//! Pointwise and square-function decay rates of measure transforms.

use maxmul::decay::{dyadic_magnitudes, pointwise_decay, square_function_decay};
use maxmul::measures::MeasureSpec;

fn main() -> maxmul::Result<()> {
    let cases = [
        ("circle", MeasureSpec::sphere(2, 1.0)?, dyadic_magnitudes(2, 9)),
        ("disk", MeasureSpec::ball(2, 1.0)?, dyadic_magnitudes(2, 9)),
        ("sphere in R^3", MeasureSpec::sphere(3, 1.0)?, dyadic_magnitudes(2, 8)),
        ("radial Cantor", MeasureSpec::cantor_radial(4, 2, 0.5, 10)?, dyadic_magnitudes(2, 10)),
    ];
    println!("{:<14} {:>9} {:>9}", "measure", "pointwise", "square");
    for (name, m, mags) in cases {
        let p = pointwise_decay(&m, &mags)?;
        let s = square_function_decay(&m, &mags)?;
        println!("{name:<14} {:>9.4} {:>9.4}", p.alpha, s.alpha);
        for w in p.warnings.iter().chain(&s.warnings) {
            println!("  warning: {w}");
        }
    }
    Ok(())
}

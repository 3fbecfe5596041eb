//! Box-counting style dimension estimates from atomic approximations.

use maxmul::measures::{atomize, beta_dimension_estimate, MeasureSpec};

fn main() -> maxmul::Result<()> {
    let radii: Vec<f64> = (3..=8).map(|k| 2f64.powi(-k)).collect();
    let cases = [
        ("Cantor, base 4", MeasureSpec::cantor(4)?, 12, 0.5),
        ("circle", MeasureSpec::sphere(2, 1.0)?, 12, 1.0),
        ("disk", MeasureSpec::ball(2, 1.0)?, 16, 2.0),
    ];
    for (name, m, level, expected) in cases {
        let atoms = atomize(&m, level)?;
        let fit = beta_dimension_estimate(&atoms, &radii)?;
        println!(
            "{name:<15} {} atoms: beta {:.3} (expected {expected}), c_beta {:.3}, residual {:.3}",
            atoms.len(),
            fit.beta,
            fit.c_beta,
            fit.residual
        );
    }
    Ok(())
}

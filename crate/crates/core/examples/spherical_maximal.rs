//! Maximal averages over dilated circles against the Hardy–Littlewood maximal function.

use maxmul::exponents::ExponentField;
use maxmul::grid::{sample, GridSpec};
use maxmul::measures::MeasureSpec;
use maxmul::multiplier::{default_radii, hl_maximal, maximal_multiplier, TimeGrid};
use maxmul::varlp::{luxemburg_norm, DEFAULT_REL_TOL};

fn main() -> maxmul::Result<()> {
    let spec = GridSpec::new(2, 128, 16.0)?;
    let f = sample(&spec, |x: &[f64]| if x[0] * x[0] + x[1] * x[1] <= 1.0 { 1.0 } else { 0.0 })?;
    let circle = MeasureSpec::sphere(2, 1.0)?;
    let tg = TimeGrid::default();
    let mf = maximal_multiplier(&f, &circle, &tg, None)?;
    let hl = hl_maximal(&f, &default_radii(&spec))?;

    let origin = spec.ravel(&[64, 64]);
    let edge = spec.ravel(&[64 + 24, 64]);
    for (label, i) in [("origin", origin), ("x = (3, 0)", edge)] {
        println!("{label:<11} circle maximal {:.4}  HL maximal {:.4}", mf.values()[i].re, hl.values()[i].re);
    }

    for p in [ExponentField::constant(1.5)?, ExponentField::constant(3.0)?, ExponentField::radial(2.5, 0.5)?] {
        let a = luxemburg_norm(&f, &p, DEFAULT_REL_TOL)?;
        let b = luxemburg_norm(&mf, &p, DEFAULT_REL_TOL)?;
        println!("p in [{:.2}, {:.2}]: |Mf| / |f| = {:.4}", p.lower(), p.upper(), b / a);
    }
    Ok(())
}

//! Sampling, the grid Fourier transform, and its basic identities.

use std::f64::consts::PI;

use maxmul::grid::{forward_ft, inverse_ft, norm_lp, sample, GridSpec};

fn main() -> maxmul::Result<()> {
    let spec = GridSpec::new(1, 256, 16.0)?;
    let f = sample(&spec, |x: &[f64]| (-PI * x[0] * x[0]).exp())?;
    let fhat = forward_ft(&f);

    // e^{-πx²} is its own transform
    let err = (0..spec.len())
        .map(|i| {
            let xi = spec.frequency(i)[0];
            (fhat.values()[i].re - (-PI * xi * xi).exp()).abs()
        })
        .fold(0.0, f64::max);
    println!("gaussian fixed point error  {err:.2e}");

    let back = inverse_ft(&fhat);
    let round = back.values().iter().zip(f.values()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    println!("round-trip error            {round:.2e}");
    println!("L2 norms (space, frequency) {:.12} {:.12}", norm_lp(&f, 2.0)?, norm_lp(&fhat, 2.0)?);

    let plane = GridSpec::new(2, 64, 8.0)?;
    println!(
        "2D grid: {} points, spacing {}, Nyquist radius {:.3}",
        plane.len(),
        plane.spacing(),
        plane.max_frequency()
    );
    Ok(())
}

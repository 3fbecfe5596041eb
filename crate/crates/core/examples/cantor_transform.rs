//! The Cantor measure's transform does not decay along 4^k.

use maxmul::measures::{ft, MeasureSpec};

fn main() -> maxmul::Result<()> {
    let cantor = MeasureSpec::cantor(4)?;
    for k in 0..=8 {
        let xi = 4f64.powi(k);
        println!("|mu^(4^{k})| = {:.10}", ft(&cantor, &[xi]).norm());
    }
    // generic frequencies do shrink, slowly and irregularly
    for xi in [3.0, 30.0, 300.0, 3000.0] {
        println!("|mu^({xi})| = {:.6}", ft(&cantor, &[xi]).norm());
    }

    let radial = MeasureSpec::cantor_radial(4, 2, 0.5, 10)?;
    for r in [4.0, 64.0, 1024.0] {
        println!("radial composition at |xi| = {r}: {:.6}", ft(&radial, &[r, 0.0]).norm());
    }
    Ok(())
}

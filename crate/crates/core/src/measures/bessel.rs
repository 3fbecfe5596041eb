//! Bessel functions of the first kind for small integer orders.
//!
//! Power series for `z <= 12`, Hankel asymptotic expansion beyond. The
//! asymptotic series is summed until its terms stop decreasing, which at
//! the switch point is about 25 terms and gives an absolute error near
//! 1e-13.

use std::f64::consts::PI;

const SWITCH: f64 = 12.0;

/// `J_order(z)` for `z >= 0`. Negative `z` is reflected using
/// `J_ν(-z) = (-1)^ν J_ν(z)`.
pub fn bessel_j(order: u32, z: f64) -> f64 {
    if z < 0.0 {
        let v = bessel_j(order, -z);
        return if order.is_multiple_of(2) { v } else { -v };
    }
    if z <= SWITCH {
        series(order, z)
    } else {
        asymptotic(order, z)
    }
}

pub fn bessel_j0(z: f64) -> f64 {
    bessel_j(0, z)
}

pub fn bessel_j1(z: f64) -> f64 {
    bessel_j(1, z)
}

fn series(order: u32, z: f64) -> f64 {
    let half = 0.5 * z;
    let q = -half * half;
    // leading term (z/2)^ν / ν!
    let mut term = 1.0;
    for k in 1..=order {
        term *= half / k as f64;
    }
    let mut sum = term;
    let mut k = 1u32;
    loop {
        term *= q / (k as f64 * (k + order) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > 2 {
            break;
        }
        k += 1;
        if k > 200 {
            break;
        }
    }
    sum
}

fn asymptotic(order: u32, z: f64) -> f64 {
    let mu = 4.0 * (order as f64).powi(2);
    let eight_z = 8.0 * z;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..60u32 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * eight_z);
        if a.abs() >= prev {
            break;
        }
        prev = a.abs();
        // signs alternate within P (even k) and within Q (odd k)
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let omega = z - (order as f64 * 0.5 + 0.25) * PI;
    (2.0 / (PI * z)).sqrt() * (p * omega.cos() - q * omega.sin())
}

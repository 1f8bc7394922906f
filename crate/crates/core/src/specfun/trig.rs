//! Trigonometric functions of `pi * x` with exact argument reduction.

use std::f64::consts::PI;

/// Returns `(sin(pi*x), cos(pi*x))`; exact zeros at integers and half-integers.
pub fn sin_cos_pi(x: f64) -> (f64, f64) {
    // x - n/2 is computed exactly (Sterbenz) so the reduced angle carries no error.
    let n = (2.0 * x).round();
    let r = x - 0.5 * n;
    let (s, c) = if r == 0.0 {
        (0.0, 1.0)
    } else {
        (PI * r).sin_cos()
    };
    match (n.rem_euclid(4.0)) as u8 {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

pub fn sin_pi(x: f64) -> f64 {
    sin_cos_pi(x).0
}

pub fn cos_pi(x: f64) -> f64 {
    sin_cos_pi(x).1
}

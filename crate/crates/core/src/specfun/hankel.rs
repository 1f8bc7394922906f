//! Large-argument (Hankel) expansion
//! `J_nu(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi)`,
//! `Y_nu(x) = sqrt(2/(pi x)) (P sin chi + Q cos chi)`, `chi = x - (nu/2 + 1/4) pi`.

use super::trig::sin_cos_pi;
use std::f64::consts::FRAC_2_PI;

/// Smallest argument at which the expansion is used.
pub const HANKEL_MIN_ARG: f64 = 25.0;
const MAX_TERMS: usize = 200;

/// The expansion is used when `x >= max(HANKEL_MIN_ARG, (nu+1)^2 / 2)`; past that
/// point the terms decrease from the first one on and reach 1e-17 well before
/// the asymptotic series starts to diverge.
pub fn hankel_applies(nu: f64, x: f64) -> bool {
    let m = nu.abs() + 1.0;
    x >= HANKEL_MIN_ARG && x >= 0.5 * m * m
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct HankelEval {
    pub j: f64,
    pub y: f64,
    /// Bound on the truncation error of both J and Y (first omitted term times the envelope).
    pub tail: f64,
}

/// `(P, Q, |first omitted term|)`.
fn pq(nu: f64, x: f64) -> (f64, f64, f64) {
    let mu4 = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut tail = 0.0;
    for k in 1..=MAX_TERMS {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu4 - odd * odd) / (8.0 * k as f64 * x);
        if next == 0.0 {
            // half-integer order: the expansion terminates and is exact
            tail = 0.0;
            break;
        }
        if next.abs() >= term.abs() && k > 1 {
            tail = next.abs();
            break;
        }
        term = next;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * term;
        } else {
            p += sign * term;
        }
        if term.abs() < 1e-17 * p.abs() {
            tail = term.abs();
            break;
        }
    }
    (p, q, tail)
}

pub(crate) fn hankel_jy(nu: f64, x: f64) -> HankelEval {
    let (p, q, tail) = pq(nu, x);
    let (sx, cx) = x.sin_cos();
    let (sc, cc) = sin_cos_pi(0.5 * nu + 0.25);
    // chi = x - c: expanded so that the large x is never rounded inside the phase
    let cos_chi = cx * cc + sx * sc;
    let sin_chi = sx * cc - cx * sc;
    let amp = (FRAC_2_PI / x).sqrt();
    let j = amp * (p * cos_chi - q * sin_chi);
    let y = amp * (p * sin_chi + q * cos_chi);
    let round = 4.0 * f64::EPSILON * amp * (p.abs() + q.abs());
    HankelEval {
        j,
        y,
        tail: amp * tail + round,
    }
}

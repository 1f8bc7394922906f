//! Small and intermediate arguments. For `x < 2`, `Y` comes from Temme's series
//! at the fractional order and upward recurrence; Temme's series is uniform in
//! the fractional order, so integer and near-integer orders need no special
//! path. For larger `x`, Steed's method: a continued fraction for `J'/J`,
//! downward recurrence, and a complex continued fraction normalised through
//! the Wronskian.

use super::gamma::temme_gammas;
use super::SpecFunError;
use std::f64::consts::PI;

/// Below this argument the Temme series supplies `Y`; above it Steed's method.
pub(crate) const TEMME_MAX_ARG: f64 = 2.0;
const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 200_000;
const RESCALE: f64 = 1e250;

/// `J_nu, Y_nu, J_{nu+1}, Y_{nu+1}` for `nu >= 0`, `x > 0`, plus the number of
/// recurrence steps taken (feeds the rounding allowance).
#[derive(Debug, Clone, Copy)]
pub(crate) struct RawPair {
    pub j: f64,
    pub y: f64,
    pub j1: f64,
    pub y1: f64,
    pub steps: usize,
    pub cf1_iters: usize,
}

/// Temme's series at fractional order `mu ∈ [-1/2, 1/2]`, `x < 2`.
/// Returns `(Y_mu(x), x * Y_{mu+1}(x))`; the second factor stays finite as x → 0.
pub(crate) fn temme_y(mu: f64, x: f64) -> Result<(f64, f64), SpecFunError> {
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < EPS {
        1.0
    } else {
        pimu / pimu.sin()
    };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let g = temme_gammas(mu);
    let mut ff = 2.0 / PI * fact * (g.gam1 * e.cosh() + g.gam2 * fact2 * d);
    let ee = e.exp();
    let mut p = ee / (g.gampl * PI);
    let mut q = 1.0 / (ee * PI * g.gammi);
    let pimu2 = 0.5 * pimu;
    let fact3 = if pimu2.abs() < EPS {
        1.0
    } else {
        pimu2.sin() / pimu2
    };
    let r = PI * pimu2 * fact3 * fact3;
    let mut c = 1.0;
    let dd = -x2 * x2;
    let mut sum = ff + r * q;
    let mut sum1 = p;
    let mu2 = mu * mu;
    let mut converged = false;
    for i in 1..MAXIT {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * (ff + r * q);
        sum += del;
        let del1 = c * p - fi * del;
        sum1 += del1;
        if del.abs() < (1.0 + sum.abs()) * EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SpecFunError::NoConvergence {
            what: "Temme series",
            nu: mu,
            z: x,
        });
    }
    Ok((-sum, -2.0 * sum1))
}

/// `nu >= 0`, `x >= TEMME_MAX_ARG`. Normalising through the Wronskian is only
/// safe here: at small `x` and negative fractional order `J` and `Y` share their
/// leading power and the Wronskian denominator cancels.
pub(crate) fn steed_jy(nu: f64, x: f64) -> Result<RawPair, SpecFunError> {
    debug_assert!(nu >= 0.0 && x >= TEMME_MAX_ARG);
    let nl = (nu - x + 1.5).max(0.0) as usize;
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1 for J'/J at order nu + 1 by modified Lentz. Starting one order higher
    // lets the downward recurrence produce J_nu and J_{nu+1} directly; recovering
    // J_{nu+1} from J_nu and J'_nu instead cancels badly when x << nu.
    let top = nu + 1.0;
    let mut isign = 1.0;
    let mut h = (top * xi).max(FPMIN);
    let mut b = xi2 * top;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    let mut cf1_iters = 0;
    for it in 0..MAXIT {
        cf1_iters = it + 1;
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SpecFunError::NoConvergence {
            what: "CF1",
            nu,
            z: x,
        });
    }

    // Downward recurrence from nu + 1 to the fractional order xmu, unnormalised.
    let mut rjl = isign;
    let mut rjpl = h * rjl;
    let mut rj_top = rjl;
    let mut rj_nu = 0.0;
    let mut fact = top * xi;
    for i in 0..=nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
        if i == 0 {
            rj_nu = rjl;
        }
        if rjl.abs() > RESCALE {
            rjl /= RESCALE;
            rjpl /= RESCALE;
            rj_top /= RESCALE;
            rj_nu /= RESCALE;
        }
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    // CF2: p + iq = (J' + iY') / (J + iY) by Steed's algorithm.
    let mut a = 0.25 - xmu2;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    let mut converged = false;
    for i in 2..MAXIT {
        a += 2.0 * (i as f64 - 1.0);
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di /= -den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SpecFunError::NoConvergence {
            what: "CF2",
            nu,
            z: x,
        });
    }
    let gam = (p - f) / q;
    let mag = (w / ((p - f) * gam + q)).sqrt();
    let rjmu = mag.copysign(rjl);
    let mut rymu = rjmu * gam;
    let rymup = rymu * (p + q / gam);
    let mut ry1 = xmu * xi * rymu - rymup;

    let scale = rjmu / rjl;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    Ok(RawPair {
        j: rj_nu * scale,
        y: rymu,
        j1: rj_top * scale,
        y1: ry1,
        steps: nl,
        cf1_iters,
    })
}

/// `Y_nu(x)`, `Y_{nu+1}(x)` and the number of recurrence steps, for `nu >= 0`,
/// `0 < x < 2`. Overflow shows up as infinities.
pub(crate) fn temme_y_pair(nu: f64, x: f64) -> Result<(f64, f64, usize), SpecFunError> {
    debug_assert!(nu >= 0.0 && x > 0.0 && x < TEMME_MAX_ARG);
    let nl = (nu + 0.5) as usize;
    let xmu = nu - nl as f64;
    let xi2 = 2.0 / x;
    let (mut lo, x_y1) = temme_y(xmu, x)?;
    let mut hi = x_y1 / x;
    for i in 1..=nl {
        let next = (xmu + i as f64) * xi2 * hi - lo;
        lo = hi;
        hi = next;
    }
    Ok((lo, hi, nl))
}

/// `x^nu Y_nu(x)` and `x^{nu+1} Y_{nu+1}(x)` for `nu >= 0`, `0 < x < 2`, by
/// Temme's series and the scaled upward recurrence
/// `ỹ_{m+1} = 2 m ỹ_m - x^2 ỹ_{m-1}`, which never overflows as x → 0.
pub(crate) fn scaled_y_small(nu: f64, x: f64) -> Result<(f64, f64), SpecFunError> {
    debug_assert!(nu >= 0.0 && x > 0.0 && x < TEMME_MAX_ARG);
    let nl = (nu + 0.5) as usize;
    let xmu = nu - nl as f64;
    let (ymu, x_ymu1) = temme_y(xmu, x)?;
    let xm = x.powf(xmu);
    let mut lo = xm * ymu;
    let mut hi = xm * x_ymu1;
    let x2 = x * x;
    for i in 0..nl {
        let order = xmu + 1.0 + i as f64;
        let next = 2.0 * order * hi - x2 * lo;
        lo = hi;
        hi = next;
    }
    Ok((lo, hi))
}

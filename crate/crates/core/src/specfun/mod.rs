//! Bessel functions of the first kind `J_nu` and Weber functions `Y_nu` for real
//! order `|nu| <= 50` and positive real argument.
//!
//! Three regimes, selected per call:
//!
//! * `x < 2`: Temme's series for `Y` at the fractional order, `J` from its
//!   ascending series.
//! * `2 <= x < max(25, (|nu|+1)^2/2)`: Steed's complex continued fraction, or
//!   once `x >= max(25, 2(|nu|+1))` the Hankel expansion at the fractional order
//!   followed by upward recurrence.
//! * beyond: the Hankel expansion with an explicit bound on the first omitted term.
//!
//! Negative orders are reflected onto positive ones with exactly reduced
//! `sin(nu pi)`, `cos(nu pi)`. The Temme series is uniform in the fractional
//! order, so `Y` at integer and near-integer order needs no special casing.

mod gamma;
mod hankel;
mod steed;
mod trig;

pub use gamma::{gamma, rgamma};
pub use hankel::{hankel_applies, HANKEL_MIN_ARG};
pub use trig::{cos_pi, sin_cos_pi, sin_pi};

use std::f64::consts::PI;
use thiserror::Error;

/// Largest supported `|nu|`.
pub const MAX_ORDER: f64 = 50.0;

/// Below this argument `bessel_j_scaled` sums the ascending series directly.
pub const SCALED_SERIES_MAX_ARG: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("argument z = {z} outside the supported domain for order {nu}")]
    Domain { nu: f64, z: f64 },
    #[error("order {nu} outside the supported range |nu| <= 50")]
    OrderRange { nu: f64 },
    #[error("order {nu}, argument {z}: result not representable in f64")]
    Overflow { nu: f64, z: f64 },
    #[error("{what} did not converge for order {nu}, argument {z}")]
    NoConvergence { what: &'static str, nu: f64, z: f64 },
}

pub type Result<T> = std::result::Result<T, SpecFunError>;

/// A validated Bessel order.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Order(f64);

impl Order {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu.abs() > MAX_ORDER {
            return Err(SpecFunError::OrderRange { nu });
        }
        Ok(Self(nu))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Distance to the nearest integer.
    pub fn integer_distance(self) -> f64 {
        (self.0 - self.0.round()).abs()
    }
}

/// Which expansion produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// Ascending series of the scaled function.
    PowerSeries,
    /// `z < 2`: ascending series for `J`, Temme's series for `Y`.
    Temme,
    Steed,
    Hankel,
    /// Hankel expansion at the fractional order followed by upward recurrence.
    HankelRecurrence,
    /// Exact value of a scaled function at `z = 0`.
    ZeroLimit,
    /// Scaled function at a negative integer order, where `1/Γ(nu+1)` vanishes and
    /// the analytically continued value is returned.
    PoleContinuation,
}

/// Forces the evaluation regime; `Auto` is what the public functions use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    ContinuedFraction,
    Hankel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    /// Bound on the truncation error of the expansion used, plus a rounding allowance.
    pub est_abs_error: f64,
    pub branch: Branch,
}

/// `J` and `Y` at two consecutive orders `nu` and `nu + 1`, same argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JyPair {
    pub nu: f64,
    pub z: f64,
    pub j: f64,
    pub y: f64,
    pub j_next: f64,
    pub y_next: f64,
    /// Error bounds for `[j, y, j_next, y_next]`.
    pub est_abs_error: [f64; 4],
    pub branch: Branch,
}

impl JyPair {
    /// `J_{nu+1} Y_nu - J_nu Y_{nu+1}`, equal to `2/(pi z)`.
    pub fn cross(&self) -> f64 {
        self.j_next * self.y - self.j * self.y_next
    }
}

fn check_arg(nu: f64, z: f64) -> Result<()> {
    Order::new(nu)?;
    if !(z > 0.0) || !z.is_finite() {
        return Err(SpecFunError::Domain { nu, z });
    }
    Ok(())
}

/// Core evaluation for `nu >= 0`.
fn pair_nonneg(nu: f64, x: f64, method: Method) -> Result<JyPair> {
    #[derive(PartialEq)]
    enum Route {
        Hankel,
        HankelRecurrence,
        Other,
    }
    let route = match method {
        Method::Auto if hankel_applies(nu, x) => Route::Hankel,
        Method::Auto if recurrence_from_hankel_applies(nu, x) => Route::HankelRecurrence,
        Method::Auto | Method::ContinuedFraction => Route::Other,
        Method::Hankel => Route::Hankel,
    };
    let pair = if route == Route::Hankel {
        let a = hankel::hankel_jy(nu, x);
        let b = hankel::hankel_jy(nu + 1.0, x);
        JyPair {
            nu,
            z: x,
            j: a.j,
            y: a.y,
            j_next: b.j,
            y_next: b.y,
            est_abs_error: [a.tail, a.tail, b.tail, b.tail],
            branch: Branch::Hankel,
        }
    } else if route == Route::HankelRecurrence {
        hankel_recurrence_pair(nu, x)
    } else if x < steed::TEMME_MAX_ARG {
        small_arg_pair(nu, x)?
    } else {
        let raw = steed::steed_jy(nu, x)?;
        // CF1 rounding accumulates roughly linearly in its length, the
        // recurrences in theirs; oscillatory values are bounded against the envelope.
        let allowance =
            f64::EPSILON * (8.0 * raw.cf1_iters as f64 + 32.0 * (1.0 + raw.steps as f64));
        let err = |v: f64, envelope: f64| allowance * (v.abs() + envelope);
        let (env0, env1) = if x <= nu {
            (0.0, 0.0)
        } else {
            (raw.j.hypot(raw.y), raw.j1.hypot(raw.y1))
        };
        JyPair {
            nu,
            z: x,
            j: raw.j,
            y: raw.y,
            j_next: raw.j1,
            y_next: raw.y1,
            est_abs_error: [
                err(raw.j, env0),
                err(raw.y, env0),
                err(raw.j1, env1),
                err(raw.y1, env1),
            ],
            branch: Branch::Steed,
        }
    };
    let values = [pair.j, pair.y, pair.j_next, pair.y_next];
    if values.iter().any(|v| !v.is_finite()) {
        return Err(SpecFunError::Overflow { nu, z: x });
    }
    Ok(pair)
}

/// Far enough into the oscillatory region that upward recurrence is stable for
/// both `J` and `Y`.
fn recurrence_from_hankel_applies(nu: f64, x: f64) -> bool {
    x >= HANKEL_MIN_ARG && x >= 2.0 * (nu + 1.0)
}

/// Hankel expansion at the fractional order, then upward recurrence. Steed's
/// continued fraction would need about `x` steps here and lose accuracy in proportion.
fn hankel_recurrence_pair(nu: f64, x: f64) -> JyPair {
    let n = nu.floor();
    let base = nu - n;
    let a = hankel::hankel_jy(base, x);
    let b = hankel::hankel_jy(base + 1.0, x);
    let (mut j0, mut j1, mut y0, mut y1) = (a.j, b.j, a.y, b.y);
    let xi2 = 2.0 / x;
    for m in 1..=(n as usize) {
        let order = base + m as f64;
        let jn = order * xi2 * j1 - j0;
        let yn = order * xi2 * y1 - y0;
        j0 = j1;
        j1 = jn;
        y0 = y1;
        y1 = yn;
    }
    let tail = a.tail.max(b.tail);
    let round = 8.0 * f64::EPSILON * (1.0 + n);
    let env0 = j0.hypot(y0);
    let env1 = j1.hypot(y1);
    JyPair {
        nu,
        z: x,
        j: j0,
        y: y0,
        j_next: j1,
        y_next: y1,
        est_abs_error: [
            tail + round * env0,
            tail + round * env0,
            tail + round * env1,
            tail + round * env1,
        ],
        branch: Branch::HankelRecurrence,
    }
}

/// `x < 2`: `J` from the ascending series, `Y` from Temme's series.
fn small_arg_pair(nu: f64, x: f64) -> Result<JyPair> {
    let lead = |order: f64| (order * (0.5 * x).ln()).exp();
    let (s0, e0) = lambda_series(nu, x);
    let (s1, e1) = lambda_series(nu + 1.0, x);
    let (y, y1, steps) = steed::temme_y_pair(nu, x)?;
    // Temme's series carries terms of size |ln(x/2)| times the result.
    let allowance = f64::EPSILON * (32.0 * (1.0 + steps as f64) + 16.0 * (1.0 - (0.5 * x).ln()));
    Ok(JyPair {
        nu,
        z: x,
        j: lead(nu) * s0,
        y,
        j_next: lead(nu + 1.0) * s1,
        y_next: y1,
        est_abs_error: [
            lead(nu) * (e0 + 4.0 * f64::EPSILON * s0.abs()),
            allowance * y.abs(),
            lead(nu + 1.0) * (e1 + 4.0 * f64::EPSILON * s1.abs()),
            allowance * y1.abs(),
        ],
        branch: Branch::Temme,
    })
}

/// `(J_nu, Y_nu, err_J, err_Y, branch)` at a single, possibly negative, order.
fn single(nu: f64, x: f64, method: Method) -> Result<(f64, f64, f64, f64, Branch)> {
    if nu >= 0.0 {
        let p = pair_nonneg(nu, x, method)?;
        return Ok((p.j, p.y, p.est_abs_error[0], p.est_abs_error[1], p.branch));
    }
    let a = -nu;
    let p = pair_nonneg(a, x, method)?;
    let (s, c) = sin_cos_pi(a);
    let j = c * p.j - s * p.y;
    let y = s * p.j + c * p.y;
    let ej = c.abs() * p.est_abs_error[0] + s.abs() * p.est_abs_error[1];
    let ey = s.abs() * p.est_abs_error[0] + c.abs() * p.est_abs_error[1];
    Ok((j, y, ej, ey, p.branch))
}

/// `J` and `Y` at orders `nu` and `nu + 1` with one evaluation when `nu >= 0`.
pub fn bessel_jy_pair(nu: f64, z: f64) -> Result<JyPair> {
    bessel_jy_pair_with(nu, z, Method::Auto)
}

pub fn bessel_jy_pair_with(nu: f64, z: f64, method: Method) -> Result<JyPair> {
    check_arg(nu, z)?;
    if nu >= 0.0 {
        return pair_nonneg(nu, z, method);
    }
    let (j, y, ej, ey, branch) = single(nu, z, method)?;
    let (j1, y1, ej1, ey1, _) = single(nu + 1.0, z, method)?;
    Ok(JyPair {
        nu,
        z,
        j,
        y,
        j_next: j1,
        y_next: y1,
        est_abs_error: [ej, ey, ej1, ey1],
        branch,
    })
}

/// Bessel function of the first kind `J_nu(z)`, `z > 0`.
pub fn bessel_j(nu: f64, z: f64) -> Result<EvalResult> {
    check_arg(nu, z)?;
    let (j, _, ej, _, branch) = single(nu, z, Method::Auto)?;
    Ok(EvalResult {
        value: j,
        est_abs_error: ej,
        branch,
    })
}

/// Weber function `Y_nu(z)`, `z > 0`; continuous across integer orders.
pub fn bessel_y(nu: f64, z: f64) -> Result<EvalResult> {
    check_arg(nu, z)?;
    let (_, y, _, ey, branch) = single(nu, z, Method::Auto)?;
    Ok(EvalResult {
        value: y,
        est_abs_error: ey,
        branch,
    })
}

/// `J_{nu+1}(z) Y_nu(z) - J_nu(z) Y_{nu+1}(z)`; identically `2/(pi z)`.
///
/// For `nu <= -1` both orders are reflected, which maps the expression onto the
/// same one at `-nu-1`. Evaluating it there avoids subtracting two products of
/// size `|Y_{-nu}|^2`.
pub fn cross_product(nu: f64, z: f64) -> Result<f64> {
    check_arg(nu, z)?;
    let base = if nu <= -1.0 { -nu - 1.0 } else { nu };
    Ok(bessel_jy_pair(base, z)?.cross())
}

/// Running sum with Neumaier compensation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `sum_k (-z^2/4)^k / (k! Γ(nu+k+1))`, i.e. `2^nu Λ_nu(z)`, with a tail bound.
fn lambda_series(nu: f64, z: f64) -> (f64, f64) {
    let q = -0.25 * z * z;
    let mut term = rgamma(nu + 1.0);
    let mut acc = CompensatedSum::default();
    acc.add(term);
    let mut largest = term.abs();
    let mut tail = 0.0;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * (nu + kf));
        acc.add(term);
        largest = largest.max(term.abs());
        if kf > nu.abs() && term.abs() <= 1e-17 * acc.value().abs() {
            tail = (term * q / ((kf + 1.0) * (nu + kf + 1.0))).abs();
            break;
        }
    }
    (acc.value(), tail + 4.0 * f64::EPSILON * largest)
}

/// `Λ_nu(z) = z^{-nu} J_nu(z)`, finite and smooth down to `z = 0` where it equals
/// `1/(2^nu Γ(nu+1))`. At negative integer order the branch is flagged
/// [`Branch::PoleContinuation`] and the continued value `(-1)^n z^{2n} Λ_n(z)` is returned.
pub fn bessel_j_scaled(nu: f64, z: f64) -> Result<EvalResult> {
    Order::new(nu)?;
    if !(z >= 0.0) || !z.is_finite() {
        return Err(SpecFunError::Domain { nu, z });
    }
    if nu < 0.0 && nu == nu.floor() {
        let n = -nu;
        let inner = bessel_j_scaled(n, z)?;
        let factor = if n as i64 % 2 == 0 { 1.0 } else { -1.0 } * z.powf(2.0 * n);
        return Ok(EvalResult {
            value: factor * inner.value,
            est_abs_error: factor.abs() * inner.est_abs_error,
            branch: Branch::PoleContinuation,
        });
    }
    let scale = 2f64.powf(-nu);
    if z == 0.0 {
        return Ok(EvalResult {
            value: scale * rgamma(nu + 1.0),
            est_abs_error: 0.0,
            branch: Branch::ZeroLimit,
        });
    }
    if z <= SCALED_SERIES_MAX_ARG {
        let (s, err) = lambda_series(nu, z);
        return Ok(EvalResult {
            value: scale * s,
            est_abs_error: scale * err,
            branch: Branch::PowerSeries,
        });
    }
    let j = bessel_j(nu, z)?;
    let f = z.powf(-nu);
    Ok(EvalResult {
        value: f * j.value,
        est_abs_error: f * j.est_abs_error,
        branch: j.branch,
    })
}

/// `z^nu Y_nu(z)` for `nu >= 0`; tends to `-Γ(nu) 2^nu / pi` as `z → 0` when `nu > 0`.
pub fn bessel_y_scaled(nu: f64, z: f64) -> Result<EvalResult> {
    Order::new(nu)?;
    if nu < 0.0 || !(z >= 0.0) || !z.is_finite() {
        return Err(SpecFunError::Domain { nu, z });
    }
    if z == 0.0 {
        if nu == 0.0 {
            return Err(SpecFunError::Overflow { nu, z });
        }
        return Ok(EvalResult {
            value: -gamma(nu) * 2f64.powf(nu) / PI,
            est_abs_error: 0.0,
            branch: Branch::ZeroLimit,
        });
    }
    if z < steed::TEMME_MAX_ARG {
        let (v, _) = steed::scaled_y_small(nu, z)?;
        let steps = (nu + 0.5).floor();
        return Ok(EvalResult {
            value: v,
            est_abs_error: 32.0 * f64::EPSILON * (1.0 + steps) * v.abs(),
            branch: Branch::Temme,
        });
    }
    let y = bessel_y(nu, z)?;
    let f = z.powf(nu);
    Ok(EvalResult {
        value: f * y.value,
        est_abs_error: f * y.est_abs_error,
        branch: y.branch,
    })
}

/// Both scaled functions at orders `nu, nu+1` for `nu > 0`:
/// `[Λ_nu, Λ_{nu+1}, z^nu Y_nu, z^{nu+1} Y_{nu+1}]`, exact at `z = 0`.
pub fn scaled_pair(nu: f64, z: f64) -> Result<[f64; 4]> {
    if !(nu > 0.0) || nu > MAX_ORDER {
        return Err(SpecFunError::OrderRange { nu });
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(SpecFunError::Domain { nu, z });
    }
    if z < steed::TEMME_MAX_ARG {
        let l0 = bessel_j_scaled(nu, z)?.value;
        let l1 = bessel_j_scaled(nu + 1.0, z)?.value;
        if z == 0.0 {
            let y0 = bessel_y_scaled(nu, 0.0)?.value;
            let y1 = bessel_y_scaled(nu + 1.0, 0.0)?.value;
            return Ok([l0, l1, y0, y1]);
        }
        let (y0, y1) = steed::scaled_y_small(nu, z)?;
        return Ok([l0, l1, y0, y1]);
    }
    let p = pair_nonneg(nu, z, Method::Auto)?;
    let zn = z.powf(nu);
    let out = [p.j / zn, p.j_next / (zn * z), p.y * zn, p.y_next * zn * z];
    if out.iter().any(|v| !v.is_finite()) {
        return Err(SpecFunError::Overflow { nu, z });
    }
    Ok(out)
}

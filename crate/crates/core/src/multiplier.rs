//! Solution multipliers of the mode equation `v'' + mu/(1+t) v' + r^2 v = 0` and
//! the energy operator symbol.
//!
//! Every Bessel cross product `J_nu(a) Y_{nu+delta}(b) - Y_nu(a) J_{nu+delta}(b)`
//! with `a = r`, `b = (1+t) r` is evaluated at nonnegative order through
//! `C_{nu,delta} = (-1)^delta C_{-nu,-delta}`, so integer and negative orders need
//! no special treatment. The real-valued multipliers go through the scaled
//! functions `Λ_nu(z) = z^{-nu} J_nu(z)` and `z^nu Y_nu(z)`, which lets the powers of
//! `r` and `1+t` cancel analytically and makes `r = 0` an ordinary point.

use crate::mat2::Mat2;
use crate::specfun::{self, SpecFunError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

/// Largest supported damping strength; keeps all scaled Bessel factors in range
/// for `(1+t) r` up to about `1e10`.
pub const MAX_MU: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MultiplierError {
    #[error("mu = {0} outside the supported range [2, 20]")]
    MuOutOfRange(f64),
    #[error("kappa = {0} must be finite and nonnegative")]
    InvalidKappa(f64),
    #[error("time t = {0} must be finite and nonnegative")]
    NegativeTime(f64),
    #[error("frequency r = {0} must be finite and nonnegative")]
    InvalidFrequency(f64),
    #[error("this evaluation needs r > 0")]
    ZeroFrequency,
    #[error("index delta = {0} must be -1, 0 or 1")]
    InvalidDelta(i32),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

pub type Result<T> = std::result::Result<T, MultiplierError>;

/// Damping strength `mu`, the derived Bessel order `rho = (1 - mu)/2` and the
/// vanishing-order weight `kappa` of the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    mu: f64,
    rho: f64,
    kappa: f64,
}

impl ModelParams {
    pub fn new(mu: f64, kappa: f64) -> Result<Self> {
        if !(2.0..=MAX_MU).contains(&mu) {
            return Err(MultiplierError::MuOutOfRange(mu));
        }
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(MultiplierError::InvalidKappa(kappa));
        }
        Ok(Self {
            mu,
            rho: (1.0 - mu) / 2.0,
            kappa,
        })
    }

    /// `kappa = (mu - 2)/2`, the weight at which the decay saturates.
    pub fn limit_case(mu: f64) -> Result<Self> {
        Self::new(mu, (mu - 2.0) / 2.0)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `-rho = (mu - 1)/2 >= 1/2`, the order carried by the multipliers.
    pub fn order(&self) -> f64 {
        -self.rho
    }

    pub fn is_limit_case(&self) -> bool {
        self.kappa == (self.mu - 2.0) / 2.0
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        Self::new(self.mu, kappa)
    }
}

/// Indices `(k, s, rho, delta)` of the cross-product symbol
/// `2i r^k <r>^(s+1-k) C_{rho,delta}(r, (1+t) r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierIndex {
    pub k: f64,
    pub s: f64,
    pub rho: f64,
    pub delta: i32,
}

impl MultiplierIndex {
    pub fn new(k: f64, s: f64, rho: f64, delta: i32) -> Result<Self> {
        if !(-1..=1).contains(&delta) {
            return Err(MultiplierError::InvalidDelta(delta));
        }
        Ok(Self { k, s, rho, delta })
    }

    /// The symbol is bounded in `(t, r)` exactly when `s <= 0` and `k >= |delta|`.
    pub fn is_bounded(&self) -> bool {
        self.s <= 0.0 && self.k >= self.delta.abs() as f64
    }
}

/// Radial frequency `r = |xi|`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Freq {
    r: f64,
}

impl Freq {
    pub fn new(r: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(MultiplierError::InvalidFrequency(r));
        }
        Ok(Self { r })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `<r> = sqrt(1 + r^2)`.
    pub fn angle(&self) -> f64 {
        self.r.hypot(1.0)
    }

    /// `[r] = r / <r>`, in `[0, 1)`.
    pub fn bracket(&self) -> f64 {
        bracket(self.r)
    }
}

/// `[r] = r / sqrt(1 + r^2)`.
pub fn bracket(r: f64) -> f64 {
    r / r.hypot(1.0)
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(MultiplierError::NegativeTime(t));
    }
    Ok(())
}

/// `J_nu(a) Y_{nu+delta}(b) - Y_nu(a) J_{nu+delta}(b)` for `a, b > 0`.
pub fn cross_product_two_args(nu: f64, delta: i32, a: f64, b: f64) -> Result<f64> {
    if !(-1..=1).contains(&delta) {
        return Err(MultiplierError::InvalidDelta(delta));
    }
    // reflect so that the leading order is nonnegative
    let (order, shift, sign) = if nu < 0.0 {
        (-nu, -delta, if delta % 2 == 0 { 1.0 } else { -1.0 })
    } else {
        (nu, delta, 1.0)
    };
    let ja = specfun::bessel_j(order, a)?.value;
    let ya = specfun::bessel_y(order, a)?.value;
    let other = order + shift as f64;
    let jb = specfun::bessel_j(other, b)?.value;
    let yb = specfun::bessel_y(other, b)?.value;
    Ok(sign * (ja * yb - ya * jb))
}

/// The cross-product symbol `Ψ_idx(t, r)`; purely imaginary. Needs `r > 0`.
pub fn psi(idx: MultiplierIndex, t: f64, f: Freq) -> Result<Complex64> {
    check_time(t)?;
    if f.r == 0.0 {
        return Err(MultiplierError::ZeroFrequency);
    }
    let r = f.r;
    let c = cross_product_two_args(idx.rho, idx.delta, r, (1.0 + t) * r)?;
    let weight = r.powf(idx.k) * f.angle().powf(idx.s + 1.0 - idx.k);
    let value = 2.0 * weight * c;
    if !value.is_finite() {
        // r^k underflows against a huge cross product; the scaled route handles this
        return Err(SpecFunError::Overflow { nu: idx.rho, z: r }.into());
    }
    Ok(Complex64::new(0.0, value))
}

/// The four real multipliers at one `(t, r)`: displacement and velocity
/// propagators and their time derivatives. `dphi1_over_r` stays finite at `r = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Multipliers {
    pub phi1: f64,
    pub phi2: f64,
    pub dphi1_over_r: f64,
    pub dphi2: f64,
}

/// All four multipliers through the scaled Bessel functions; valid for `r >= 0`.
pub fn multipliers(p: &ModelParams, t: f64, f: Freq) -> Result<Multipliers> {
    check_time(t)?;
    let lam = p.order();
    let s = 1.0 + t;
    let r = f.r;
    // [Λ_lam, Λ_{lam+1}, Ỹ_lam, Ỹ_{lam+1}] at a = r and b = (1+t) r
    let [la0, la1, ya0, ya1] = specfun::scaled_pair(lam, r)?;
    let [lb0, lb1, yb0, yb1] = specfun::scaled_pair(lam, s * r)?;
    let r2 = r * r;
    let s_lo = s.powf(1.0 - p.mu);
    let s_mu = s.powf(-p.mu);
    Ok(Multipliers {
        phi1: FRAC_PI_2 * (r2 * s_lo * la1 * yb0 - ya1 * lb0),
        phi2: FRAC_PI_2 * (s_lo * la0 * yb0 - ya0 * lb0),
        dphi1_over_r: -FRAC_PI_2 * r * (s_mu * la1 * yb1 - s * ya1 * lb1),
        dphi2: -FRAC_PI_2 * (s_mu * la0 * yb1 - r2 * s * ya0 * lb1),
    })
}

/// Exact multipliers at `r = 0`, where the mode equation integrates in closed form.
pub fn multipliers_at_zero(p: &ModelParams, t: f64) -> Result<Multipliers> {
    check_time(t)?;
    let s = 1.0 + t;
    Ok(Multipliers {
        phi1: 1.0,
        phi2: (1.0 - s.powf(1.0 - p.mu)) / (p.mu - 1.0),
        dphi1_over_r: 0.0,
        dphi2: s.powf(-p.mu),
    })
}

fn prefactor(p: &ModelParams, t: f64) -> Complex64 {
    Complex64::new(0.0, PI / 4.0 * (1.0 + t).powf(p.rho))
}

fn index(k: f64, s: f64, rho: f64, delta: i32) -> MultiplierIndex {
    MultiplierIndex { k, s, rho, delta }
}

/// `Φ₁ = (iπ/4)(1+t)^ρ Ψ_{1,0,ρ-1,1}`, propagates the initial displacement.
pub fn phi1(p: &ModelParams, t: f64, f: Freq) -> Result<Complex64> {
    Ok(prefactor(p, t) * psi(index(1.0, 0.0, p.rho - 1.0, 1), t, f)?)
}

/// `Φ₂ = -(iπ/4)(1+t)^ρ Ψ_{0,-1,ρ,0}`, propagates the initial velocity.
pub fn phi2(p: &ModelParams, t: f64, f: Freq) -> Result<Complex64> {
    Ok(-prefactor(p, t) * psi(index(0.0, -1.0, p.rho, 0), t, f)?)
}

/// `∂_t Φ₁ = (iπ/4)(1+t)^ρ Ψ_{2,1,ρ-1,0}`.
pub fn dphi1(p: &ModelParams, t: f64, f: Freq) -> Result<Complex64> {
    Ok(prefactor(p, t) * psi(index(2.0, 1.0, p.rho - 1.0, 0), t, f)?)
}

/// `∂_t Φ₂ = -(iπ/4)(1+t)^ρ Ψ_{1,0,ρ,-1}`.
pub fn dphi2(p: &ModelParams, t: f64, f: Freq) -> Result<Complex64> {
    Ok(-prefactor(p, t) * psi(index(1.0, 0.0, p.rho, -1), t, f)?)
}

/// Energy operator symbol: maps `[r]^{-kappa}(<r> û₁, û₂)` to `(r û, û_t)` at time `t`.
/// At `t = 0` it is `diag([r]^{1+kappa}, [r]^kappa)`.
pub fn energy_symbol(p: &ModelParams, t: f64, f: Freq) -> Result<Mat2> {
    let m = multipliers(p, t, f)?;
    let b = f.bracket();
    let w1 = b.powf(1.0 + p.kappa);
    let w0 = b.powf(p.kappa);
    Ok(Mat2::new(
        w1 * m.phi1,
        w0 * f.r * m.phi2,
        w1 * m.dphi1_over_r,
        w0 * m.dphi2,
    ))
}

/// The same symbol assembled entry by entry from the complex cross-product
/// symbols, `(iπ/4)(1+t)^ρ [[Ψ_{2+κ,0,ρ-1,1}, -Ψ_{1+κ,0,ρ,0}], [Ψ_{2+κ,0,ρ-1,0}, -Ψ_{1+κ,0,ρ,-1}]]`.
/// Needs `r > 0`; kept as an independent route for consistency checks.
pub fn energy_symbol_complex(p: &ModelParams, t: f64, f: Freq) -> Result<[Complex64; 4]> {
    let c = prefactor(p, t);
    let k = p.kappa;
    let rho = p.rho;
    Ok([
        c * psi(index(2.0 + k, 0.0, rho - 1.0, 1), t, f)?,
        -c * psi(index(1.0 + k, 0.0, rho, 0), t, f)?,
        c * psi(index(2.0 + k, 0.0, rho - 1.0, 0), t, f)?,
        -c * psi(index(1.0 + k, 0.0, rho, -1), t, f)?,
    ])
}

/// Propagator of the energy variables `(r v, v')` for the mode equation:
/// `[[Φ₁, r Φ₂], [∂Φ₁ / r, ∂Φ₂]]`. Its determinant is `(1+t)^{-mu}`.
pub fn fundamental_symbol(p: &ModelParams, t: f64, f: Freq) -> Result<Mat2> {
    let m = multipliers(p, t, f)?;
    Ok(Mat2::new(m.phi1, f.r * m.phi2, m.dphi1_over_r, m.dphi2))
}

/// `det(fundamental_symbol)`, through the factorization of the symbol into a
/// matrix of Bessel values at `(1+t) r` times one at `r`. Each factor's
/// determinant is a cross product `x (J_{l+1} Y_l - J_l Y_{l+1})(x)`, so this
/// avoids the cancellation of expanding the entries, which grows with `t` for
/// small `r`.
pub fn fundamental_det(p: &ModelParams, t: f64, f: Freq) -> Result<f64> {
    check_time(t)?;
    let s = 1.0 + t;
    let r = f.r;
    if r == 0.0 {
        return Ok(s.powf(-p.mu));
    }
    let lam = p.order();
    let scaled_cross = |x: f64| -> Result<f64> {
        let [l0, l1, y0, y1] = specfun::scaled_pair(lam, x)?;
        Ok(x * x * l1 * y0 - l0 * y1)
    };
    Ok(FRAC_PI_2 * FRAC_PI_2 * s.powf(-p.mu) * scaled_cross(r)? * scaled_cross(s * r)?)
}

/// `det(energy_symbol)`, from [`fundamental_det`] and the diagonal weights.
pub fn energy_symbol_det(p: &ModelParams, t: f64, f: Freq) -> Result<f64> {
    Ok(fundamental_det(p, t, f)? * f.bracket().powf(1.0 + 2.0 * p.kappa))
}

/// `|(1+t)^mu det(fundamental_symbol) - 1|`, with the determinant from [`fundamental_det`].
pub fn wronskian_defect(p: &ModelParams, t: f64, f: Freq) -> Result<f64> {
    Ok((fundamental_det(p, t, f)? * (1.0 + t).powf(p.mu) - 1.0).abs())
}

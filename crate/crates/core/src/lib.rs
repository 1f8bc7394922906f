//! Numerical laboratory for the wave equation with scale-invariant damping
//! `u_tt - Δu + mu/(1+t) u_t = 0`: Bessel-function solution multipliers, an
//! independent ODE oracle, decay-rate experiments and the modified scattering
//! limit.

// range checks are written `!(x >= lo)` so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod energy_lab;
pub mod grid;
pub mod mat2;
pub mod mode_oracle;
pub mod multiplier;
pub mod scattering;
pub mod specfun;
pub mod supnorm_lab;

pub use mat2::Mat2;
pub use multiplier::{Freq, ModelParams, MultiplierIndex};

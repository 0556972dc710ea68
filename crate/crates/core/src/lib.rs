//! Numerical laboratory for linear inviscid damping and enhanced dissipation of
//! perturbations of the Kolmogorov flow `u(y) = −cos y` on the torus `T_{2πδ} × T_{2π}`.

pub mod cli;
pub mod error;
pub mod fit;
pub mod fourier;
pub mod inviscid;
pub mod nonlinear;
pub mod quad;
pub mod rayleigh;
pub mod spectral_kernels;
pub mod torus_field;
pub mod viscous;
pub mod wave_op;

#[cfg(test)]
pub(crate) mod oracle;

pub use error::{Error, Result};

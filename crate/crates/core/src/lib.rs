#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Numerical laboratory for Benjamin–Ono multisolitons.
//!
//! The crate models the real line by a large periodic box and provides:
//!
//! - [`field`]: grids, the Szegő projector, `|D|`, derivatives and norms;
//! - [`soliton`]: rational soliton profiles, pole families, summability and
//!   the closed-form Hardy projection;
//! - [`engine`]: the resolvent-matrix multisoliton formula with its Neumann
//!   diagnostics and a PDE-residual oracle;
//! - [`lax`]: the discretized Lax operator `D − T_u`, its negative spectrum and
//!   the trace identity;
//! - [`scattering`]: Jost functions, distorted Fourier coefficients and the
//!   radiation profile;
//! - [`evolution`]: the free propagator and an integrating-factor RK4 solver;
//! - [`lab`]: error curves, bound calculus, gap checks and decay fits.

pub mod engine;
pub mod error;
pub mod evolution;
mod fft;
pub mod field;
pub mod io;
pub mod lab;
pub mod lax;
pub mod scattering;
pub mod soliton;

pub use error::{Error, Result};
pub use field::{Grid1D, HardyCoeffs, NormKind, SampledField};
pub use num_complex::Complex64;
pub use soliton::{SolitonFamily, SolitonParam};

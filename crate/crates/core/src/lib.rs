//! Numerical spectral and dynamical stability toolkit for peakons of the
//! b-Novikov equation
//!
//! ```text
//! u_t - u_txx + (b + 1) u² u_x = b u u_x u_xx + u² u_xxx
//! ```
//!
//! linearized about φ(ξ) = e^{-|ξ|} in the co-moving frame ξ = x - t.

pub mod closed_form;
pub mod convolution;
pub mod error;
pub mod evolution;
pub mod exec;
pub mod grid;
pub mod nonlocal;
pub mod operators;
pub mod profile;
pub mod quadrature;

pub use error::{Error, Result};
pub use exec::Exec;
pub use grid::{Grid, GridFunction};
pub use num_complex::Complex64;
pub use profile::{peakon, peakon_derivative};

//! Numerical core for Szegő-kernel solutions of 2×2 Riemann–Hilbert problems
//! with quasi-permutation monodromy on hyperelliptic curves.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command-line
//! frontend and parallel verification live in the `rhszego` companion crate.
#![no_std]

extern crate alloc;

pub mod covering;
pub mod error;
pub mod hyperelliptic;
pub mod isomonodromy;
pub mod kernels;
pub mod linalg;
pub mod quadrature;
pub mod rh;
pub mod theta;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;

/// Complex double.
pub type C64 = num_complex::Complex64;

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

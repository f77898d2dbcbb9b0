//! Closed-form propagator kernels and the numerics around them.
//!
//! Heat, free Schrödinger, Mehler and relativistic square-root kernels are evaluated
//! pointwise through [`KernelFunction`]. [`symbol_to_kernel`] builds kernel samples from
//! a symbol by discrete Fourier quadrature and [`compose`] measures the reproducing
//! property on a [`Grid1D`].

pub mod bessel;
pub mod compose;
pub mod grid;
pub mod kernel;
pub mod symbol;

use thiserror::Error;

pub use bessel::{bessel_j, bessel_k, bessel_k2, bessel_y, hankel_h2_1, hankel_h2_2};
pub use compose::{compose, compose_with, propagate_on_grid, ComposeOptions, CompositionReport};
pub use grid::{Grid1D, KernelTable};
pub use kernel::{beta_matrix, KernelFunction, LightConeRegion};
pub use symbol::{symbol_to_kernel, symbol_to_kernel_with, validate_symbol, SymbolCheck, SymbolClass, SymbolKernel, SymbolOptions};

pub type C64 = num_complex::Complex<f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("singular: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, KernelError>;

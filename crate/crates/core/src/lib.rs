//! Time-ordered operator calculus at matrix scale.

pub mod chrono;
pub mod error;
pub mod evolution;
pub mod family;
pub mod gauge;
pub mod linalg;
pub mod matcore;
pub mod matrix;
pub mod pathsum;
pub mod quadrature;
pub mod sample;
pub mod scalar;

pub use error::{Error, Result};
pub use family::{ContinuityClass, GeneratorFamily};
pub use matrix::{ComplexMatrix, MatrixJson, StateVector};
pub use scalar::Real;

pub use num_complex::Complex;

/// Double-precision complex scalar.
pub type C64 = Complex<f64>;
/// Double-precision matrix.
pub type CMatrix = ComplexMatrix<f64>;
/// Single-precision matrix.
pub type CMatrix32 = ComplexMatrix<f32>;
/// Double-precision state vector.
pub type CVector = StateVector<f64>;
/// Double-precision generator family.
pub type Family = GeneratorFamily<f64>;

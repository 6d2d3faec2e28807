//! Operator connections on positive semidefinite matrices.
//!
//! A connection `σ` is described by a named mean, a representing operator
//! monotone function `f` with `f(x) I = I σ (xI)`, a representing measure
//! `μ` on `[0, ∞]`, or a nonnegative combination of these. The crate
//! evaluates `A σ B`, converts between the three descriptions, computes the
//! norm `‖σ‖ = ‖I σ I‖ = f(1) = μ([0, ∞])` and checks the defining axioms on
//! random instances.
//!
//! ```
//! use opcone::{Connection, Matrix};
//!
//! let a = Matrix::from_diagonal(&[1.0, 4.0]).unwrap();
//! let b = Matrix::from_diagonal(&[4.0, 1.0]).unwrap();
//! let g = Connection::geometric().evaluate(&a, &b).unwrap();
//! assert!((g.entries()[(0, 0)] - 2.0).abs() < 1e-12);
//! assert_eq!(Connection::harmonic().norm().unwrap().value, 1.0);
//! ```
//!
//! Everything is generic over the scalar field (`f32` or `f64`); the
//! aliases below fix `f64`, with `*32` variants for single precision.

pub mod connections;
pub mod error;
pub mod matcore;
pub mod measures;
pub mod monotone;
pub mod scalar;
pub mod specs;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Entry, Real};

pub type Matrix = matcore::PsdMatrix<f64>;
pub type Hermitian = matcore::HermitianMatrix<f64>;
pub type ComplexMatrix = matcore::PsdMatrix<f64, num_complex::Complex64>;
pub type Connection = connections::Connection<f64>;
pub type Function = monotone::OMFunction<f64>;
pub type Measure = measures::RepMeasure<f64>;
pub type Quadrature = measures::QuadSpec<f64>;

pub type Matrix32 = matcore::PsdMatrix<f32>;
pub type Connection32 = connections::Connection<f32>;
pub type Function32 = monotone::OMFunction<f32>;
pub type Measure32 = measures::RepMeasure<f32>;

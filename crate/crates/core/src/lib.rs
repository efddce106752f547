//! Exact finite-depth instantiation of an infinite product-measure dynamical
//! system with a diagonal group action: vanishing matrix coefficients,
//! almost-invariant unit vectors, and the supporting measure-theoretic checks,
//! all in exact rational arithmetic.

pub mod arith;
pub mod base;
pub mod error;
pub mod invariance;
pub mod literal;
pub mod product;
pub mod witness;

pub use arith::{Enclosure, MeasureValue, Rational};
pub use error::{Error, Result};

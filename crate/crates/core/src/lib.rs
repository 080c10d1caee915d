//! Representation numbers of the diagonal forms `x^2 + z y^2`, the genus
//! characters of `Q(sqrt(-z))`, and the numerical checks built on top of them.

pub mod arith;
pub mod error;

pub use arith::{Discriminant, PrimeSubset, ShapeZ, SubsetKind};
pub use error::{Error, Result};
pub mod forms;
pub mod genus;
pub mod harness;
pub mod lfunc;
pub mod moments;
pub mod sieve;

//! Exact combinatorial dynamics for maps of intervals, trees and graphs.

pub mod cli;
pub mod error;
pub mod markov;
pub mod matrix;
pub mod orders;
pub mod permutation;
pub mod pwl;
pub mod scalar;
pub mod trees;
pub mod verify;
pub mod walks;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use error::{DynError, Result};
pub use markov::{MarkovGraph, Sign};
pub use matrix::SignedMatrix;
pub use permutation::Permutation;
pub use pwl::PlMap;
pub use trees::{GraphVertexMap, Tree, TreeVertexMap};
pub use walks::Walk;

/// Exact rational scalar.
pub type Rational = BigRational;
/// Arbitrary-precision signed integer matrix.
pub type IntMatrix = SignedMatrix<BigInt>;
/// Connect-the-dots and other piecewise-linear maps with exact breakpoints.
pub type ExactMap = PlMap<Rational>;
/// Float instantiation for plotting-grade evaluation.
pub type FloatMap = PlMap<f64>;

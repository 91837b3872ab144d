//! Achronal localization in Minkowski spacetime: causal predicates, maximal
//! achronal surfaces, the Poincaré group and its Wigner rotations, the
//! localization on timelike lines and the mass-spectrum decomposition.

// `!(x > 0.0)` guards reject NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod lattice;
pub mod linespace;
pub mod minkowski;
pub mod poincare;
pub mod spectrum;
pub mod surfaces;
pub mod tolerances;

pub use error::{Error, Result};

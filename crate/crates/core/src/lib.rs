//! Exact p-rank computations for hyperelliptic curves over finite fields and
//! the weighted census of p-rank-zero étale double covers of genus-2 curves.

pub mod error;
pub mod ff;
pub mod linalg;
pub mod poly;
pub mod extension;
pub mod bipoly;
pub mod curve;
pub mod covers;
pub mod mobius;
pub mod solver;
pub mod mult;
pub mod census;

pub use error::{Error, Result};

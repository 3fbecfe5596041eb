#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod decay;
pub mod error;
pub mod exponents;
pub mod fit;
pub mod grid;
pub mod measures;
pub mod multiplier;
mod syntax;
pub mod varlp;

pub use error::{Error, Result};

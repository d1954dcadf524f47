// Negated comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod format;
pub mod grid;
pub mod group;
pub mod numkernel;
pub mod pairs;
pub mod radon;
pub mod rng;
pub mod spin;
pub mod states;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
